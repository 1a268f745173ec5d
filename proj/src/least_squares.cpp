// SPDX-License-Identifier: Apache-2.0
#include "ftcost/least_squares.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <utility>

namespace ftcost {

LeastSquaresSolution solve_least_squares(const std::vector<double>& a, int rows, int cols,
                                         const std::vector<double>& b) {
    assert(rows >= cols && cols >= 1);
    assert(static_cast<int>(a.size()) == rows * cols);
    assert(static_cast<int>(b.size()) == rows);

    // Column-major working copy; r(i, j) = mat[j * rows + i].
    std::vector<double> mat(a.size());
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) mat[j * rows + i] = a[i * cols + j];
    std::vector<double> rhs = b;
    std::vector<int> perm(cols);
    for (int j = 0; j < cols; ++j) perm[j] = j;

    auto col_norm2 = [&](int j, int from) {
        double s = 0.0;
        for (int i = from; i < rows; ++i) s += mat[j * rows + i] * mat[j * rows + i];
        return s;
    };

    for (int k = 0; k < cols; ++k) {
        // Pivot on the column with the largest remaining norm.
        int pivot = k;
        double best = col_norm2(k, k);
        for (int j = k + 1; j < cols; ++j) {
            double n2 = col_norm2(j, k);
            if (n2 > best) { best = n2; pivot = j; }
        }
        if (pivot != k) {
            for (int i = 0; i < rows; ++i) std::swap(mat[k * rows + i], mat[pivot * rows + i]);
            std::swap(perm[k], perm[pivot]);
        }

        double norm = std::sqrt(best);
        if (norm == 0.0) continue;  // column already zero; R(k,k) = 0

        // Householder vector stored in place below the diagonal.
        double& akk = mat[k * rows + k];
        double alpha = akk >= 0.0 ? -norm : norm;
        double v0 = akk - alpha;
        double vnorm2 = best - akk * akk + v0 * v0;
        akk = alpha;
        if (vnorm2 > 0.0) {
            for (int j = k + 1; j < cols; ++j) {
                double dot = v0 * mat[j * rows + k];
                for (int i = k + 1; i < rows; ++i) dot += mat[k * rows + i] * mat[j * rows + i];
                double scale = 2.0 * dot / vnorm2;
                mat[j * rows + k] -= scale * v0;
                for (int i = k + 1; i < rows; ++i) mat[j * rows + i] -= scale * mat[k * rows + i];
            }
            double dot = v0 * rhs[k];
            for (int i = k + 1; i < rows; ++i) dot += mat[k * rows + i] * rhs[i];
            double scale = 2.0 * dot / vnorm2;
            rhs[k] -= scale * v0;
            for (int i = k + 1; i < rows; ++i) rhs[i] -= scale * mat[k * rows + i];
        }
    }

    // Numerical rank from the pivoted R diagonal.
    double rmax = std::abs(mat[0]);
    double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(rows) * rmax;
    LeastSquaresSolution sol;
    for (int k = 0; k < cols; ++k) {
        if (std::abs(mat[k * rows + k]) > tol) ++sol.rank;
    }
    if (sol.rank < cols) return sol;

    // Back substitution on R x' = Q' b, then undo the column permutation.
    std::vector<double> x(cols, 0.0);
    for (int k = cols - 1; k >= 0; --k) {
        double s = rhs[k];
        for (int j = k + 1; j < cols; ++j) s -= mat[j * rows + k] * x[j];
        x[k] = s / mat[k * rows + k];
    }
    sol.coefficients.resize(cols);
    for (int j = 0; j < cols; ++j) sol.coefficients[perm[j]] = x[j];
    return sol;
}

}  // namespace ftcost
