// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace ftcost {

struct LeastSquaresSolution {
    std::vector<double> coefficients;  // size cols; empty when rank deficient
    int rank = 0;
};

// Minimizes ||A x - b||_2 by Householder QR with column pivoting.
// `a` is row-major, rows x cols, rows >= cols. A rank-deficient system is
// reported via rank < cols rather than solved in a minimum-norm sense.
LeastSquaresSolution solve_least_squares(const std::vector<double>& a, int rows, int cols,
                                         const std::vector<double>& b);

}  // namespace ftcost
