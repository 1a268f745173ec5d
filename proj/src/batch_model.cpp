// SPDX-License-Identifier: Apache-2.0
#include "ftcost/batch_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ftcost {

namespace {

void check_prediction_args(const BatchCoeffs& coeffs, double gpu_mem_gib, double model_mem_gib,
                           int seq_len, double sparsity) {
    if (!(coeffs.c0 > 0.0)) throw InputError("batch coefficient c0 must be > 0");
    if (!(coeffs.c1 >= 0.0 && coeffs.c1 <= 1.0)) throw InputError("batch coefficient c1 must be in [0, 1]");
    if (!(gpu_mem_gib > 0.0)) throw InputError("gpu_mem_gib must be > 0");
    if (model_mem_gib < 0.0) throw InputError("model_mem_gib must be >= 0");
    if (seq_len < 1) throw InputError("seq_len must be >= 1");
    if (!(sparsity > 0.0 && sparsity <= 1.0)) throw InputError("sparsity must be in (0, 1]");
}

// Prediction without argument checks, for the calibration inner loop.
int predict_unchecked(double c0, double c1, double gpu_mem_gib, double model_mem_gib, int seq_len,
                      double sparsity) {
    if (gpu_mem_gib <= model_mem_gib) return 0;
    double denom = static_cast<double>(seq_len) * ((1.0 - c1) + c1 * sparsity);
    double value = std::floor(c0 * (gpu_mem_gib - model_mem_gib) / denom);
    if (value >= static_cast<double>(std::numeric_limits<int>::max()))
        throw DomainError("predicted batch size overflows");
    return static_cast<int>(value);
}

struct ObservationPoint {
    double gpu_mem = 0.0;
    double model_mem = 0.0;
    int seq_len = 1;
    double sparsity = 1.0;
    int observed = 0;
};

struct Candidate {
    long long score = std::numeric_limits<long long>::max();
    long long max_abs = std::numeric_limits<long long>::max();
    double c0 = 0.0;
    double c1 = 0.0;

    bool better_than(const Candidate& other) const {
        if (score != other.score) return score < other.score;
        if (max_abs != other.max_abs) return max_abs < other.max_abs;
        if (c0 != other.c0) return c0 < other.c0;
        return c1 < other.c1;
    }
};

// Saturating prediction for the grid scan; extreme cells (c1 -> 1 with tiny
// observed sparsity) must score badly instead of overflowing.
constexpr double kPredictionCap = 4.0e15;

Candidate evaluate(double c0, double c1, const std::vector<ObservationPoint>& points) {
    Candidate cand;
    cand.score = 0;
    cand.max_abs = 0;
    cand.c0 = c0;
    cand.c1 = c1;
    for (const auto& p : points) {
        double raw = 0.0;
        if (p.gpu_mem > p.model_mem) {
            double denom = static_cast<double>(p.seq_len) * ((1.0 - c1) + c1 * p.sparsity);
            raw = std::floor(c0 * (p.gpu_mem - p.model_mem) / denom);
        }
        long long predicted =
            raw >= kPredictionCap ? static_cast<long long>(kPredictionCap) : static_cast<long long>(raw);
        long long r = std::llabs(predicted - p.observed);
        cand.score += r;
        cand.max_abs = std::max(cand.max_abs, r);
    }
    return cand;
}

Candidate grid_scan(const std::vector<ObservationPoint>& points, double c0_lo, double c0_hi,
                    double c0_step, double c1_lo, double c1_hi, double c1_step, Candidate best) {
    int n0 = static_cast<int>(std::llround((c0_hi - c0_lo) / c0_step));
    int n1 = static_cast<int>(std::llround((c1_hi - c1_lo) / c1_step));
    for (int i = 0; i <= n0; ++i) {
        double c0 = c0_lo + i * c0_step;
        for (int j = 0; j <= n1; ++j) {
            double c1 = std::min(c1_lo + j * c1_step, 1.0);
            Candidate cand = evaluate(c0, c1, points);
            if (cand.better_than(best)) best = cand;
        }
    }
    return best;
}

constexpr double kCoarseC0Lo = 0.5;
constexpr double kCoarseC0Hi = 200.0;
constexpr double kCoarseC0Step = 0.05;
constexpr double kCoarseC1Step = 0.005;

}  // namespace

int predict_max_batch(const BatchCoeffs& coeffs, double gpu_mem_gib, double model_mem_gib,
                      int seq_len, double sparsity) {
    check_prediction_args(coeffs, gpu_mem_gib, model_mem_gib, seq_len, sparsity);
    return predict_unchecked(coeffs.c0, coeffs.c1, gpu_mem_gib, model_mem_gib, seq_len, sparsity);
}

CalibrationReport calibrate_batch_coeffs(const std::vector<BatchObservation>& observations,
                                         const Catalog& catalog) {
    if (observations.empty()) throw DomainError("no observations to calibrate on");
    for (const auto& o : observations) {
        if (o.model != observations.front().model)
            throw InputError("observations span multiple models (\"" + observations.front().model +
                             "\" and \"" + o.model + "\"); calibrate one model at a time");
    }

    std::vector<ObservationPoint> points;
    points.reserve(observations.size());
    for (const auto& o : observations) {
        const GpuSpec& gpu = catalog.gpu(o.gpu);
        const ModelSpec& model = catalog.model(o.model);
        const DatasetSpec& dataset = catalog.dataset(o.dataset);
        if (!(o.sparsity > 0.0 && o.sparsity <= 1.0))
            throw InputError("observation sparsity must be in (0, 1]");
        points.push_back({gpu.memory_gib, model.resident_memory_gib, dataset.median_seq_len, o.sparsity,
                          o.observed_max_bs});
    }

    Candidate best;
    best = grid_scan(points, kCoarseC0Lo, kCoarseC0Hi, kCoarseC0Step, 0.0, 1.0, kCoarseC1Step, best);
    // Refine one coarse cell around the winner at 10x resolution. The winner
    // seeds `best`, so refinement can only improve under the tie-break order.
    double r0_lo = std::max(best.c0 - kCoarseC0Step, kCoarseC0Step / 10.0);
    double r1_lo = std::max(best.c1 - kCoarseC1Step, 0.0);
    double r1_hi = std::min(best.c1 + kCoarseC1Step, 1.0);
    best = grid_scan(points, r0_lo, best.c0 + kCoarseC0Step, kCoarseC0Step / 10.0, r1_lo, r1_hi,
                     kCoarseC1Step / 10.0, best);

    CalibrationReport report;
    report.coeffs = {best.c0, best.c1};
    report.max_abs_residual = 0;
    report.exact_matches = 0;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const auto& p = points[i];
        int predicted = predict_unchecked(best.c0, best.c1, p.gpu_mem, p.model_mem, p.seq_len, p.sparsity);
        int residual = predicted - p.observed;
        report.residuals.push_back({observations[i], predicted, residual});
        report.max_abs_residual = std::max(report.max_abs_residual, std::abs(residual));
        if (residual == 0) ++report.exact_matches;
    }
    return report;
}

std::vector<std::pair<double, int>> project_max_batch(const BatchCoeffs& coeffs, double model_mem_gib,
                                                      int seq_len, double sparsity,
                                                      const std::vector<double>& mem_grid) {
    if (mem_grid.empty()) throw InputError("memory grid is empty");
    std::vector<std::pair<double, int>> out;
    out.reserve(mem_grid.size());
    for (double mem : mem_grid)
        out.emplace_back(mem, predict_max_batch(coeffs, mem, model_mem_gib, seq_len, sparsity));
    return out;
}

}  // namespace ftcost
