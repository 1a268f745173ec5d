// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "ftcost/catalog.hpp"

namespace ftcost {

struct BatchResidual {
    BatchObservation observation;
    int predicted = 0;
    int residual = 0;  // predicted - observed
};

struct CalibrationReport {
    BatchCoeffs coeffs;
    std::vector<BatchResidual> residuals;
    int max_abs_residual = 0;
    int exact_matches = 0;
};

// Maximum batch size fitting in GPU memory:
//   floor(c0 * (gpu_mem - model_mem) / (seq_len * ((1 - c1) + c1 * sparsity)))
// clamped at 0 when the model does not fit (gpu_mem <= model_mem).
int predict_max_batch(const BatchCoeffs& coeffs, double gpu_mem_gib, double model_mem_gib,
                      int seq_len, double sparsity);

// Fits (c0, c1) to observed maximum batch sizes by minimizing the L1 norm of
// integer residuals over a deterministic two-level grid:
//   coarse  c0 in [0.5, 200] step 0.05, c1 in [0, 1] step 0.005
//   refined +/- one coarse cell at 10x resolution
// Ties prefer smaller max |residual|, then smaller c0, then smaller c1.
// All observations must belong to one model; gpu and dataset names resolve
// against the catalog for memory and sequence-length lookups.
CalibrationReport calibrate_batch_coeffs(const std::vector<BatchObservation>& observations,
                                         const Catalog& catalog);

// predict_max_batch applied pointwise over a grid of GPU memory capacities.
std::vector<std::pair<double, int>> project_max_batch(const BatchCoeffs& coeffs, double model_mem_gib,
                                                      int seq_len, double sparsity,
                                                      const std::vector<double>& mem_grid);

}  // namespace ftcost
