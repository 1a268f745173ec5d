// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "ftcost/catalog.hpp"

namespace ftcost {

struct FitResidual {
    ProfileSample sample;
    double predicted = 0.0;
    double residual = 0.0;  // predicted - measured
};

struct FitReport {
    ThroughputCoeffs coeffs;
    double rmse = 0.0;  // queries/second
    std::vector<FitResidual> residuals;
    int sample_count = 0;
};

// Throughput in queries/second. Natural logarithm throughout.
//   literal: c2 * ln(batch / (sparsity * c3)) + c4
//   power:   c2 * ln(batch / sparsity^c3) + c4
// The result may be <= 0 for extreme coefficients; interpreting that is the
// caller's concern, not an evaluation error.
double predict_throughput(const ThroughputCoeffs& coeffs, int batch_size, double sparsity);

// Exact linear least squares after the log transform; both forms are linear
// in their free parameters, so fits are deterministic and tolerance-free.
//   literal: c3 pinned at 1, regress T on {ln(batch/sparsity), 1}
//   power:   regress T on {ln(batch), -ln(sparsity), 1}; c3 = b/a
// All samples must share one (gpu, model, dataset) key.
FitReport fit_throughput(const std::vector<ProfileSample>& samples, ThroughputForm form);

// Root mean squared error of the coefficients against measured samples.
double rmse(const ThroughputCoeffs& coeffs, const std::vector<ProfileSample>& samples);

}  // namespace ftcost
