// SPDX-License-Identifier: Apache-2.0
#include "ftcost/throughput_model.hpp"

#include <cmath>
#include <set>

#include "ftcost/least_squares.hpp"

namespace ftcost {

double predict_throughput(const ThroughputCoeffs& coeffs, int batch_size, double sparsity) {
    if (batch_size < 1) throw InputError("batch_size must be >= 1");
    if (!(sparsity > 0.0 && sparsity <= 1.0)) throw InputError("sparsity must be in (0, 1]");
    double bs = static_cast<double>(batch_size);
    if (coeffs.form == ThroughputForm::Literal) {
        if (!(coeffs.c3 > 0.0)) throw InputError("literal form requires c3 > 0");
        return coeffs.c2 * std::log(bs / (sparsity * coeffs.c3)) + coeffs.c4;
    }
    return coeffs.c2 * std::log(bs / std::pow(sparsity, coeffs.c3)) + coeffs.c4;
}

namespace {

void check_single_key(const std::vector<ProfileSample>& samples) {
    const ProfileSample& first = samples.front();
    for (const auto& s : samples) {
        if (s.gpu != first.gpu || s.model != first.model || s.dataset != first.dataset)
            throw InputError("samples span multiple (gpu, model, dataset) keys: (" + first.gpu + ", " +
                             first.model + ", " + first.dataset + ") vs (" + s.gpu + ", " + s.model +
                             ", " + s.dataset + ")");
    }
}

FitReport finish_report(ThroughputCoeffs coeffs, const std::vector<ProfileSample>& samples) {
    FitReport report;
    report.coeffs = coeffs;
    report.sample_count = static_cast<int>(samples.size());
    double sq = 0.0;
    for (const auto& s : samples) {
        double predicted = predict_throughput(coeffs, s.batch_size, s.sparsity);
        double residual = predicted - s.throughput_qps;
        sq += residual * residual;
        report.residuals.push_back({s, predicted, residual});
    }
    report.rmse = std::sqrt(sq / static_cast<double>(samples.size()));
    return report;
}

}  // namespace

FitReport fit_throughput(const std::vector<ProfileSample>& samples, ThroughputForm form) {
    if (samples.empty()) throw DomainError("no samples to fit");
    check_single_key(samples);
    for (const auto& s : samples) {
        if (s.batch_size < 1) throw InputError("sample batch_size must be >= 1");
        if (!(s.sparsity > 0.0 && s.sparsity <= 1.0)) throw InputError("sample sparsity must be in (0, 1]");
    }

    std::set<int> batch_values;
    std::set<double> sparsity_values;
    for (const auto& s : samples) {
        batch_values.insert(s.batch_size);
        sparsity_values.insert(s.sparsity);
    }

    int n = static_cast<int>(samples.size());
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = samples[i].throughput_qps;

    if (form == ThroughputForm::Literal) {
        if (n < 2) throw DomainError("literal fit needs at least 2 samples");
        if (batch_values.size() < 2)
            throw DomainError("literal fit needs at least 2 distinct batch sizes (all samples at batch size " +
                              std::to_string(*batch_values.begin()) + ")");
        std::vector<double> design(n * 2);
        for (int i = 0; i < n; ++i) {
            design[i * 2] = std::log(static_cast<double>(samples[i].batch_size) / samples[i].sparsity);
            design[i * 2 + 1] = 1.0;
        }
        auto sol = solve_least_squares(design, n, 2, rhs);
        if (sol.rank < 2)
            throw DomainError("literal fit design matrix is rank deficient: ln(batch/sparsity) does not vary");
        ThroughputCoeffs coeffs;
        coeffs.form = ThroughputForm::Literal;
        coeffs.c2 = sol.coefficients[0];
        coeffs.c3 = 1.0;
        coeffs.c4 = sol.coefficients[1];
        return finish_report(coeffs, samples);
    }

    if (n < 3) throw DomainError("power fit needs at least 3 samples");
    if (batch_values.size() < 2)
        throw DomainError("power fit needs at least 2 distinct batch sizes (all samples at batch size " +
                          std::to_string(*batch_values.begin()) + ")");
    if (sparsity_values.size() < 2)
        throw DomainError("power fit needs at least 2 distinct sparsities; use the literal form for "
                          "single-sparsity data");
    std::vector<double> design(n * 3);
    for (int i = 0; i < n; ++i) {
        design[i * 3] = std::log(static_cast<double>(samples[i].batch_size));
        design[i * 3 + 1] = -std::log(samples[i].sparsity);
        design[i * 3 + 2] = 1.0;
    }
    auto sol = solve_least_squares(design, n, 3, rhs);
    if (sol.rank < 3)
        throw DomainError("power fit design matrix is rank deficient: batch size and sparsity variation "
                          "are collinear");
    double a = sol.coefficients[0];
    double b = sol.coefficients[1];
    if (a == 0.0) throw DomainError("power fit yields c2 = 0; attenuation coefficient is undefined");
    ThroughputCoeffs coeffs;
    coeffs.form = ThroughputForm::Power;
    coeffs.c2 = a;
    coeffs.c3 = b / a;
    coeffs.c4 = sol.coefficients[2];
    return finish_report(coeffs, samples);
}

double rmse(const ThroughputCoeffs& coeffs, const std::vector<ProfileSample>& samples) {
    if (samples.empty()) throw InputError("rmse over an empty sample list");
    double sq = 0.0;
    for (const auto& s : samples) {
        double residual = predict_throughput(coeffs, s.batch_size, s.sparsity) - s.throughput_qps;
        sq += residual * residual;
    }
    return std::sqrt(sq / static_cast<double>(samples.size()));
}

}  // namespace ftcost
