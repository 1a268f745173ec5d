// SPDX-License-Identifier: Apache-2.0
#include "ftcost/synth_workload.hpp"

#include <cmath>
#include <limits>

#include "ftcost/rng.hpp"

namespace ftcost {

namespace {

void check_params(const RooflineParams& p) {
    if (!(p.peak_compute_tflops > 0.0)) throw InputError("peak_compute_tflops must be > 0");
    if (!(p.mem_bandwidth_gbs > 0.0)) throw InputError("mem_bandwidth_gbs must be > 0");
    if (!(p.weight_bytes > 0.0)) throw InputError("weight_bytes must be > 0");
    if (!(p.flops_per_token > 0.0)) throw InputError("flops_per_token must be > 0");
    if (!(p.activation_bytes_per_token > 0.0)) throw InputError("activation_bytes_per_token must be > 0");
    if (p.seq_len < 1) throw InputError("seq_len must be >= 1");
    if (!(p.moe_flop_fraction >= 0.0 && p.moe_flop_fraction <= 1.0))
        throw InputError("moe_flop_fraction must be in [0, 1]");
    if (p.fixed_overhead_s < 0.0) throw InputError("fixed_overhead_s must be >= 0");
}

// Compute seconds per query: seq_len * flops * sparsity adjustment / peak.
double compute_time_per_query(const RooflineParams& p, double sparsity) {
    double active_fraction = 1.0 - p.moe_flop_fraction * (1.0 - sparsity);
    return static_cast<double>(p.seq_len) * p.flops_per_token * active_fraction /
           (p.peak_compute_tflops * 1e12);
}

double memory_time(const RooflineParams& p, int batch_size) {
    double bytes = p.weight_bytes +
                   static_cast<double>(batch_size) * static_cast<double>(p.seq_len) *
                       p.activation_bytes_per_token;
    return bytes / (p.mem_bandwidth_gbs * 1e9);
}

}  // namespace

double simulate_throughput(const RooflineParams& params, int batch_size, double sparsity) {
    check_params(params);
    if (batch_size < 1) throw InputError("batch_size must be >= 1");
    if (!(sparsity > 0.0 && sparsity <= 1.0)) throw InputError("sparsity must be in (0, 1]");
    double t_compute = static_cast<double>(batch_size) * compute_time_per_query(params, sparsity);
    double t_memory = memory_time(params, batch_size);
    double step = std::max(t_compute, t_memory) + params.fixed_overhead_s;
    return static_cast<double>(batch_size) / step;
}

double crossover_batch(const RooflineParams& params, double sparsity) {
    check_params(params);
    if (!(sparsity > 0.0 && sparsity <= 1.0)) throw InputError("sparsity must be in (0, 1]");
    double per_query_compute = compute_time_per_query(params, sparsity);
    double per_query_activation = static_cast<double>(params.seq_len) * params.activation_bytes_per_token /
                                  (params.mem_bandwidth_gbs * 1e9);
    // b * compute = (weights + b * activation) / bandwidth
    double slope = per_query_compute - per_query_activation;
    if (slope <= 0.0) return std::numeric_limits<double>::infinity();
    return params.weight_bytes / (params.mem_bandwidth_gbs * 1e9) / slope;
}

std::vector<ProfileSample> generate_samples(const RooflineParams& params,
                                            const std::vector<int>& batch_grid,
                                            const std::vector<double>& sparsity_grid,
                                            double noise_sigma, std::uint64_t seed,
                                            const SampleLabels& labels) {
    if (batch_grid.empty() || sparsity_grid.empty()) throw InputError("batch and sparsity grids must be nonempty");
    if (noise_sigma < 0.0) throw InputError("noise_sigma must be >= 0");
    GaussianSampler noise(seed);
    std::vector<ProfileSample> samples;
    samples.reserve(batch_grid.size() * sparsity_grid.size());
    for (int batch : batch_grid) {
        for (double sparsity : sparsity_grid) {
            double qps = simulate_throughput(params, batch, sparsity);
            if (noise_sigma > 0.0) qps *= std::exp(noise_sigma * noise.next());
            ProfileSample s;
            s.gpu = labels.gpu;
            s.model = labels.model;
            s.dataset = labels.dataset;
            s.sparsity = sparsity;
            s.batch_size = batch;
            s.throughput_qps = qps;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

StageBreakdown stage_breakdown(const StageShares& shares, double total_step_s) {
    if (!(total_step_s > 0.0)) throw InputError("total_step_s must be > 0");
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(shares.forward) || !in_unit(shares.backward) || !in_unit(shares.optimizer))
        throw InputError("stage shares must be in [0, 1]");
    if (std::abs(shares.forward + shares.backward + shares.optimizer - 1.0) > 1e-9)
        throw InputError("stage shares must sum to 1");
    if (!in_unit(shares.moe_layer_share)) throw InputError("moe_layer_share must be in [0, 1]");
    if (shares.full_fine_tuning && shares.backward < shares.forward)
        throw InputError("full fine-tuning requires backward share >= forward share");

    StageBreakdown b;
    b.forward_s = shares.forward * total_step_s;
    b.backward_s = shares.backward * total_step_s;
    b.optimizer_s = shares.optimizer * total_step_s;
    double fwd_bwd = b.forward_s + b.backward_s;
    b.moe_layer_s = shares.moe_layer_share * fwd_bwd;
    b.other_layers_s = fwd_bwd - b.moe_layer_s;
    b.total_s = total_step_s;
    return b;
}

}  // namespace ftcost
