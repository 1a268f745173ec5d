// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftcost/catalog.hpp"

namespace ftcost {

// Inputs of the roofline generator. Rates use the catalog's units
// (TFLOP/s, GB/s); byte and FLOP counts are plain units.
struct RooflineParams {
    double peak_compute_tflops = 0.0;
    double mem_bandwidth_gbs = 0.0;
    double weight_bytes = 0.0;              // weights streamed per step
    double flops_per_token = 0.0;           // dense-model FLOPs per token per step
    double activation_bytes_per_token = 0.0;
    int seq_len = 1;                        // tokens per query
    double moe_flop_fraction = 0.0;         // fraction of FLOPs inside MoE experts, [0, 1]
    double fixed_overhead_s = 0.0;
};

struct StageShares {
    double forward = 0.0;
    double backward = 0.0;
    double optimizer = 0.0;
    double moe_layer_share = 0.0;   // fraction of forward+backward spent in MoE layers
    bool full_fine_tuning = false;  // when set, backward >= forward is required
};

struct StageBreakdown {
    double forward_s = 0.0;
    double backward_s = 0.0;
    double optimizer_s = 0.0;
    double moe_layer_s = 0.0;     // MoE share of forward+backward
    double other_layers_s = 0.0;  // remainder of forward+backward
    double total_s = 0.0;
};

// Roofline step time: max(compute, memory) + fixed overhead, where sparsity
// scales only the MoE fraction of the FLOPs. Returns queries/second.
//   t_compute = batch * seq_len * flops_per_token * (1 - moe_flop_fraction * (1 - sparsity)) / peak
//   t_memory  = (weight_bytes + batch * seq_len * activation_bytes_per_token) / bandwidth
double simulate_throughput(const RooflineParams& params, int batch_size, double sparsity);

// Batch size where compute time overtakes memory time; +infinity when the
// workload never becomes compute-bound.
double crossover_batch(const RooflineParams& params, double sparsity);

struct SampleLabels {
    std::string gpu = "synth-gpu";
    std::string model = "synth-model";
    std::string dataset = "synth-data";
};

// Pointwise simulate_throughput over the (batch, sparsity) grid, batch-major,
// with multiplicative log-normal noise exp(N(0, sigma)) from a seeded
// deterministic generator. sigma = 0 reproduces the noiseless curve exactly.
std::vector<ProfileSample> generate_samples(const RooflineParams& params,
                                            const std::vector<int>& batch_grid,
                                            const std::vector<double>& sparsity_grid,
                                            double noise_sigma, std::uint64_t seed,
                                            const SampleLabels& labels = {});

// Splits a step into stage times and a coarse per-layer table; rows sum to
// the step total.
StageBreakdown stage_breakdown(const StageShares& shares, double total_step_s);

}  // namespace ftcost
