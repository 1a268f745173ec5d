// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "ftcost/errors.hpp"

namespace ftcost {

struct RouterInput {
    std::vector<std::vector<double>> logits;  // num_tokens x num_experts
    int top_k = 1;
};

struct TokenAssignment {
    std::vector<int> experts;     // the k chosen expert indices, descending score
    std::vector<double> weights;  // softmax probabilities of the chosen experts
};

struct ExpertLoad {
    std::vector<std::int64_t> counts;  // assignments per expert; sums to tokens * k
    std::vector<double> shares_pct;    // percent of total assignments; sums to 100
    double variance_pct = 0.0;         // population variance of shares_pct
    double imbalance_factor = 1.0;     // max count / mean count, >= 1
};

struct LoadDelta {
    double variance_delta = 0.0;       // after - before
    std::vector<double> share_deltas;  // per-expert, after - before
    int dominant_expert = 0;           // max-share expert of the after load
};

// Top-k gating: per token, softmax over the logits row, then the k largest
// probabilities win; ties break toward the lower expert index. Selection runs
// on raw logits (softmax is order-preserving); the probabilities are emitted
// as routing weights.
std::vector<TokenAssignment> route_topk(const RouterInput& input);

ExpertLoad expert_load(const std::vector<TokenAssignment>& assignments, int num_experts);

LoadDelta compare_loads(const ExpertLoad& before, const ExpertLoad& after);

}  // namespace ftcost
