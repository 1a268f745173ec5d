// SPDX-License-Identifier: Apache-2.0
#include "ftcost/router_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ftcost {

std::vector<TokenAssignment> route_topk(const RouterInput& input) {
    if (input.logits.empty()) throw InputError("router input has no tokens");
    int num_experts = static_cast<int>(input.logits.front().size());
    if (num_experts < 1) throw InputError("router input has no experts");
    if (input.top_k < 1 || input.top_k > num_experts)
        throw InputError("top_k = " + std::to_string(input.top_k) + " out of range [1, " +
                         std::to_string(num_experts) + "]");

    std::vector<TokenAssignment> assignments;
    assignments.reserve(input.logits.size());
    std::vector<int> order(num_experts);
    std::vector<double> probs(num_experts);

    for (std::size_t t = 0; t < input.logits.size(); ++t) {
        const auto& row = input.logits[t];
        if (static_cast<int>(row.size()) != num_experts)
            throw InputError("logits row " + std::to_string(t) + " has " + std::to_string(row.size()) +
                             " entries, expected " + std::to_string(num_experts));
        for (double v : row) {
            if (!std::isfinite(v))
                throw InputError("non-finite logit in row " + std::to_string(t));
        }

        // Numerically stable softmax; used for the routing weights only.
        double max_logit = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (int e = 0; e < num_experts; ++e) {
            probs[e] = std::exp(row[e] - max_logit);
            sum += probs[e];
        }
        for (int e = 0; e < num_experts; ++e) probs[e] /= sum;

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) { return row[lhs] > row[rhs]; });

        TokenAssignment a;
        a.experts.assign(order.begin(), order.begin() + input.top_k);
        a.weights.reserve(input.top_k);
        for (int e : a.experts) a.weights.push_back(probs[e]);
        assignments.push_back(std::move(a));
    }
    return assignments;
}

ExpertLoad expert_load(const std::vector<TokenAssignment>& assignments, int num_experts) {
    if (num_experts < 1) throw InputError("num_experts must be >= 1");
    if (assignments.empty()) throw InputError("no assignments");
    ExpertLoad load;
    load.counts.assign(num_experts, 0);
    for (const auto& a : assignments) {
        for (int e : a.experts) {
            if (e < 0 || e >= num_experts)
                throw InputError("expert index " + std::to_string(e) + " out of range [0, " +
                                 std::to_string(num_experts - 1) + "]");
            ++load.counts[e];
        }
    }
    std::int64_t total = std::accumulate(load.counts.begin(), load.counts.end(), std::int64_t{0});

    load.shares_pct.resize(num_experts);
    double mean_share = 100.0 / static_cast<double>(num_experts);
    double var = 0.0;
    std::int64_t max_count = 0;
    for (int e = 0; e < num_experts; ++e) {
        load.shares_pct[e] = 100.0 * static_cast<double>(load.counts[e]) / static_cast<double>(total);
        double dev = load.shares_pct[e] - mean_share;
        var += dev * dev;
        max_count = std::max(max_count, load.counts[e]);
    }
    load.variance_pct = var / static_cast<double>(num_experts);
    double mean_count = static_cast<double>(total) / static_cast<double>(num_experts);
    load.imbalance_factor = static_cast<double>(max_count) / mean_count;
    return load;
}

LoadDelta compare_loads(const ExpertLoad& before, const ExpertLoad& after) {
    if (before.counts.size() != after.counts.size())
        throw InputError("expert count mismatch: " + std::to_string(before.counts.size()) + " vs " +
                         std::to_string(after.counts.size()));
    LoadDelta delta;
    delta.variance_delta = after.variance_pct - before.variance_pct;
    delta.share_deltas.resize(after.shares_pct.size());
    for (std::size_t e = 0; e < after.shares_pct.size(); ++e)
        delta.share_deltas[e] = after.shares_pct[e] - before.shares_pct[e];
    delta.dominant_expert = static_cast<int>(
        std::max_element(after.shares_pct.begin(), after.shares_pct.end()) - after.shares_pct.begin());
    return delta;
}

}  // namespace ftcost
