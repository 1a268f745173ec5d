// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftcost/catalog.hpp"

namespace ftcost {

struct CostQuery {
    std::string model;
    std::string dataset;
    std::string gpu;
    double sparsity = 1.0;
    int epochs = 1;
    std::optional<std::int64_t> override_queries;  // replaces the dataset's num_queries
    std::optional<int> override_seq_len;           // replaces the dataset's median_seq_len
};

struct CostEstimate {
    int max_batch_size = 0;
    double throughput_qps = 0.0;
    double wall_seconds = 0.0;
    double total_usd = 0.0;
    double hourly_price_usd = 0.0;

    friend bool operator==(const CostEstimate&, const CostEstimate&) = default;
};

// Composes the batch and throughput models with the price catalog:
// max batch size at the dataset's median sequence length, throughput at that
// batch size, then wall_seconds = queries * epochs / throughput and
// total_usd = wall_seconds / 3600 * hourly price.
// Requires calibrated batch coefficients on the model and throughput
// coefficients for the (dataset, gpu) pair; the power form is preferred when
// both forms are stored.
CostEstimate estimate_cost(const Catalog& catalog, const CostQuery& query);

// estimate_cost per GPU, sorted ascending by total cost; ties break by wall
// time, then name. The gpu field of the template query is ignored.
std::vector<std::pair<std::string, CostEstimate>> compare_gpus(const Catalog& catalog,
                                                               const CostQuery& query_template,
                                                               const std::vector<std::string>& gpus);

// Rescales wall time and cost linearly in the query count; batch size and
// throughput are workload-independent and stay fixed.
CostEstimate scale_by_dataset(const CostEstimate& estimate, std::int64_t original_queries,
                              std::int64_t new_queries);

}  // namespace ftcost
