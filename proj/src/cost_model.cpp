// SPDX-License-Identifier: Apache-2.0
#include "ftcost/cost_model.hpp"

#include <algorithm>

#include "ftcost/batch_model.hpp"
#include "ftcost/throughput_model.hpp"

namespace ftcost {

namespace {

const ThroughputCoeffs* find_throughput_coeffs(const ModelSpec& model, const std::string& dataset,
                                               const std::string& gpu) {
    auto power = model.throughput_coeffs.find({dataset, gpu, ThroughputForm::Power});
    if (power != model.throughput_coeffs.end()) return &power->second;
    auto literal = model.throughput_coeffs.find({dataset, gpu, ThroughputForm::Literal});
    if (literal != model.throughput_coeffs.end()) return &literal->second;
    return nullptr;
}

}  // namespace

CostEstimate estimate_cost(const Catalog& catalog, const CostQuery& query) {
    if (query.epochs < 1) throw InputError("epochs must be >= 1");
    if (!(query.sparsity > 0.0 && query.sparsity <= 1.0)) throw InputError("sparsity must be in (0, 1]");
    const ModelSpec& model = catalog.model(query.model);
    const DatasetSpec& dataset = catalog.dataset(query.dataset);
    const GpuSpec& gpu = catalog.gpu(query.gpu);

    if (!model.batch_coeffs)
        throw DomainError("model \"" + model.name + "\" has no calibrated batch coefficients");
    const ThroughputCoeffs* tc = find_throughput_coeffs(model, dataset.name, gpu.name);
    if (!tc)
        throw DomainError("model \"" + model.name + "\" has no throughput coefficients for (dataset \"" +
                          dataset.name + "\", gpu \"" + gpu.name + "\")");
    if (!gpu.hourly_price_usd) throw DomainError("gpu \"" + gpu.name + "\" has no hourly price");

    std::int64_t queries = query.override_queries.value_or(dataset.num_queries);
    if (queries < 1) throw InputError("query count must be >= 1");
    int seq_len = query.override_seq_len.value_or(dataset.median_seq_len);

    CostEstimate est;
    est.max_batch_size = predict_max_batch(*model.batch_coeffs, gpu.memory_gib,
                                           model.resident_memory_gib, seq_len, query.sparsity);
    if (est.max_batch_size < 1)
        throw DomainError("model \"" + model.name + "\" does not fit on gpu \"" + gpu.name +
                          "\" (predicted maximum batch size is 0)");
    est.throughput_qps = predict_throughput(*tc, est.max_batch_size, query.sparsity);
    if (!(est.throughput_qps > 0.0))
        throw DomainError("predicted throughput is not positive for (model \"" + model.name +
                          "\", dataset \"" + dataset.name + "\", gpu \"" + gpu.name +
                          "\"); coefficients are out of their valid range");
    double query_epochs = static_cast<double>(queries) * static_cast<double>(query.epochs);
    est.wall_seconds = query_epochs / est.throughput_qps;
    est.hourly_price_usd = *gpu.hourly_price_usd;
    est.total_usd = est.wall_seconds / 3600.0 * est.hourly_price_usd;
    return est;
}

std::vector<std::pair<std::string, CostEstimate>> compare_gpus(const Catalog& catalog,
                                                               const CostQuery& query_template,
                                                               const std::vector<std::string>& gpus) {
    if (gpus.empty()) throw InputError("no GPUs to compare");
    std::vector<std::pair<std::string, CostEstimate>> ranked;
    ranked.reserve(gpus.size());
    for (const std::string& name : gpus) {
        CostQuery q = query_template;
        q.gpu = name;
        try {
            ranked.emplace_back(name, estimate_cost(catalog, q));
        } catch (const DomainError& e) {
            throw DomainError("gpu \"" + name + "\": " + e.what());
        } catch (const InputError& e) {
            throw InputError("gpu \"" + name + "\": " + e.what());
        }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& lhs, const auto& rhs) {
        if (lhs.second.total_usd != rhs.second.total_usd) return lhs.second.total_usd < rhs.second.total_usd;
        if (lhs.second.wall_seconds != rhs.second.wall_seconds)
            return lhs.second.wall_seconds < rhs.second.wall_seconds;
        return lhs.first < rhs.first;
    });
    return ranked;
}

CostEstimate scale_by_dataset(const CostEstimate& estimate, std::int64_t original_queries,
                              std::int64_t new_queries) {
    if (original_queries < 1 || new_queries < 1) throw InputError("query counts must be >= 1");
    double factor = static_cast<double>(new_queries) / static_cast<double>(original_queries);
    CostEstimate scaled = estimate;
    scaled.wall_seconds = estimate.wall_seconds * factor;
    scaled.total_usd = estimate.total_usd * factor;
    return scaled;
}

}  // namespace ftcost
