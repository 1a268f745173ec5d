// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ftcost/errors.hpp"

namespace ftcost {

// Coefficients of the max-batch-size model:
//   max_bs = floor(c0 * (gpu_mem - model_mem) / (seq_len * ((1 - c1) + c1 * sparsity)))
struct BatchCoeffs {
    double c0 = 1.0;  // scaling coefficient, > 0
    double c1 = 0.0;  // MoE coefficient, in [0, 1]

    friend bool operator==(const BatchCoeffs&, const BatchCoeffs&) = default;
};

// Two parameterizations of the throughput model. The literal form pins c3 = 1
// (c3 and c4 share one intercept and are not separately identifiable); the
// power form makes c3 an identifiable sparsity exponent.
enum class ThroughputForm { Literal, Power };

const char* to_string(ThroughputForm form);
ThroughputForm throughput_form_from_string(const std::string& text);

struct ThroughputCoeffs {
    double c2 = 0.0;  // scaling coefficient
    double c3 = 1.0;  // MoE attenuation coefficient
    double c4 = 0.0;  // intercept: throughput at batch size 1, dense
    ThroughputForm form = ThroughputForm::Power;

    friend bool operator==(const ThroughputCoeffs&, const ThroughputCoeffs&) = default;
};

struct GpuSpec {
    std::string name;
    double memory_gib = 0.0;
    std::optional<double> hourly_price_usd;
    std::optional<double> peak_compute_tflops;
    std::optional<double> mem_bandwidth_gbs;

    friend bool operator==(const GpuSpec&, const GpuSpec&) = default;
};

// Throughput coefficients are keyed per (dataset, gpu, form).
using ThroughputKey = std::tuple<std::string, std::string, ThroughputForm>;

struct ModelSpec {
    std::string name;
    std::int64_t param_count = 0;
    double resident_memory_gib = 0.0;  // weights resident on the GPU
    int num_layers = 0;
    int num_moe_layers = 0;
    int num_experts = 0;
    int default_top_k = 0;
    std::optional<BatchCoeffs> batch_coeffs;
    // Reference values quoted elsewhere; kept as metadata, never used for
    // prediction (they do not reproduce observed batch sizes under the
    // GiB/token unit conventions used here).
    std::optional<BatchCoeffs> published_batch_coeffs;
    std::map<ThroughputKey, ThroughputCoeffs> throughput_coeffs;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct DatasetSpec {
    std::string name;
    std::int64_t num_queries = 0;
    int median_seq_len = 0;  // tokens
    std::string task_tag;

    friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

// One measured (batch size, sparsity) -> throughput point.
struct ProfileSample {
    std::string gpu;
    std::string model;
    std::string dataset;
    double sparsity = 1.0;    // in (0, 1]
    int batch_size = 1;       // >= 1
    double throughput_qps = 0.0;

    friend bool operator==(const ProfileSample&, const ProfileSample&) = default;
};

// One measured maximum batch size for a (gpu, model, dataset, sparsity) tuple.
struct BatchObservation {
    std::string gpu;
    std::string model;
    std::string dataset;
    double sparsity = 1.0;
    int observed_max_bs = 0;

    friend bool operator==(const BatchObservation&, const BatchObservation&) = default;
};

struct Catalog {
    std::vector<GpuSpec> gpus;
    std::vector<ModelSpec> models;
    std::vector<DatasetSpec> datasets;
    std::vector<ProfileSample> samples;
    std::vector<BatchObservation> batch_observations;

    const GpuSpec* find_gpu(const std::string& name) const;
    const ModelSpec* find_model(const std::string& name) const;
    const DatasetSpec* find_dataset(const std::string& name) const;
    ModelSpec* find_model(const std::string& name);

    // Throwing lookups; InputError names the missing entity.
    const GpuSpec& gpu(const std::string& name) const;
    const ModelSpec& model(const std::string& name) const;
    const DatasetSpec& dataset(const std::string& name) const;

    friend bool operator==(const Catalog&, const Catalog&) = default;
};

// Loads and validates a catalog JSON file. Errors carry the file name plus a
// line/field location; dangling cross-references name the missing entity.
Catalog load_catalog(const std::string& path);
Catalog parse_catalog(const std::string& text, const std::string& origin);

void save_catalog(const Catalog& catalog, const std::string& path);
std::string catalog_to_json(const Catalog& catalog);

// Profile samples as CSV with the exact header
// gpu,model,dataset,sparsity,batch_size,throughput_qps
std::vector<ProfileSample> load_samples_csv(const std::string& path);
std::vector<ProfileSample> parse_samples_csv(const std::string& text, const std::string& origin);
std::string samples_to_csv(const std::vector<ProfileSample>& samples);

extern const char* const kSamplesCsvHeader;

// Fraction of experts active per token: active_k / num_experts. Dense is 1.0.
double sparsity_of(const ModelSpec& model, int active_k);

}  // namespace ftcost
