// SPDX-License-Identifier: Apache-2.0
#include "ftcost/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ftcost {

using nlohmann::json;

const char* const kSamplesCsvHeader = "gpu,model,dataset,sparsity,batch_size,throughput_qps";

const char* to_string(ThroughputForm form) {
    return form == ThroughputForm::Literal ? "literal" : "power";
}

ThroughputForm throughput_form_from_string(const std::string& text) {
    if (text == "literal") return ThroughputForm::Literal;
    if (text == "power") return ThroughputForm::Power;
    throw InputError("unknown throughput form '" + text + "' (expected 'literal' or 'power')");
}

namespace {

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
    throw InputError(ctx + ": " + msg);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) fail(ctx, "unknown key \"" + it.key() + "\"");
    }
}

const json* find_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& require_field(const json& obj, const char* key, const std::string& ctx) {
    const json* f = find_field(obj, key);
    if (!f) fail(ctx, std::string("missing field \"") + key + "\"");
    return *f;
}

std::string get_string(const json& obj, const char* key, const std::string& ctx) {
    const json& f = require_field(obj, key, ctx);
    if (!f.is_string()) fail(ctx + "." + key, "expected a string");
    return f.get<std::string>();
}

double get_real(const json& f, const std::string& ctx) {
    if (!f.is_number()) fail(ctx, "expected a number");
    return f.get<double>();
}

double get_real(const json& obj, const char* key, const std::string& ctx) {
    return get_real(require_field(obj, key, ctx), ctx + "." + key);
}

std::int64_t get_int(const json& obj, const char* key, const std::string& ctx) {
    const json& f = require_field(obj, key, ctx);
    if (!f.is_number_integer()) fail(ctx + "." + key, "expected an integer");
    return f.get<std::int64_t>();
}

int get_int32(const json& obj, const char* key, const std::string& ctx) {
    std::int64_t v = get_int(obj, key, ctx);
    if (v < INT32_MIN || v > INT32_MAX) fail(ctx + "." + key, "out of range");
    return static_cast<int>(v);
}

std::optional<double> get_optional_positive(const json& obj, const char* key, const std::string& ctx) {
    const json* f = find_field(obj, key);
    if (!f) return std::nullopt;
    double v = get_real(*f, ctx + "." + key);
    if (!(v > 0.0)) fail(ctx + "." + key, "must be > 0");
    return v;
}

BatchCoeffs parse_batch_coeffs(const json& obj, const std::string& ctx) {
    if (!obj.is_object()) fail(ctx, "expected an object");
    check_keys(obj, {"c0", "c1"}, ctx);
    BatchCoeffs c;
    c.c0 = get_real(obj, "c0", ctx);
    c.c1 = get_real(obj, "c1", ctx);
    if (!(c.c0 > 0.0)) fail(ctx + ".c0", "must be > 0");
    if (!(c.c1 >= 0.0 && c.c1 <= 1.0)) fail(ctx + ".c1", "must be in [0, 1]");
    return c;
}

GpuSpec parse_gpu(const json& obj, const std::string& ctx) {
    if (!obj.is_object()) fail(ctx, "expected an object");
    check_keys(obj, {"name", "memory_gib", "hourly_price_usd", "peak_compute_tflops", "mem_bandwidth_gbs"}, ctx);
    GpuSpec g;
    g.name = get_string(obj, "name", ctx);
    g.memory_gib = get_real(obj, "memory_gib", ctx);
    if (!(g.memory_gib > 0.0)) fail(ctx + ".memory_gib", "must be > 0");
    g.hourly_price_usd = get_optional_positive(obj, "hourly_price_usd", ctx);
    g.peak_compute_tflops = get_optional_positive(obj, "peak_compute_tflops", ctx);
    g.mem_bandwidth_gbs = get_optional_positive(obj, "mem_bandwidth_gbs", ctx);
    return g;
}

ModelSpec parse_model(const json& obj, const std::string& ctx) {
    if (!obj.is_object()) fail(ctx, "expected an object");
    check_keys(obj,
               {"name", "param_count", "resident_memory_gib", "num_layers", "num_moe_layers", "num_experts",
                "default_top_k", "batch_coeffs", "published_batch_coeffs", "throughput_coeffs"},
               ctx);
    ModelSpec m;
    m.name = get_string(obj, "name", ctx);
    m.param_count = get_int(obj, "param_count", ctx);
    m.resident_memory_gib = get_real(obj, "resident_memory_gib", ctx);
    m.num_layers = get_int32(obj, "num_layers", ctx);
    m.num_moe_layers = get_int32(obj, "num_moe_layers", ctx);
    m.num_experts = get_int32(obj, "num_experts", ctx);
    m.default_top_k = get_int32(obj, "default_top_k", ctx);
    if (!(m.resident_memory_gib > 0.0)) fail(ctx + ".resident_memory_gib", "must be > 0");
    if (m.param_count < 0) fail(ctx + ".param_count", "must be >= 0");
    if (m.num_layers < 0) fail(ctx + ".num_layers", "must be >= 0");
    if (m.num_moe_layers < 0 || m.num_moe_layers > m.num_layers)
        fail(ctx + ".num_moe_layers", "must be in [0, num_layers]");
    if (m.num_experts < 1) fail(ctx + ".num_experts", "must be >= 1");
    if (m.default_top_k < 1 || m.default_top_k > m.num_experts)
        fail(ctx + ".default_top_k", "must be in [1, num_experts]");
    if (const json* f = find_field(obj, "batch_coeffs"))
        m.batch_coeffs = parse_batch_coeffs(*f, ctx + ".batch_coeffs");
    if (const json* f = find_field(obj, "published_batch_coeffs"))
        m.published_batch_coeffs = parse_batch_coeffs(*f, ctx + ".published_batch_coeffs");
    if (const json* f = find_field(obj, "throughput_coeffs")) {
        if (!f->is_array()) fail(ctx + ".throughput_coeffs", "expected an array");
        for (std::size_t i = 0; i < f->size(); ++i) {
            const json& e = (*f)[i];
            std::string ectx = ctx + ".throughput_coeffs[" + std::to_string(i) + "]";
            if (!e.is_object()) fail(ectx, "expected an object");
            check_keys(e, {"dataset", "gpu", "form", "c2", "c3", "c4"}, ectx);
            ThroughputCoeffs tc;
            std::string dataset = get_string(e, "dataset", ectx);
            std::string gpu = get_string(e, "gpu", ectx);
            tc.form = throughput_form_from_string(get_string(e, "form", ectx));
            tc.c2 = get_real(e, "c2", ectx);
            tc.c3 = get_real(e, "c3", ectx);
            tc.c4 = get_real(e, "c4", ectx);
            if (!(tc.c3 > 0.0)) fail(ectx + ".c3", "must be > 0");
            ThroughputKey key{dataset, gpu, tc.form};
            if (m.throughput_coeffs.count(key))
                fail(ectx, "duplicate (dataset, gpu, form) entry for (" + dataset + ", " + gpu + ", " +
                               to_string(tc.form) + ")");
            m.throughput_coeffs.emplace(std::move(key), tc);
        }
    }
    return m;
}

DatasetSpec parse_dataset(const json& obj, const std::string& ctx) {
    if (!obj.is_object()) fail(ctx, "expected an object");
    check_keys(obj, {"name", "num_queries", "median_seq_len", "task_tag"}, ctx);
    DatasetSpec d;
    d.name = get_string(obj, "name", ctx);
    d.num_queries = get_int(obj, "num_queries", ctx);
    d.median_seq_len = get_int32(obj, "median_seq_len", ctx);
    d.task_tag = get_string(obj, "task_tag", ctx);
    if (d.num_queries < 1) fail(ctx + ".num_queries", "must be >= 1");
    if (d.median_seq_len < 1) fail(ctx + ".median_seq_len", "must be >= 1");
    return d;
}

void check_sparsity(double s, const std::string& ctx) {
    if (!(s > 0.0 && s <= 1.0)) fail(ctx, "sparsity must be in (0, 1]");
}

ProfileSample parse_sample(const json& obj, const std::string& ctx) {
    if (!obj.is_object()) fail(ctx, "expected an object");
    check_keys(obj, {"gpu", "model", "dataset", "sparsity", "batch_size", "throughput_qps"}, ctx);
    ProfileSample s;
    s.gpu = get_string(obj, "gpu", ctx);
    s.model = get_string(obj, "model", ctx);
    s.dataset = get_string(obj, "dataset", ctx);
    s.sparsity = get_real(obj, "sparsity", ctx);
    s.batch_size = get_int32(obj, "batch_size", ctx);
    s.throughput_qps = get_real(obj, "throughput_qps", ctx);
    check_sparsity(s.sparsity, ctx + ".sparsity");
    if (s.batch_size < 1) fail(ctx + ".batch_size", "must be >= 1");
    if (!(s.throughput_qps > 0.0)) fail(ctx + ".throughput_qps", "must be > 0");
    return s;
}

BatchObservation parse_observation(const json& obj, const std::string& ctx) {
    if (!obj.is_object()) fail(ctx, "expected an object");
    check_keys(obj, {"gpu", "model", "dataset", "sparsity", "observed_max_bs"}, ctx);
    BatchObservation o;
    o.gpu = get_string(obj, "gpu", ctx);
    o.model = get_string(obj, "model", ctx);
    o.dataset = get_string(obj, "dataset", ctx);
    o.sparsity = get_real(obj, "sparsity", ctx);
    o.observed_max_bs = get_int32(obj, "observed_max_bs", ctx);
    check_sparsity(o.sparsity, ctx + ".sparsity");
    if (o.observed_max_bs < 0) fail(ctx + ".observed_max_bs", "must be >= 0");
    return o;
}

template <typename T, typename F>
std::vector<T> parse_section(const json& root, const char* key, const std::string& origin, F parse_one) {
    std::vector<T> out;
    const json* section = find_field(root, key);
    if (!section) return out;  // missing section reads as empty
    if (!section->is_array()) fail(origin + ": " + key, "expected an array");
    out.reserve(section->size());
    for (std::size_t i = 0; i < section->size(); ++i)
        out.push_back(parse_one((*section)[i], origin + ": " + key + "[" + std::to_string(i) + "]"));
    return out;
}

template <typename T>
void check_unique_names(const std::vector<T>& items, const char* section, const std::string& origin) {
    std::set<std::string> seen;
    for (const T& item : items) {
        if (!seen.insert(item.name).second)
            fail(origin + ": " + section, "duplicate name \"" + item.name + "\"");
    }
}

void check_reference(const Catalog& cat, const std::string& gpu, const std::string& model,
                     const std::string& dataset, const std::string& ctx) {
    if (!cat.find_gpu(gpu)) fail(ctx, "references unknown gpu \"" + gpu + "\"");
    if (!cat.find_model(model)) fail(ctx, "references unknown model \"" + model + "\"");
    if (!cat.find_dataset(dataset)) fail(ctx, "references unknown dataset \"" + dataset + "\"");
}

std::string locate(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json coeffs_to_json(const BatchCoeffs& c) {
    return json{{"c0", c.c0}, {"c1", c.c1}};
}

}  // namespace

const GpuSpec* Catalog::find_gpu(const std::string& name) const {
    for (const auto& g : gpus)
        if (g.name == name) return &g;
    return nullptr;
}

const ModelSpec* Catalog::find_model(const std::string& name) const {
    for (const auto& m : models)
        if (m.name == name) return &m;
    return nullptr;
}

ModelSpec* Catalog::find_model(const std::string& name) {
    for (auto& m : models)
        if (m.name == name) return &m;
    return nullptr;
}

const DatasetSpec* Catalog::find_dataset(const std::string& name) const {
    for (const auto& d : datasets)
        if (d.name == name) return &d;
    return nullptr;
}

const GpuSpec& Catalog::gpu(const std::string& name) const {
    const GpuSpec* g = find_gpu(name);
    if (!g) throw InputError("unknown gpu \"" + name + "\"");
    return *g;
}

const ModelSpec& Catalog::model(const std::string& name) const {
    const ModelSpec* m = find_model(name);
    if (!m) throw InputError("unknown model \"" + name + "\"");
    return *m;
}

const DatasetSpec& Catalog::dataset(const std::string& name) const {
    const DatasetSpec* d = find_dataset(name);
    if (!d) throw InputError("unknown dataset \"" + name + "\"");
    return *d;
}

Catalog parse_catalog(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(origin + ": JSON parse error at " + locate(text, e.byte) + ": " + e.what());
    }
    if (!root.is_object()) fail(origin, "top level must be an object");
    check_keys(root, {"gpus", "models", "datasets", "samples", "batch_observations"}, origin);

    Catalog cat;
    cat.gpus = parse_section<GpuSpec>(root, "gpus", origin, parse_gpu);
    cat.models = parse_section<ModelSpec>(root, "models", origin, parse_model);
    cat.datasets = parse_section<DatasetSpec>(root, "datasets", origin, parse_dataset);
    cat.samples = parse_section<ProfileSample>(root, "samples", origin, parse_sample);
    cat.batch_observations = parse_section<BatchObservation>(root, "batch_observations", origin, parse_observation);

    check_unique_names(cat.gpus, "gpus", origin);
    check_unique_names(cat.models, "models", origin);
    check_unique_names(cat.datasets, "datasets", origin);

    for (std::size_t i = 0; i < cat.samples.size(); ++i) {
        const auto& s = cat.samples[i];
        check_reference(cat, s.gpu, s.model, s.dataset, origin + ": samples[" + std::to_string(i) + "]");
    }
    for (std::size_t i = 0; i < cat.batch_observations.size(); ++i) {
        const auto& o = cat.batch_observations[i];
        check_reference(cat, o.gpu, o.model, o.dataset, origin + ": batch_observations[" + std::to_string(i) + "]");
    }
    for (const auto& m : cat.models) {
        for (const auto& [key, tc] : m.throughput_coeffs) {
            const auto& [dataset, gpu, form] = key;
            std::string ctx = origin + ": model \"" + m.name + "\" throughput_coeffs";
            if (!cat.find_dataset(dataset)) fail(ctx, "references unknown dataset \"" + dataset + "\"");
            if (!cat.find_gpu(gpu)) fail(ctx, "references unknown gpu \"" + gpu + "\"");
        }
    }
    return cat;
}

Catalog load_catalog(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open catalog file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_catalog(buf.str(), path);
}

std::string catalog_to_json(const Catalog& catalog) {
    json root;
    root["gpus"] = json::array();
    for (const auto& g : catalog.gpus) {
        json o{{"name", g.name}, {"memory_gib", g.memory_gib}};
        if (g.hourly_price_usd) o["hourly_price_usd"] = *g.hourly_price_usd;
        if (g.peak_compute_tflops) o["peak_compute_tflops"] = *g.peak_compute_tflops;
        if (g.mem_bandwidth_gbs) o["mem_bandwidth_gbs"] = *g.mem_bandwidth_gbs;
        root["gpus"].push_back(std::move(o));
    }
    root["models"] = json::array();
    for (const auto& m : catalog.models) {
        json o{{"name", m.name},
               {"param_count", m.param_count},
               {"resident_memory_gib", m.resident_memory_gib},
               {"num_layers", m.num_layers},
               {"num_moe_layers", m.num_moe_layers},
               {"num_experts", m.num_experts},
               {"default_top_k", m.default_top_k}};
        if (m.batch_coeffs) o["batch_coeffs"] = coeffs_to_json(*m.batch_coeffs);
        if (m.published_batch_coeffs) o["published_batch_coeffs"] = coeffs_to_json(*m.published_batch_coeffs);
        if (!m.throughput_coeffs.empty()) {
            json arr = json::array();
            for (const auto& [key, tc] : m.throughput_coeffs) {
                const auto& [dataset, gpu, form] = key;
                arr.push_back(json{{"dataset", dataset},
                                   {"gpu", gpu},
                                   {"form", to_string(form)},
                                   {"c2", tc.c2},
                                   {"c3", tc.c3},
                                   {"c4", tc.c4}});
            }
            o["throughput_coeffs"] = std::move(arr);
        }
        root["models"].push_back(std::move(o));
    }
    root["datasets"] = json::array();
    for (const auto& d : catalog.datasets) {
        root["datasets"].push_back(json{{"name", d.name},
                                        {"num_queries", d.num_queries},
                                        {"median_seq_len", d.median_seq_len},
                                        {"task_tag", d.task_tag}});
    }
    root["samples"] = json::array();
    for (const auto& s : catalog.samples) {
        root["samples"].push_back(json{{"gpu", s.gpu},
                                       {"model", s.model},
                                       {"dataset", s.dataset},
                                       {"sparsity", s.sparsity},
                                       {"batch_size", s.batch_size},
                                       {"throughput_qps", s.throughput_qps}});
    }
    root["batch_observations"] = json::array();
    for (const auto& o : catalog.batch_observations) {
        root["batch_observations"].push_back(json{{"gpu", o.gpu},
                                                  {"model", o.model},
                                                  {"dataset", o.dataset},
                                                  {"sparsity", o.sparsity},
                                                  {"observed_max_bs", o.observed_max_bs}});
    }
    return root.dump(2) + "\n";
}

void save_catalog(const Catalog& catalog, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write catalog file \"" + path + "\"");
    out << catalog_to_json(catalog);
    if (!out) throw InputError("write to \"" + path + "\" failed");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_csv_real(const std::string& field, const std::string& ctx) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        fail(ctx, "\"" + field + "\" is not a number");
    return v;
}

int parse_csv_int(const std::string& field, const std::string& ctx) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        fail(ctx, "\"" + field + "\" is not an integer");
    return v;
}

}  // namespace

std::vector<ProfileSample> parse_samples_csv(const std::string& text, const std::string& origin) {
    std::vector<ProfileSample> samples;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string ctx = origin + ": line " + std::to_string(line_no);
        if (line_no == 1) {
            if (line != kSamplesCsvHeader)
                fail(ctx, "expected header \"" + std::string(kSamplesCsvHeader) + "\", got \"" + line + "\"");
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 6) fail(ctx, "expected 6 fields, got " + std::to_string(fields.size()));
        ProfileSample s;
        s.gpu = fields[0];
        s.model = fields[1];
        s.dataset = fields[2];
        s.sparsity = parse_csv_real(fields[3], ctx + " (sparsity)");
        s.batch_size = parse_csv_int(fields[4], ctx + " (batch_size)");
        s.throughput_qps = parse_csv_real(fields[5], ctx + " (throughput_qps)");
        check_sparsity(s.sparsity, ctx + " (sparsity)");
        if (s.batch_size < 1) fail(ctx + " (batch_size)", "must be >= 1");
        if (!(s.throughput_qps > 0.0)) fail(ctx + " (throughput_qps)", "must be > 0");
        samples.push_back(std::move(s));
    }
    if (line_no == 0) fail(origin, "empty file (missing CSV header)");
    return samples;
}

std::vector<ProfileSample> load_samples_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open samples file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_samples_csv(buf.str(), path);
}

std::string samples_to_csv(const std::vector<ProfileSample>& samples) {
    std::string out = kSamplesCsvHeader;
    out += '\n';
    for (const auto& s : samples) {
        out += s.gpu;
        out += ',';
        out += s.model;
        out += ',';
        out += s.dataset;
        out += ',';
        out += json(s.sparsity).dump();
        out += ',';
        out += std::to_string(s.batch_size);
        out += ',';
        out += json(s.throughput_qps).dump();
        out += '\n';
    }
    return out;
}

double sparsity_of(const ModelSpec& model, int active_k) {
    if (active_k < 1 || active_k > model.num_experts)
        throw InputError("active_k = " + std::to_string(active_k) + " out of range [1, " +
                         std::to_string(model.num_experts) + "] for model \"" + model.name + "\"");
    return static_cast<double>(active_k) / static_cast<double>(model.num_experts);
}

}  // namespace ftcost
