// SPDX-License-Identifier: Apache-2.0
#include "ftcost/cli.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "ftcost/batch_model.hpp"
#include "ftcost/cost_model.hpp"
#include "ftcost/rng.hpp"
#include "ftcost/router_sim.hpp"
#include "ftcost/throughput_model.hpp"

namespace ftcost {

using nlohmann::json;

namespace {

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

json residual_to_json(const BatchResidual& r) {
    return json{{"gpu", r.observation.gpu},
                {"model", r.observation.model},
                {"dataset", r.observation.dataset},
                {"sparsity", r.observation.sparsity},
                {"observed_max_bs", r.observation.observed_max_bs},
                {"predicted", r.predicted},
                {"residual", r.residual}};
}

json residual_to_json(const FitResidual& r) {
    return json{{"gpu", r.sample.gpu},
                {"model", r.sample.model},
                {"dataset", r.sample.dataset},
                {"sparsity", r.sample.sparsity},
                {"batch_size", r.sample.batch_size},
                {"throughput_qps", r.sample.throughput_qps},
                {"predicted", r.predicted},
                {"residual", r.residual}};
}

void emit_json(const json& value, std::ostream& out) { out << value.dump(2) << "\n"; }

}  // namespace

void cmd_calibrate_batch(const CalibrateBatchOptions& opt, std::ostream& out, std::ostream& err) {
    Catalog catalog = load_catalog(opt.catalog_path);
    catalog.model(opt.model);  // diagnose an unknown model as an input error
    std::vector<BatchObservation> observations;
    for (const auto& o : catalog.batch_observations)
        if (o.model == opt.model) observations.push_back(o);
    if (observations.empty())
        throw DomainError("catalog has no batch observations for model \"" + opt.model + "\"");

    CalibrationReport report = calibrate_batch_coeffs(observations, catalog);

    switch (opt.format) {
        case OutputFormat::Table: {
            out << "model: " << opt.model << "\n";
            out << "coefficients: c0=" << format_sig(report.coeffs.c0) << " c1=" << format_sig(report.coeffs.c1)
                << "\n";
            out << "exact matches: " << report.exact_matches << " / " << report.residuals.size() << "\n";
            out << "max |residual|: " << report.max_abs_residual << "\n\n";
            std::vector<std::vector<std::string>> rows;
            for (const auto& r : report.residuals)
                rows.push_back({r.observation.gpu, r.observation.dataset, format_sig(r.observation.sparsity),
                                fmt_int(r.observation.observed_max_bs), fmt_int(r.predicted),
                                fmt_int(r.residual)});
            out << render_table({"gpu", "dataset", "sparsity", "observed", "predicted", "residual"}, rows);
            break;
        }
        case OutputFormat::Csv: {
            out << render_csv_row({"gpu", "model", "dataset", "sparsity", "observed_max_bs", "predicted",
                                   "residual", "c0", "c1", "max_abs_residual", "exact_matches"});
            for (const auto& r : report.residuals)
                out << render_csv_row({r.observation.gpu, r.observation.model, r.observation.dataset,
                                       format_full(r.observation.sparsity), fmt_int(r.observation.observed_max_bs),
                                       fmt_int(r.predicted), fmt_int(r.residual), format_full(report.coeffs.c0),
                                       format_full(report.coeffs.c1), fmt_int(report.max_abs_residual),
                                       fmt_int(report.exact_matches)});
            break;
        }
        case OutputFormat::Json: {
            json residuals = json::array();
            for (const auto& r : report.residuals) residuals.push_back(residual_to_json(r));
            emit_json(json{{"model", opt.model},
                           {"coeffs", {{"c0", report.coeffs.c0}, {"c1", report.coeffs.c1}}},
                           {"max_abs_residual", report.max_abs_residual},
                           {"exact_matches", report.exact_matches},
                           {"residuals", residuals}},
                      out);
            break;
        }
    }

    if (opt.save) {
        ModelSpec* model = catalog.find_model(opt.model);
        model->batch_coeffs = report.coeffs;
        save_catalog(catalog, opt.catalog_path);
        err << "saved batch coefficients for \"" << opt.model << "\" to " << opt.catalog_path << "\n";
    }
}

void cmd_fit(const FitOptions& opt, std::ostream& out, std::ostream& err) {
    ThroughputForm form = throughput_form_from_string(opt.form);
    std::vector<ProfileSample> samples = load_samples_csv(opt.samples_path);
    if (samples.empty()) throw DomainError("samples file \"" + opt.samples_path + "\" has no data rows");
    FitReport report = fit_throughput(samples, form);
    if (report.coeffs.c2 <= 0.0)
        err << "warning: fitted c2 = " << format_sig(report.coeffs.c2)
            << " is not positive; physically meaningful fits have c2 > 0\n";

    const ProfileSample& key = samples.front();
    switch (opt.format) {
        case OutputFormat::Table: {
            out << "samples: " << report.sample_count << " (gpu " << key.gpu << ", model " << key.model
                << ", dataset " << key.dataset << ")\n";
            out << "form: " << to_string(report.coeffs.form) << "\n";
            out << "coefficients: c2=" << format_sig(report.coeffs.c2) << " c3=" << format_sig(report.coeffs.c3)
                << " c4=" << format_sig(report.coeffs.c4) << "\n";
            out << "rmse: " << format_sig(report.rmse) << "\n\n";
            std::vector<std::vector<std::string>> rows;
            for (const auto& r : report.residuals)
                rows.push_back({format_sig(r.sample.sparsity), fmt_int(r.sample.batch_size),
                                format_sig(r.sample.throughput_qps), format_sig(r.predicted),
                                format_sig(r.residual)});
            out << render_table({"sparsity", "batch_size", "measured", "predicted", "residual"}, rows);
            break;
        }
        case OutputFormat::Csv: {
            out << render_csv_row({"gpu", "model", "dataset", "sparsity", "batch_size", "throughput_qps",
                                   "predicted", "residual", "form", "c2", "c3", "c4", "rmse"});
            for (const auto& r : report.residuals)
                out << render_csv_row({r.sample.gpu, r.sample.model, r.sample.dataset,
                                       format_full(r.sample.sparsity), fmt_int(r.sample.batch_size),
                                       format_full(r.sample.throughput_qps), format_full(r.predicted),
                                       format_full(r.residual), to_string(report.coeffs.form),
                                       format_full(report.coeffs.c2), format_full(report.coeffs.c3),
                                       format_full(report.coeffs.c4), format_full(report.rmse)});
            break;
        }
        case OutputFormat::Json: {
            json residuals = json::array();
            for (const auto& r : report.residuals) residuals.push_back(residual_to_json(r));
            emit_json(json{{"coeffs",
                            {{"form", to_string(report.coeffs.form)},
                             {"c2", report.coeffs.c2},
                             {"c3", report.coeffs.c3},
                             {"c4", report.coeffs.c4}}},
                           {"rmse", report.rmse},
                           {"sample_count", report.sample_count},
                           {"residuals", residuals}},
                      out);
            break;
        }
    }

    if (opt.save) {
        if (opt.catalog_path.empty()) throw InputError("--save requires --catalog");
        if (!(report.coeffs.c3 > 0.0))
            throw DomainError("fitted c3 = " + format_sig(report.coeffs.c3) +
                              " is not positive and cannot be stored in a catalog; the sparsity "
                              "effect in these samples contradicts the model");
        Catalog catalog = load_catalog(opt.catalog_path);
        ModelSpec* model = catalog.find_model(key.model);
        if (!model)
            throw InputError("samples reference model \"" + key.model + "\" absent from " + opt.catalog_path);
        catalog.gpu(key.gpu);
        catalog.dataset(key.dataset);
        model->throughput_coeffs[{key.dataset, key.gpu, report.coeffs.form}] = report.coeffs;
        save_catalog(catalog, opt.catalog_path);
        err << "saved throughput coefficients for (" << key.model << ", " << key.dataset << ", " << key.gpu
            << ", " << to_string(report.coeffs.form) << ") to " << opt.catalog_path << "\n";
    }
}

namespace {

CostQuery query_from_options(const CostOptions& opt) {
    CostQuery q;
    q.model = opt.model;
    q.dataset = opt.dataset;
    q.sparsity = opt.sparsity;
    q.epochs = opt.epochs;
    q.override_queries = opt.queries;
    q.override_seq_len = opt.seq_len;
    return q;
}

void emit_cost_rows(const Catalog& catalog, const std::vector<std::pair<std::string, CostEstimate>>& rows,
                    OutputFormat format, std::ostream& out) {
    switch (format) {
        case OutputFormat::Table: {
            std::vector<std::vector<std::string>> cells;
            for (const auto& [name, est] : rows)
                cells.push_back({name, format_sig(catalog.gpu(name).memory_gib), fmt_int(est.max_batch_size),
                                 format_sig(est.throughput_qps), format_sig(est.hourly_price_usd),
                                 format_sig(est.wall_seconds), format_sig(est.total_usd)});
            out << render_table(
                {"gpu", "memory_gib", "max_batch", "throughput_qps", "usd_per_hour", "wall_seconds", "total_usd"},
                cells);
            break;
        }
        case OutputFormat::Csv: {
            out << render_csv_row({"gpu", "memory_gib", "max_batch_size", "throughput_qps", "hourly_price_usd",
                                   "wall_seconds", "total_usd"});
            for (const auto& [name, est] : rows)
                out << render_csv_row({name, format_full(catalog.gpu(name).memory_gib),
                                       fmt_int(est.max_batch_size), format_full(est.throughput_qps),
                                       format_full(est.hourly_price_usd), format_full(est.wall_seconds),
                                       format_full(est.total_usd)});
            break;
        }
        case OutputFormat::Json: {
            json arr = json::array();
            for (const auto& [name, est] : rows)
                arr.push_back(json{{"gpu", name},
                                   {"memory_gib", catalog.gpu(name).memory_gib},
                                   {"max_batch_size", est.max_batch_size},
                                   {"throughput_qps", est.throughput_qps},
                                   {"hourly_price_usd", est.hourly_price_usd},
                                   {"wall_seconds", est.wall_seconds},
                                   {"total_usd", est.total_usd}});
            emit_json(arr, out);
            break;
        }
    }
}

}  // namespace

void cmd_cost(const CostOptions& opt, std::ostream& out, std::ostream&) {
    if (opt.gpus.size() != 1) throw InputError("cost needs exactly one --gpu");
    Catalog catalog = load_catalog(opt.catalog_path);
    CostQuery q = query_from_options(opt);
    q.gpu = opt.gpus.front();
    CostEstimate est = estimate_cost(catalog, q);
    emit_cost_rows(catalog, {{q.gpu, est}}, opt.format, out);
}

void cmd_compare(const CostOptions& opt, std::ostream& out, std::ostream&) {
    Catalog catalog = load_catalog(opt.catalog_path);
    std::vector<std::string> gpus = opt.gpus;
    if (gpus.empty())
        for (const auto& g : catalog.gpus) gpus.push_back(g.name);
    auto ranked = compare_gpus(catalog, query_from_options(opt), gpus);
    emit_cost_rows(catalog, ranked, opt.format, out);
}

void cmd_project(const ProjectOptions& opt, std::ostream& out, std::ostream&) {
    Catalog catalog = load_catalog(opt.catalog_path);
    const ModelSpec& model = catalog.model(opt.model);
    if (!model.batch_coeffs)
        throw DomainError("model \"" + model.name + "\" has no calibrated batch coefficients");
    int seq_len = 0;
    if (opt.seq_len) {
        seq_len = *opt.seq_len;
    } else if (!opt.dataset.empty()) {
        seq_len = catalog.dataset(opt.dataset).median_seq_len;
    } else {
        throw InputError("project needs --seq-len or --dataset");
    }

    auto rows = project_max_batch(*model.batch_coeffs, model.resident_memory_gib, seq_len, opt.sparsity,
                                  opt.mem_grid);
    switch (opt.format) {
        case OutputFormat::Table: {
            out << "model: " << model.name << "  seq_len: " << seq_len
                << "  sparsity: " << format_sig(opt.sparsity) << "\n\n";
            std::vector<std::vector<std::string>> cells;
            for (const auto& [mem, batch] : rows)
                cells.push_back({format_sig(mem), fmt_int(batch)});
            out << render_table({"memory_gib", "max_batch"}, cells);
            break;
        }
        case OutputFormat::Csv: {
            out << render_csv_row({"memory_gib", "max_batch_size"});
            for (const auto& [mem, batch] : rows)
                out << render_csv_row({format_full(mem), fmt_int(batch)});
            break;
        }
        case OutputFormat::Json: {
            json arr = json::array();
            for (const auto& [mem, batch] : rows)
                arr.push_back(json{{"memory_gib", mem}, {"max_batch_size", batch}});
            emit_json(arr, out);
            break;
        }
    }
}

void cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream&) {
    auto samples = generate_samples(opt.params, opt.batches, opt.sparsities, opt.sigma, opt.seed, opt.labels);
    switch (opt.format) {
        case OutputFormat::Table: {
            std::vector<std::vector<std::string>> rows;
            for (const auto& s : samples)
                rows.push_back({s.gpu, s.model, s.dataset, format_sig(s.sparsity), fmt_int(s.batch_size),
                                format_sig(s.throughput_qps)});
            out << render_table({"gpu", "model", "dataset", "sparsity", "batch_size", "throughput_qps"}, rows);
            break;
        }
        case OutputFormat::Csv:
            out << samples_to_csv(samples);
            break;
        case OutputFormat::Json: {
            json arr = json::array();
            for (const auto& s : samples)
                arr.push_back(json{{"gpu", s.gpu},
                                   {"model", s.model},
                                   {"dataset", s.dataset},
                                   {"sparsity", s.sparsity},
                                   {"batch_size", s.batch_size},
                                   {"throughput_qps", s.throughput_qps}});
            emit_json(arr, out);
            break;
        }
    }
}

namespace {

std::vector<std::vector<double>> load_logits_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open logits file \"" + path + "\"");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string field = comma == std::string::npos ? line.substr(start)
                                                           : line.substr(start, comma - start);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size())
                throw InputError(path + ": line " + std::to_string(line_no) + ": \"" + field +
                                 "\" is not a number");
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError(path + ": no logits rows");
    return rows;
}

}  // namespace

void cmd_route(const RouteOptions& opt, std::ostream& out, std::ostream&) {
    RouterInput input;
    input.top_k = opt.top_k;
    if (!opt.logits_path.empty()) {
        input.logits = load_logits_csv(opt.logits_path);
    } else {
        if (opt.tokens < 1 || opt.experts < 1)
            throw InputError("without --logits, both --tokens and --experts must be >= 1");
        GaussianSampler gen(opt.seed);
        input.logits.assign(opt.tokens, std::vector<double>(opt.experts));
        for (auto& row : input.logits)
            for (double& v : row) v = gen.next();
    }

    auto assignments = route_topk(input);
    ExpertLoad load = expert_load(assignments, static_cast<int>(input.logits.front().size()));

    switch (opt.format) {
        case OutputFormat::Table: {
            out << "tokens: " << assignments.size() << "  experts: " << load.counts.size()
                << "  top_k: " << opt.top_k << "\n";
            out << "variance_pct: " << format_sig(load.variance_pct) << "\n";
            out << "imbalance_factor: " << format_sig(load.imbalance_factor) << "\n\n";
            std::vector<std::vector<std::string>> rows;
            for (std::size_t e = 0; e < load.counts.size(); ++e)
                rows.push_back({fmt_int(static_cast<std::int64_t>(e)), fmt_int(load.counts[e]),
                                format_sig(load.shares_pct[e])});
            out << render_table({"expert", "count", "share_pct"}, rows);
            break;
        }
        case OutputFormat::Csv: {
            out << render_csv_row({"expert", "count", "share_pct", "variance_pct", "imbalance_factor"});
            for (std::size_t e = 0; e < load.counts.size(); ++e)
                out << render_csv_row({fmt_int(static_cast<std::int64_t>(e)), fmt_int(load.counts[e]),
                                       format_full(load.shares_pct[e]), format_full(load.variance_pct),
                                       format_full(load.imbalance_factor)});
            break;
        }
        case OutputFormat::Json: {
            emit_json(json{{"counts", load.counts},
                           {"shares_pct", load.shares_pct},
                           {"variance_pct", load.variance_pct},
                           {"imbalance_factor", load.imbalance_factor}},
                      out);
            break;
        }
    }
}

void cmd_breakdown(const BreakdownOptions& opt, std::ostream& out, std::ostream&) {
    StageBreakdown b = stage_breakdown(opt.shares, opt.total_s);
    switch (opt.format) {
        case OutputFormat::Table: {
            std::vector<std::vector<std::string>> rows{
                {"forward", format_sig(b.forward_s), format_sig(b.forward_s / b.total_s)},
                {"backward", format_sig(b.backward_s), format_sig(b.backward_s / b.total_s)},
                {"optimizer", format_sig(b.optimizer_s), format_sig(b.optimizer_s / b.total_s)},
                {"moe_layers", format_sig(b.moe_layer_s), format_sig(b.moe_layer_s / b.total_s)},
                {"other_layers", format_sig(b.other_layers_s), format_sig(b.other_layers_s / b.total_s)},
                {"total", format_sig(b.total_s), "1"}};
            out << render_table({"component", "seconds", "share_of_total"}, rows);
            break;
        }
        case OutputFormat::Csv: {
            out << render_csv_row({"component", "seconds"});
            out << render_csv_row({"forward", format_full(b.forward_s)});
            out << render_csv_row({"backward", format_full(b.backward_s)});
            out << render_csv_row({"optimizer", format_full(b.optimizer_s)});
            out << render_csv_row({"moe_layers", format_full(b.moe_layer_s)});
            out << render_csv_row({"other_layers", format_full(b.other_layers_s)});
            out << render_csv_row({"total", format_full(b.total_s)});
            break;
        }
        case OutputFormat::Json:
            emit_json(json{{"forward_s", b.forward_s},
                           {"backward_s", b.backward_s},
                           {"optimizer_s", b.optimizer_s},
                           {"moe_layer_s", b.moe_layer_s},
                           {"other_layers_s", b.other_layers_s},
                           {"total_s", b.total_s}},
                      out);
            break;
    }
}

}  // namespace ftcost
