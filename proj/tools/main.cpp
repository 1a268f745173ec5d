// SPDX-License-Identifier: Apache-2.0
//
// ftcost: calibrate and evaluate analytical models of LLM fine-tuning
// performance, estimate cloud cost, generate synthetic roofline data, and
// simulate MoE top-k routing.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ftcost/cli.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitInputError = 2;

ftcost::OutputFormat parse_format(const std::string& text) {
    return ftcost::output_format_from_string(text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytical performance and cost modeling for MoE LLM fine-tuning"};
    app.require_subcommand(1);
    // let --format appear either before or after the subcommand
    app.fallthrough();

    std::string format = "table";
    app.add_option("--format", format, "Output format: table, csv, or json")->capture_default_str();

    // calibrate-batch
    ftcost::CalibrateBatchOptions calibrate;
    CLI::App* cal = app.add_subcommand("calibrate-batch",
                                       "Fit max-batch-size coefficients from catalog observations");
    cal->add_option("--catalog", calibrate.catalog_path, "Catalog JSON file")->required();
    cal->add_option("--model", calibrate.model, "Model name to calibrate")->required();
    cal->add_flag("--save", calibrate.save, "Write fitted coefficients back into the catalog");

    // fit
    ftcost::FitOptions fit;
    CLI::App* fitc = app.add_subcommand("fit", "Fit throughput coefficients to profile samples");
    fitc->add_option("--samples", fit.samples_path, "Samples CSV file")->required();
    fitc->add_option("--form", fit.form, "Model form: literal or power")->capture_default_str();
    fitc->add_flag("--save", fit.save, "Write fitted coefficients into the catalog");
    fitc->add_option("--catalog", fit.catalog_path, "Catalog JSON file (required with --save)");

    // cost / compare
    ftcost::CostOptions cost;
    std::int64_t queries = -1;
    int seq_len = -1;
    auto add_cost_options = [&](CLI::App* cmd, bool single_gpu) {
        cmd->add_option("--catalog", cost.catalog_path, "Catalog JSON file")->required();
        cmd->add_option("--model", cost.model, "Model name")->required();
        cmd->add_option("--dataset", cost.dataset, "Dataset name")->required();
        if (single_gpu)
            cmd->add_option("--gpu", cost.gpus, "GPU name")->required();
        else
            cmd->add_option("--gpus", cost.gpus, "GPU names (default: all in catalog)")->delimiter(',');
        cmd->add_option("--sparsity", cost.sparsity, "MoE sparsity in (0, 1]")->capture_default_str();
        cmd->add_option("--epochs", cost.epochs, "Fine-tuning epochs")->capture_default_str();
        cmd->add_option("--queries", queries, "Override the dataset's query count")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seq-len", seq_len, "Override the dataset's median sequence length")
            ->check(CLI::PositiveNumber);
    };
    CLI::App* costc = app.add_subcommand("cost", "Estimate fine-tuning cost on one GPU");
    add_cost_options(costc, true);
    CLI::App* cmp = app.add_subcommand("compare", "Rank GPUs by estimated fine-tuning cost");
    add_cost_options(cmp, false);

    // project
    ftcost::ProjectOptions project;
    int project_seq_len = -1;
    CLI::App* prj = app.add_subcommand("project",
                                       "Project maximum batch size onto hypothetical GPU memory sizes");
    prj->add_option("--catalog", project.catalog_path, "Catalog JSON file")->required();
    prj->add_option("--model", project.model, "Model name (needs calibrated batch coefficients)")->required();
    prj->add_option("--dataset", project.dataset, "Dataset supplying the sequence length");
    prj->add_option("--seq-len", project_seq_len, "Sequence length override, tokens")
        ->check(CLI::PositiveNumber);
    prj->add_option("--sparsity", project.sparsity, "MoE sparsity in (0, 1]")->capture_default_str();
    prj->add_option("--mem-grid", project.mem_grid, "GPU memory grid, GiB")->delimiter(',')->required();

    // synth
    ftcost::SynthOptions synth;
    CLI::App* syn = app.add_subcommand("synth", "Generate roofline-model profile samples");
    syn->add_option("--peak-tflops", synth.params.peak_compute_tflops, "Peak compute, TFLOP/s")->required();
    syn->add_option("--bandwidth-gbs", synth.params.mem_bandwidth_gbs, "Memory bandwidth, GB/s")->required();
    syn->add_option("--weight-bytes", synth.params.weight_bytes, "Weight bytes streamed per step")->required();
    syn->add_option("--flops-per-token", synth.params.flops_per_token, "Dense FLOPs per token")->required();
    syn->add_option("--activation-bytes-per-token", synth.params.activation_bytes_per_token,
                    "Activation bytes per token")
        ->required();
    syn->add_option("--seq-len", synth.params.seq_len, "Tokens per query")->required();
    syn->add_option("--moe-flop-fraction", synth.params.moe_flop_fraction,
                    "Fraction of FLOPs in MoE experts")
        ->capture_default_str();
    syn->add_option("--overhead-s", synth.params.fixed_overhead_s, "Fixed per-step overhead, seconds")
        ->capture_default_str();
    syn->add_option("--batches", synth.batches, "Batch size grid")->delimiter(',')->required();
    syn->add_option("--sparsities", synth.sparsities, "Sparsity grid")->delimiter(',')->required();
    syn->add_option("--sigma", synth.sigma, "Multiplicative log-normal noise sigma")->capture_default_str();
    syn->add_option("--seed", synth.seed, "RNG seed")->capture_default_str();
    syn->add_option("--gpu-name", synth.labels.gpu, "GPU label for emitted samples")->capture_default_str();
    syn->add_option("--model-name", synth.labels.model, "Model label")->capture_default_str();
    syn->add_option("--dataset-name", synth.labels.dataset, "Dataset label")->capture_default_str();

    // route
    ftcost::RouteOptions route;
    CLI::App* rt = app.add_subcommand("route", "Simulate MoE top-k routing and report expert load");
    rt->add_option("--logits", route.logits_path, "Logits CSV, one row per token");
    rt->add_option("--tokens", route.tokens, "Synthesize this many tokens (with --experts)");
    rt->add_option("--experts", route.experts, "Expert count for synthesized logits");
    rt->add_option("--seed", route.seed, "RNG seed for synthesized logits")->capture_default_str();
    rt->add_option("--top-k", route.top_k, "Experts activated per token")->required();

    // breakdown
    ftcost::BreakdownOptions breakdown;
    CLI::App* br = app.add_subcommand("breakdown", "Split a training step into stage and layer times");
    br->add_option("--forward", breakdown.shares.forward, "Forward share of the step")->required();
    br->add_option("--backward", breakdown.shares.backward, "Backward share of the step")->required();
    br->add_option("--optimizer", breakdown.shares.optimizer, "Optimizer share of the step")->required();
    br->add_option("--moe-share", breakdown.shares.moe_layer_share,
                   "MoE fraction of forward+backward time")
        ->capture_default_str();
    br->add_option("--total-s", breakdown.total_s, "Total step time, seconds")->required();
    br->add_flag("--full-ft", breakdown.shares.full_fine_tuning,
                 "Full fine-tuning (requires backward >= forward)");

    try {
        app.parse(argc, argv);

        ftcost::OutputFormat fmt = parse_format(format);
        if (*cal) {
            calibrate.format = fmt;
            ftcost::cmd_calibrate_batch(calibrate, std::cout, std::cerr);
        } else if (*fitc) {
            fit.format = fmt;
            ftcost::cmd_fit(fit, std::cout, std::cerr);
        } else if (*costc || *cmp) {
            cost.format = fmt;
            if (queries >= 0) cost.queries = queries;
            if (seq_len >= 0) cost.seq_len = seq_len;
            if (*costc)
                ftcost::cmd_cost(cost, std::cout, std::cerr);
            else
                ftcost::cmd_compare(cost, std::cout, std::cerr);
        } else if (*prj) {
            project.format = fmt;
            if (project_seq_len >= 0) project.seq_len = project_seq_len;
            ftcost::cmd_project(project, std::cout, std::cerr);
        } else if (*syn) {
            synth.format = fmt;
            ftcost::cmd_synth(synth, std::cout, std::cerr);
        } else if (*rt) {
            route.format = fmt;
            ftcost::cmd_route(route, std::cout, std::cerr);
        } else if (*br) {
            breakdown.format = fmt;
            ftcost::cmd_breakdown(breakdown, std::cout, std::cerr);
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitSuccess : kExitInputError;
    } catch (const ftcost::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ftcost::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomainError;
    }
    return kExitSuccess;
}
