// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ftcost/render.hpp"
#include "ftcost/synth_workload.hpp"

namespace ftcost {

// Command implementations behind the CLI front end. Input problems throw
// InputError (exit 2), model failures throw DomainError (exit 1).

struct CalibrateBatchOptions {
    std::string catalog_path;
    std::string model;
    OutputFormat format = OutputFormat::Table;
    bool save = false;
};

struct FitOptions {
    std::string samples_path;
    std::string form = "power";
    OutputFormat format = OutputFormat::Table;
    bool save = false;
    std::string catalog_path;  // required with --save
};

struct CostOptions {
    std::string catalog_path;
    std::string model;
    std::string dataset;
    std::vector<std::string> gpus;
    double sparsity = 1.0;
    int epochs = 1;
    std::optional<std::int64_t> queries;
    std::optional<int> seq_len;
    OutputFormat format = OutputFormat::Table;
};

struct ProjectOptions {
    std::string catalog_path;
    std::string model;
    std::string dataset;          // optional source of the sequence length
    std::optional<int> seq_len;   // overrides the dataset's median_seq_len
    double sparsity = 1.0;
    std::vector<double> mem_grid;
    OutputFormat format = OutputFormat::Table;
};

struct SynthOptions {
    RooflineParams params;
    std::vector<int> batches;
    std::vector<double> sparsities;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    SampleLabels labels;
    OutputFormat format = OutputFormat::Table;
};

struct RouteOptions {
    std::string logits_path;  // when empty, synthesize tokens x experts logits
    int tokens = 0;
    int experts = 0;
    std::uint64_t seed = 0;
    int top_k = 1;
    OutputFormat format = OutputFormat::Table;
};

struct BreakdownOptions {
    StageShares shares;
    double total_s = 0.0;
    OutputFormat format = OutputFormat::Table;
};

void cmd_calibrate_batch(const CalibrateBatchOptions& opt, std::ostream& out, std::ostream& err);
void cmd_fit(const FitOptions& opt, std::ostream& out, std::ostream& err);
void cmd_cost(const CostOptions& opt, std::ostream& out, std::ostream& err);
void cmd_compare(const CostOptions& opt, std::ostream& out, std::ostream& err);
void cmd_project(const ProjectOptions& opt, std::ostream& out, std::ostream& err);
void cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err);
void cmd_route(const RouteOptions& opt, std::ostream& out, std::ostream& err);
void cmd_breakdown(const BreakdownOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace ftcost
