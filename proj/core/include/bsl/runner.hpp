#pragma once

#include <optional>
#include <string>

#include "bsl/config.hpp"
#include "bsl/mcmc.hpp"

namespace bsl {

// Process exit codes shared by the CLI and the tests.
enum class ExitCode : int {
    Ok = 0,
    Internal = 1,
    Config = 2,
    Init = 3,
    Protocol = 4,
    Io = 5,
};

ExitCode exit_code_for(const std::exception& e);

struct RunOutput {
    Trace trace;
    SummaryVector observed;
    Diagnostics diag;
    std::optional<double> epsilon;  // kernel methods only
    std::string summary_text;
};

// Executes a resolved configuration and writes config_snapshot.json,
// seed.txt, trace.csv and summary.txt into cfg.output_dir.
RunOutput run_to_dir(const RunConfig& cfg);

// Experiment counterpart: config_snapshot.json, seed.txt, results.csv and
// summary.txt in file.output_dir.
ExperimentResult run_experiment_to_dir(const ExperimentFile& file);

std::string render_diagnostics(const Diagnostics& d);

// Reads a retained-sample CSV and renders its diagnostics table.
std::string diagnose_trace_file(const std::string& path);

}  // namespace bsl
