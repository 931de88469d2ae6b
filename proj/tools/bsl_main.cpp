// Command-line front end: run, validate, experiment, diagnose.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bsl/config.hpp"
#include "bsl/errors.hpp"
#include "bsl/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw bsl::IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

bool looks_like_experiment(const std::string& text) {
    // cheap sniff; the strict parser still decides
    return text.find("\"experiment\"") != std::string::npos;
}

int experiment_command(const std::string& config_path, const std::string& output_dir);

int run_command(const std::string& config_path, const std::string& output_dir) {
    const std::string text = slurp(config_path);
    if (looks_like_experiment(text))
        return experiment_command(config_path, output_dir);
    bsl::RunConfig cfg = bsl::parse_config_text(text);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    bsl::RunOutput out = bsl::run_to_dir(cfg);
    std::cout << out.summary_text;
    std::cout << "wrote " << cfg.output_dir << "\n";
    return 0;
}

int validate_command(const std::string& config_path) {
    const std::string text = slurp(config_path);
    if (looks_like_experiment(text)) {
        bsl::ExperimentFile file = bsl::parse_experiment_text(text);
        std::cout << bsl::experiment_snapshot(file);
    } else {
        bsl::RunConfig cfg = bsl::parse_config_text(text);
        std::cout << bsl::config_snapshot(cfg);
    }
    return 0;
}

int experiment_command(const std::string& config_path, const std::string& output_dir) {
    const std::string text = slurp(config_path);
    bsl::ExperimentFile file = bsl::parse_experiment_text(text);
    if (!output_dir.empty()) file.output_dir = output_dir;
    bsl::ExperimentResult result = bsl::run_experiment_to_dir(file);
    std::cout << "rows: " << result.rows.size() << "\n";
    std::cout << "wrote " << file.output_dir << "\n";
    return 0;
}

int diagnose_command(const std::string& trace_path) {
    std::cout << bsl::diagnose_trace_file(trace_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation-based inference runner"};
    app.require_subcommand(1);

    std::string config_path, output_dir, trace_path;

    CLI::App* run = app.add_subcommand("run", "execute a run config");
    run->add_option("config", config_path, "JSON run config")->required();
    run->add_option("--output-dir", output_dir, "override the config's output_dir");

    CLI::App* validate =
        app.add_subcommand("validate", "parse a config and print the resolved form");
    validate->add_option("config", config_path, "JSON run or experiment config")
        ->required();

    CLI::App* experiment = app.add_subcommand("experiment", "execute an experiment");
    experiment->add_option("config", config_path, "JSON experiment config")->required();
    experiment->add_option("--output-dir", output_dir,
                           "override the config's output_dir");

    CLI::App* diagnose =
        app.add_subcommand("diagnose", "summarize a trace CSV");
    diagnose->add_option("trace", trace_path, "trace.csv from a run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(bsl::ExitCode::Config);
    }

    try {
        if (run->parsed()) return run_command(config_path, output_dir);
        if (validate->parsed()) return validate_command(config_path);
        if (experiment->parsed()) return experiment_command(config_path, output_dir);
        return diagnose_command(trace_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(bsl::exit_code_for(e));
    }
}
