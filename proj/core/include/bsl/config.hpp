#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bsl/abc.hpp"
#include "bsl/external_simulator.hpp"
#include "bsl/harness.hpp"
#include "bsl/models.hpp"
#include "bsl/prior.hpp"
#include "bsl/simulator.hpp"
#include "bsl/types.hpp"

namespace bsl {

// Which simulator a run uses, with every builtin's settings resolved.
struct ModelChoice {
    std::string name = "gaussian_toy";  // gaussian_toy | ma2 | contaminated_normal | external
    GaussianToyConfig toy;
    Ma2Config ma2;
    ContaminatedNormalConfig contaminated;
    std::optional<ExternalSimulatorSpec> external;
    std::vector<PriorMarginal> external_prior;  // required iff external
};

std::unique_ptr<SimulatorModel> make_model(const ModelChoice& choice);
Prior model_prior(const ModelChoice& choice);

// A fully resolved run configuration: parsing materializes every default,
// so the emitted snapshot reruns identically.
struct RunConfig {
    enum class Method { Bsl, Rbsl, AbcMcmc, AbcRejection };

    Method method = Method::Bsl;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output_dir;

    ModelChoice model;

    // exactly one of these two in a config file; observed wins in snapshots
    std::optional<SummaryVector> observed;
    std::optional<ParameterVector> theta_true;

    // synthetic-likelihood estimator
    int m = 100;
    double gamma = 1.0;  // 1 = no shrinkage
    bool whitening = false;
    int whitening_m0 = 200;
    std::optional<ParameterVector> whitening_theta0;  // default: prior mean

    // sampler
    int iterations = 10000;
    int burn_in = 2000;
    std::optional<Vector> scales;  // default: prior sds
    bool adapt = true;
    double target_accept = 0.234;

    // robust variant
    double rbsl_lambda = 0.5;
    double rbsl_adjustment_step = 0.25;

    // kernel methods
    AbcKernelConfig::Kernel abc_kernel = AbcKernelConfig::Kernel::Uniform;
    AbcKernelConfig::Distance abc_distance = AbcKernelConfig::Distance::Mahalanobis;
    int abc_m = 1;
    std::optional<double> abc_epsilon;  // absent: realized from the table quantile
    double abc_epsilon_quantile = 0.01;
    int abc_pilot_budget = 2000;
    int abc_table_budget = 20000;
    long long abc_budget = 50000;  // rejection sampler draws
};

// Strict parsing: unknown keys are violations, and every violation in the
// file is reported at once through ConfigError.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Resolved-config JSON; parse_config_text(config_snapshot(c)) reproduces c.
std::string config_snapshot(const RunConfig& cfg);

// Experiment spec file: the harness spec plus the output directory.
struct ExperimentFile {
    ExperimentSpec spec;
    std::string output_dir;
};

ExperimentFile parse_experiment_text(const std::string& text);
ExperimentFile parse_experiment_file(const std::string& path);
std::string experiment_snapshot(const ExperimentFile& file);

}  // namespace bsl
