#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsl/types.hpp"

namespace bsl {

// One comparative experiment.  Generic knobs first, then per-experiment
// ones; unused fields are ignored by the other experiments.
struct ExperimentSpec {
    enum class Id { CompareAbcBsl, SlVarianceScaling, MisspecificationDemo };

    Id id = Id::CompareAbcBsl;
    std::string model = "gaussian_toy";
    int replicates = 6;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<double> theta_true;  // empty: model default

    // compare_abc_bsl: equal total simulator calls per method and replicate.
    long long budget = 200000;
    int bsl_m = 30;
    int abc_m = 1;
    int pilot_budget = 2000;
    int table_budget = 50000;
    double epsilon_quantile = 0.001;

    // sl_variance_scaling
    std::vector<int> ds_grid = {5, 10, 20};
    std::vector<int> m_grid = {50};
    double gamma = 0.0;       // shrinkage of the whitened estimator
    int whitening_m0 = 200;

    // misspecification_demo (the control case with sigma_true = 1 always
    // runs alongside).  The batch size has to carry the standardized variance
    // misfit: the noisy loglik variance at the misspecified optimum grows
    // like z^2 / M with z the misfit in summary sds, and once that noise
    // passes ~1 the theta walk stops accepting and the adapted step collapses.
    // M = 100 keeps it benign for the demo's dataset size (see harness.cpp).
    double sigma_true = 2.0;
    int rbsl_m = 100;
    // The adjustment prior scale trades flagging power against coverage: the
    // control case needs the Gamma posterior pulled toward zero while the
    // theta interval needs the Laplace tail for its reach, and the two meet
    // just under unit scale.  Long chains keep the interval quantiles honest
    // on the theta-Gamma ridge.
    double rbsl_lambda = 0.9;
    double rbsl_adjustment_step = 0.8;
    int iterations = 10000;
    int burn_in = 3000;

    // Empty when valid; one message per violation.
    std::vector<std::string> validate() const;
};

struct ResultRow {
    std::string experiment;
    std::string cell;
    std::string metric;
    double value = 0.0;
    double mc_se = 0.0;
};

// Rows sorted by (experiment, cell, metric); every metric is aggregated
// over replicates and carries a Monte Carlo standard error.
struct ExperimentResult {
    std::vector<ResultRow> rows;

    // The row for (cell, metric); throws if absent.
    const ResultRow& find(const std::string& cell, const std::string& metric) const;
};

std::string experiment_id_name(ExperimentSpec::Id id);

ExperimentResult run_experiment(const ExperimentSpec& spec);

ExperimentResult run_compare_abc_bsl(const ExperimentSpec& spec);
ExperimentResult run_sl_variance_scaling(const ExperimentSpec& spec);
ExperimentResult run_misspecification_demo(const ExperimentSpec& spec);

// Header: experiment,cell,metric,value,mc_se
void write_result_csv(const ExperimentResult& result, std::ostream& os);

}  // namespace bsl
