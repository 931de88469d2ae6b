#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bsl/prior.hpp"
#include "bsl/simulator.hpp"
#include "bsl/synthetic_likelihood.hpp"
#include "bsl/types.hpp"

namespace bsl {

// Current point of a pseudo-marginal chain.  retained_loglik is the noisy
// estimate produced when theta was accepted; it is carried, never refreshed
// at the same theta.  adjustment and retained_moments are only populated by
// the robust sampler.
struct ChainState {
    ParameterVector theta;
    double retained_loglik = 0.0;
    Vector adjustment;
    std::optional<MomentEstimate> retained_moments;
};

// Random-walk proposal: theta' = theta + exp(log_factor) * scales .* z with
// z standard normal.  When adapt is on, log_factor follows a diminishing
// Robbins-Monro recursion toward target_accept during burn-in and is frozen
// afterwards, keeping the post-burn-in kernel fixed.
struct ProposalConfig {
    Vector scales;
    bool adapt = true;
    double target_accept = 0.234;
    double decay = 0.6;   // step size c / (t + 1)^decay
    double learn_c = 1.0;
};

struct StepResult {
    ChainState state;
    bool accepted = false;
    bool evaluated = false;  // false when rejected on the prior alone
    double log_ratio = 0.0;
};

// One pseudo-marginal Metropolis-Hastings step.  Out-of-prior proposals are
// rejected without touching the likelihood; in-support proposals get exactly
// one fresh evaluation, and the current point's estimate is reused as is.
StepResult pm_mh_step(const ChainState& current,
                      const LogLikEvaluator& target,
                      const Prior& prior,
                      const Vector& scales,
                      const SeedStream& iter_stream);

// Retained (post-burn-in) sample path.
struct Trace {
    std::vector<ParameterVector> thetas;
    std::vector<double> logliks;
    std::vector<unsigned char> accepted;
    std::vector<Vector> adjustments;  // empty unless robust chain
    int burn_in = 0;

    int size() const { return static_cast<int>(thetas.size()); }
    int param_dim() const { return thetas.empty() ? 0 : static_cast<int>(thetas[0].size()); }
    int adjustment_dim() const {
        return adjustments.empty() ? 0 : static_cast<int>(adjustments[0].size());
    }
    double acceptance_rate() const;
};

// Runs burn_in + iterations steps from init and keeps the last `iterations`
// states.  If the initial point has non-finite posterior density, retries
// from up to 9 fresh prior draws before giving up with InitializationError.
Trace run_chain(const ParameterVector& init,
                int iterations,
                int burn_in,
                const LogLikEvaluator& target,
                const Prior& prior,
                const ProposalConfig& proposal,
                const SeedStream& chain_stream);

// Same loop, but from a caller-built state (theta plus its retained
// estimate), e.g. a rejection-sampler keeper.  Uses the same iteration
// substreams as run_chain, so given the state run_chain would have built,
// the two produce identical traces.
Trace run_chain_from(const ChainState& start,
                     int iterations,
                     int burn_in,
                     const LogLikEvaluator& target,
                     const Prior& prior,
                     const ProposalConfig& proposal,
                     const SeedStream& chain_stream);

// Robust (mean-adjusted) sampler settings.  lambda is the Laplace prior
// scale on the adjustment components; adjustment_step the random-walk sd of
// their component-wise updates.
struct RbslConfig {
    int m = 100;
    double lambda = 0.5;
    double adjustment_step = 0.25;
};

// One robust sweep: a theta update that simulates a fresh batch and scores
// it at the current adjustment, then a component-wise adjustment update that
// reuses the retained moments and simulates nothing.
StepResult rbsl_step(const ChainState& current,
                     const SimulatorModel& model,
                     const SummaryVector& observed,
                     const RbslConfig& config,
                     const Prior& prior,
                     const Vector& scales,
                     const SeedStream& iter_stream,
                     int threads = 1);

Trace run_rbsl_chain(const ParameterVector& init,
                     int iterations,
                     int burn_in,
                     const SimulatorModel& model,
                     const SummaryVector& observed,
                     const RbslConfig& config,
                     const Prior& prior,
                     const ProposalConfig& proposal,
                     const SeedStream& chain_stream,
                     int threads = 1);

// Per-series summary: moments, central quantiles, and a Geyer
// initial-positive-sequence effective sample size.
struct SeriesDiagnostics {
    std::string name;
    int count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double q025 = 0.0;
    double q500 = 0.0;
    double q975 = 0.0;
    double ess = 0.0;
    double iact = 0.0;   // count / ess
    double acf1 = 0.0;
    int pairs_used = 0;  // positive autocovariance pairs summed
};

struct Diagnostics {
    double acceptance_rate = 0.0;
    int sample_count = 0;
    std::vector<SeriesDiagnostics> params;  // theta_* first, then gamma_*
};

SeriesDiagnostics series_diagnostics(const std::vector<double>& x,
                                     const std::string& name);

Diagnostics diagnostics(const Trace& trace);

// Interpolating (type 7) sample quantile; p in [0, 1], x non-empty.
double quantile(std::vector<double> x, double p);

}  // namespace bsl
