#include "bsl/mcmc.hpp"

#include <cmath>
#include <limits>

#include "bsl/errors.hpp"

namespace bsl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Substream roles inside one iteration.
constexpr std::uint64_t kMoveRng = 0;
constexpr std::uint64_t kLikelihood = 1;
constexpr std::uint64_t kAdjustmentRng = 2;

// Chain-level substreams.
constexpr std::uint64_t kInitBranch = 0;
constexpr std::uint64_t kIterBranch = 1;

constexpr int kInitAttempts = 10;

bool usable_loglik(double ll) { return !std::isnan(ll) && ll > kNegInf; }

void check_proposal(const Vector& scales, Eigen::Index dim) {
    if (scales.size() != dim)
        throw DimensionError("proposal scales have wrong dimension");
    for (Eigen::Index i = 0; i < scales.size(); ++i)
        if (!(scales[i] > 0.0))
            throw InvalidArgumentError("proposal scales must be positive");
}

ParameterVector propose(const ParameterVector& theta, const Vector& scales, Rng& rng) {
    ParameterVector prop = theta;
    for (Eigen::Index i = 0; i < prop.size(); ++i)
        prop[i] += scales[i] * rng.normal();
    return prop;
}

double laplace_logpdf(double x, double lambda) {
    return -std::abs(x) / lambda - std::log(2.0 * lambda);
}

}  // namespace

StepResult pm_mh_step(const ChainState& current,
                      const LogLikEvaluator& target,
                      const Prior& prior,
                      const Vector& scales,
                      const SeedStream& iter_stream) {
    if (current.theta.size() != prior.dim())
        throw DimensionError("pm_mh_step: state has wrong dimension");
    check_proposal(scales, current.theta.size());

    StepResult out;
    out.state = current;
    out.log_ratio = kNegInf;

    Rng move(iter_stream.child(kMoveRng));
    const ParameterVector prop = propose(current.theta, scales, move);

    const double lp_prop = prior.logpdf(prop);
    if (lp_prop == kNegInf) return out;  // likelihood untouched

    out.evaluated = true;
    const double ll_prop = target(prop, iter_stream.child(kLikelihood));
    if (!usable_loglik(ll_prop)) return out;

    const double lp_cur = prior.logpdf(current.theta);
    out.log_ratio = (lp_prop + ll_prop) - (lp_cur + current.retained_loglik);
    const double u = move.uniform();
    if (std::log(u) < out.log_ratio) {
        out.accepted = true;
        out.state.theta = prop;
        out.state.retained_loglik = ll_prop;
    }
    return out;
}

double Trace::acceptance_rate() const {
    if (accepted.empty()) return 0.0;
    double s = 0.0;
    for (unsigned char a : accepted) s += a ? 1.0 : 0.0;
    return s / static_cast<double>(accepted.size());
}

namespace {

// Shared between the plain and robust runners: find a start point with a
// finite posterior estimate, trying `init` first and prior draws after.
template <class EvalInit>
ChainState initialize_chain(const ParameterVector& init,
                            const Prior& prior,
                            const SeedStream& init_stream,
                            EvalInit&& eval) {
    for (int k = 0; k < kInitAttempts; ++k) {
        ParameterVector theta =
            k == 0 ? init : prior.sample(init_stream.child(2 * static_cast<std::uint64_t>(k)));
        if (theta.size() != prior.dim())
            throw DimensionError("chain init has wrong dimension");
        if (prior.logpdf(theta) == kNegInf) continue;
        ChainState state =
            eval(theta, init_stream.child(2 * static_cast<std::uint64_t>(k) + 1));
        if (usable_loglik(state.retained_loglik)) return state;
    }
    throw InitializationError(
        "no start point with finite posterior density after 10 attempts");
}

struct AdaptState {
    double log_factor = 0.0;

    void update(const ProposalConfig& cfg, long t, bool accepted) {
        const double step =
            cfg.learn_c / std::pow(static_cast<double>(t) + 1.0, cfg.decay);
        log_factor += step * ((accepted ? 1.0 : 0.0) - cfg.target_accept);
    }
};

void check_run_args(int iterations, int burn_in, const ProposalConfig& proposal,
                    const Prior& prior) {
    if (iterations < 0 || burn_in < 0)
        throw InvalidArgumentError("iterations and burn_in must be >= 0");
    check_proposal(proposal.scales, prior.dim());
}

}  // namespace

Trace run_chain(const ParameterVector& init,
                int iterations,
                int burn_in,
                const LogLikEvaluator& target,
                const Prior& prior,
                const ProposalConfig& proposal,
                const SeedStream& chain_stream) {
    check_run_args(iterations, burn_in, proposal, prior);

    const ChainState state = initialize_chain(
        init, prior, chain_stream.child(kInitBranch),
        [&](const ParameterVector& theta, const SeedStream& s) {
            ChainState st;
            st.theta = theta;
            st.retained_loglik = target(theta, s);
            return st;
        });
    return run_chain_from(state, iterations, burn_in, target, prior, proposal,
                          chain_stream);
}

Trace run_chain_from(const ChainState& start,
                     int iterations,
                     int burn_in,
                     const LogLikEvaluator& target,
                     const Prior& prior,
                     const ProposalConfig& proposal,
                     const SeedStream& chain_stream) {
    check_run_args(iterations, burn_in, proposal, prior);
    if (start.theta.size() != prior.dim())
        throw DimensionError("run_chain_from: start has wrong dimension");

    ChainState state = start;
    Trace trace;
    trace.burn_in = burn_in;
    trace.thetas.reserve(static_cast<size_t>(iterations));
    trace.logliks.reserve(static_cast<size_t>(iterations));
    trace.accepted.reserve(static_cast<size_t>(iterations));

    AdaptState adapt;
    const SeedStream iters = chain_stream.child(kIterBranch);
    const long total = static_cast<long>(burn_in) + iterations;
    for (long t = 0; t < total; ++t) {
        const Vector scales = proposal.scales * std::exp(adapt.log_factor);
        const StepResult r =
            pm_mh_step(state, target, prior, scales,
                       iters.child(static_cast<std::uint64_t>(t)));
        state = r.state;
        if (proposal.adapt && t < burn_in) adapt.update(proposal, t, r.accepted);
        if (t >= burn_in) {
            trace.thetas.push_back(state.theta);
            trace.logliks.push_back(state.retained_loglik);
            trace.accepted.push_back(r.accepted ? 1 : 0);
        }
    }
    return trace;
}

StepResult rbsl_step(const ChainState& current,
                     const SimulatorModel& model,
                     const SummaryVector& observed,
                     const RbslConfig& config,
                     const Prior& prior,
                     const Vector& scales,
                     const SeedStream& iter_stream,
                     int threads) {
    if (!current.retained_moments)
        throw InvalidArgumentError("rbsl_step: state has no retained moments");
    if (current.theta.size() != prior.dim())
        throw DimensionError("rbsl_step: state has wrong dimension");
    if (observed.size() != model.summary_dim() ||
        current.adjustment.size() != model.summary_dim())
        throw DimensionError("rbsl_step: summary dimension mismatch");
    if (config.m < 2) throw InvalidArgumentError("rbsl_step: m must be >= 2");
    if (!(config.lambda > 0.0) || !(config.adjustment_step > 0.0))
        throw InvalidArgumentError("rbsl_step: lambda and adjustment_step must be > 0");
    check_proposal(scales, current.theta.size());

    StepResult out;
    out.state = current;
    out.log_ratio = kNegInf;

    Rng move(iter_stream.child(kMoveRng));
    const ParameterVector prop = propose(current.theta, scales, move);
    const double lp_prop = prior.logpdf(prop);

    if (lp_prop > kNegInf) {
        out.evaluated = true;
        bool ok = true;
        MomentEstimate moments;
        double ll_prop = kNegInf;
        try {
            const auto sims = simulate_batch(model, prop, config.m,
                                             iter_stream.child(kLikelihood), threads);
            moments = estimate_moments(sims);
            ll_prop = adjusted_loglik(moments, observed, current.adjustment);
        } catch (const SimulatorError&) {
            ok = false;
        } catch (const NonPositiveDefiniteError&) {
            ok = false;
        }
        if (ok && usable_loglik(ll_prop)) {
            const double lp_cur = prior.logpdf(current.theta);
            out.log_ratio = (lp_prop + ll_prop) - (lp_cur + current.retained_loglik);
            const double u = move.uniform();
            if (std::log(u) < out.log_ratio) {
                out.accepted = true;
                out.state.theta = prop;
                out.state.retained_loglik = ll_prop;
                out.state.retained_moments = std::move(moments);
            }
        }
    }

    // Component-wise adjustment sweep against the retained batch; no new
    // simulations, so misfit gets soaked up by the adjustment instead of by
    // extra simulator spend.
    ChainState& st = out.state;
    Rng arng(iter_stream.child(kAdjustmentRng));
    for (Eigen::Index j = 0; j < st.adjustment.size(); ++j) {
        const double z = arng.normal();
        const double u = arng.uniform();
        Vector cand = st.adjustment;
        cand[j] += config.adjustment_step * z;
        double ll_cand;
        try {
            ll_cand = adjusted_loglik(*st.retained_moments, observed, cand);
        } catch (const NonPositiveDefiniteError&) {
            continue;
        }
        if (!usable_loglik(ll_cand)) continue;
        const double lr = (ll_cand - st.retained_loglik) +
                          laplace_logpdf(cand[j], config.lambda) -
                          laplace_logpdf(st.adjustment[j], config.lambda);
        if (std::log(u) < lr) {
            st.adjustment = std::move(cand);
            st.retained_loglik = ll_cand;
        }
    }
    return out;
}

Trace run_rbsl_chain(const ParameterVector& init,
                     int iterations,
                     int burn_in,
                     const SimulatorModel& model,
                     const SummaryVector& observed,
                     const RbslConfig& config,
                     const Prior& prior,
                     const ProposalConfig& proposal,
                     const SeedStream& chain_stream,
                     int threads) {
    check_run_args(iterations, burn_in, proposal, prior);
    if (observed.size() != model.summary_dim())
        throw DimensionError("run_rbsl_chain: observed has wrong dimension");

    const Vector zero_adjustment = Vector::Zero(model.summary_dim());
    ChainState state = initialize_chain(
        init, prior, chain_stream.child(kInitBranch),
        [&](const ParameterVector& theta, const SeedStream& s) {
            ChainState st;
            st.theta = theta;
            st.adjustment = zero_adjustment;
            try {
                const auto sims = simulate_batch(model, theta, config.m, s, threads);
                st.retained_moments = estimate_moments(sims);
                st.retained_loglik =
                    adjusted_loglik(*st.retained_moments, observed, st.adjustment);
            } catch (const SimulatorError&) {
                st.retained_loglik = kNegInf;
            } catch (const NonPositiveDefiniteError&) {
                st.retained_loglik = kNegInf;
            }
            return st;
        });

    Trace trace;
    trace.burn_in = burn_in;
    trace.thetas.reserve(static_cast<size_t>(iterations));
    trace.logliks.reserve(static_cast<size_t>(iterations));
    trace.accepted.reserve(static_cast<size_t>(iterations));
    trace.adjustments.reserve(static_cast<size_t>(iterations));

    AdaptState adapt;
    const SeedStream iters = chain_stream.child(kIterBranch);
    const long total = static_cast<long>(burn_in) + iterations;
    for (long t = 0; t < total; ++t) {
        const Vector scales = proposal.scales * std::exp(adapt.log_factor);
        const StepResult r =
            rbsl_step(state, model, observed, config, prior, scales,
                      iters.child(static_cast<std::uint64_t>(t)), threads);
        state = r.state;
        if (proposal.adapt && t < burn_in) adapt.update(proposal, t, r.accepted);
        if (t >= burn_in) {
            trace.thetas.push_back(state.theta);
            trace.logliks.push_back(state.retained_loglik);
            trace.accepted.push_back(r.accepted ? 1 : 0);
            trace.adjustments.push_back(state.adjustment);
        }
    }
    return trace;
}

}  // namespace bsl
