#pragma once

#include <vector>

#include "bsl/mcmc.hpp"
#include "bsl/prior.hpp"
#include "bsl/simulator.hpp"
#include "bsl/types.hpp"

namespace bsl {

// Kernel likelihood settings.  epsilon is the bandwidth, m the number of
// simulations averaged per estimate (1 reproduces the classic hit-or-miss
// sampler).  Mahalanobis distance needs a pilot covariance of the summaries.
struct AbcKernelConfig {
    enum class Kernel { Uniform, Gaussian };
    enum class Distance { Euclidean, Mahalanobis };

    Kernel kernel = Kernel::Gaussian;
    double epsilon = 1.0;
    int m = 1;
    Distance distance = Distance::Euclidean;
    Matrix pilot_cov;  // used only for Mahalanobis

    void validate(int summary_dim) const;
};

double summary_distance(const SummaryVector& a, const SummaryVector& b,
                        const AbcKernelConfig& config);

// Kernel likelihood estimate: mean over the batch of K_eps(distance).
// Uniform kernel counts hits, so the estimate times the batch size is an
// integer; both kernels go to 1 as epsilon grows.
double abc_kernel_estimate(const SummaryVector& observed,
                           const std::vector<SummaryVector>& simulated,
                           const AbcKernelConfig& config);

// log of the same estimate, computed stably (exact even when individual
// Gaussian kernel values underflow).  -inf when the estimate is zero.
double abc_kernel_log_estimate(const SummaryVector& observed,
                               const std::vector<SummaryVector>& simulated,
                               const AbcKernelConfig& config);

// Prior-predictive reference draws with their distances to the observed
// summary.
struct ReferenceTable {
    std::vector<ParameterVector> thetas;
    std::vector<SummaryVector> summaries;
    std::vector<double> distances;
};

struct RejectionResult {
    std::vector<ParameterVector> accepted;
    double epsilon = 0.0;  // realized tolerance: the kept set's largest distance
    ReferenceTable table;
};

// Rejection sampler: `budget` prior draws, one summary each, keep the
// ceil(quantile * budget) closest.  The kernel field of `config` is ignored
// here; only the distance definition matters.
RejectionResult abc_rejection(const SimulatorModel& model,
                              const Prior& prior,
                              const SummaryVector& observed,
                              int budget,
                              double quantile,
                              const AbcKernelConfig& config,
                              const SeedStream& stream,
                              int threads = 1);

// Summary covariance from a pilot batch at theta0, for the Mahalanobis
// distance.
Matrix abc_pilot_covariance(const SimulatorModel& model,
                            const ParameterVector& theta0,
                            int budget,
                            const SeedStream& stream,
                            int threads = 1);

// Sampler target returning the log kernel estimate from m fresh draws per
// call.  Simulator failures become -inf.  `model` must outlive the result.
LogLikEvaluator make_abc_target(const SimulatorModel& model,
                                SummaryVector observed,
                                AbcKernelConfig config,
                                int threads = 1);

// Pseudo-marginal MH step with the kernel estimate as likelihood: same
// accept rule and retention discipline as the synthetic-likelihood chain.
StepResult abc_mcmc_step(const ChainState& current,
                         const SimulatorModel& model,
                         const Prior& prior,
                         const SummaryVector& observed,
                         const AbcKernelConfig& config,
                         const Vector& scales,
                         const SeedStream& iter_stream,
                         int threads = 1);

}  // namespace bsl
