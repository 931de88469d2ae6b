#pragma once

#include <optional>
#include <vector>

#include "bsl/simulator.hpp"
#include "bsl/types.hpp"

namespace bsl {

// Sample mean and covariance of a batch of summaries.
struct MomentEstimate {
    SummaryVector mean;
    Matrix cov;
    int sample_count = 0;
};

// Mean divides by M once; covariance divides the centered outer products by
// M - 1 and is exactly symmetric.  Needs M >= 2 and equal-length summaries.
MomentEstimate estimate_moments(const std::vector<SummaryVector>& summaries);

// log N(x; mean, cov) via Cholesky.  If the factorization fails, adds
// 1e-10 * mean(diag) to the diagonal and retries once; a second failure
// raises NonPositiveDefiniteError.
double gaussian_logpdf(const SummaryVector& x, const MomentEstimate& est);

// Covariance shrinkage toward the diagonal: keeps the diagonal exactly and
// scales every off-diagonal entry by gamma in [0, 1].  Equivalent to
// D^{1/2} (gamma * R + (1 - gamma) * I) D^{1/2} for correlation R, but
// without the round trip through correlation space.
Matrix shrink_covariance(const Matrix& cov, double gamma);

// Linear map W = L^{-1} with L the lower Cholesky factor of a pilot
// covariance estimated once at theta0, so W cov W^T is the identity up to
// Monte Carlo error.  log_det_w = log|det W|; the whitened evaluator adds
// it back so reported log-likelihoods live in the original coordinates.
struct WhiteningTransform {
    Matrix w;
    ParameterVector theta0;
    int sample_count = 0;
    double log_det_w = 0.0;
};

// Estimates the pilot covariance from m0 fresh draws at theta0 (m0 must be
// at least summary_dim + 2) and inverts its Cholesky factor.
WhiteningTransform fit_whitening(const SimulatorModel& model,
                                 const ParameterVector& theta0,
                                 int m0,
                                 const SeedStream& stream,
                                 int threads = 1);

SummaryVector apply_whitening(const WhiteningTransform& t, const SummaryVector& s);

// Which covariance estimator the synthetic likelihood uses.
struct EstimatorConfig {
    enum class Kind { Standard, Shrinkage, Whitened };

    Kind kind = Kind::Standard;
    double gamma = 1.0;
    std::optional<WhiteningTransform> whitening;

    static EstimatorConfig standard();
    static EstimatorConfig shrinkage(double gamma);
    static EstimatorConfig whitened(WhiteningTransform t, double gamma);
};

// One noisy log synthetic likelihood value: a fresh batch of m draws at
// theta (seeded from `stream`), moment estimates, then a Gaussian logpdf of
// the observed summary.  Every call simulates; there is no caching here.
double synthetic_loglik(const SimulatorModel& model,
                        const ParameterVector& theta,
                        const SummaryVector& observed,
                        int m,
                        const EstimatorConfig& config,
                        const SeedStream& stream,
                        int threads = 1);

// Mean-adjusted variant: log N(observed; mean + sd .* adjustment, cov) with
// sd the square roots of the covariance diagonal.  Reuses moments already in
// hand; simulates nothing.
double adjusted_loglik(const MomentEstimate& est,
                       const SummaryVector& observed,
                       const Vector& adjustment);

// Wraps synthetic_loglik as a sampler target.  Simulator failures and
// non-positive-definite covariances become -inf (a rejected proposal);
// anything else propagates.  `model` must outlive the returned evaluator.
LogLikEvaluator make_bsl_target(const SimulatorModel& model,
                                SummaryVector observed,
                                int m,
                                EstimatorConfig config,
                                int threads = 1);

}  // namespace bsl
