#include "bsl/synthetic_likelihood.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "bsl/errors.hpp"

namespace bsl {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;
constexpr double kJitterScale = 1e-10;

// Cholesky with the one-shot jitter retry used everywhere a covariance
// estimate gets factorized.
Eigen::LLT<Matrix> chol_spd(const Matrix& cov) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) return llt;
    const double jitter = kJitterScale * cov.diagonal().mean();
    Matrix bumped = cov;
    bumped.diagonal().array() += jitter;
    Eigen::LLT<Matrix> retry(bumped);
    if (retry.info() == Eigen::Success) return retry;
    throw NonPositiveDefiniteError(
        "covariance factorization failed after jitter retry");
}

}  // namespace

MomentEstimate estimate_moments(const std::vector<SummaryVector>& summaries) {
    const int m = static_cast<int>(summaries.size());
    if (m < 2) throw InvalidArgumentError("estimate_moments: need at least 2 draws");
    const Eigen::Index d = summaries[0].size();
    for (const auto& s : summaries)
        if (s.size() != d)
            throw DimensionError("estimate_moments: summaries have mixed lengths");

    SummaryVector mean = SummaryVector::Zero(d);
    for (const auto& s : summaries) mean += s;
    mean /= static_cast<double>(m);

    Matrix cov = Matrix::Zero(d, d);
    for (const auto& s : summaries) {
        const SummaryVector c = s - mean;
        cov.noalias() += c * c.transpose();
    }
    cov /= static_cast<double>(m - 1);
    cov = 0.5 * (cov + cov.transpose()).eval();  // kill rounding asymmetry
    return MomentEstimate{std::move(mean), std::move(cov), m};
}

double gaussian_logpdf(const SummaryVector& x, const MomentEstimate& est) {
    const Eigen::Index d = est.mean.size();
    if (x.size() != d || est.cov.rows() != d || est.cov.cols() != d)
        throw DimensionError("gaussian_logpdf: dimension mismatch");

    const Eigen::LLT<Matrix> llt = chol_spd(est.cov);
    const Matrix l = llt.matrixL();
    const Vector y = l.triangularView<Eigen::Lower>().solve(x - est.mean);
    const double quad = y.squaredNorm();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    return -0.5 * (static_cast<double>(d) * kLogTwoPi + log_det + quad);
}

Matrix shrink_covariance(const Matrix& cov, double gamma) {
    if (cov.rows() != cov.cols())
        throw DimensionError("shrink_covariance: matrix must be square");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw InvalidArgumentError("shrink_covariance: gamma must be in [0, 1]");
    Matrix out = gamma * cov;
    out.diagonal() = cov.diagonal();
    return out;
}

WhiteningTransform fit_whitening(const SimulatorModel& model,
                                 const ParameterVector& theta0,
                                 int m0,
                                 const SeedStream& stream,
                                 int threads) {
    if (m0 < model.summary_dim() + 2)
        throw InvalidArgumentError("fit_whitening: m0 must be >= summary_dim + 2");
    const auto sims = simulate_batch(model, theta0, m0, stream, threads);
    const MomentEstimate est = estimate_moments(sims);
    const Eigen::LLT<Matrix> llt = chol_spd(est.cov);
    const Matrix l = llt.matrixL();
    const Eigen::Index d = l.rows();
    const Matrix w = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
    const double log_det_w = -l.diagonal().array().log().sum();
    return WhiteningTransform{w, theta0, m0, log_det_w};
}

SummaryVector apply_whitening(const WhiteningTransform& t, const SummaryVector& s) {
    if (s.size() != t.w.cols())
        throw DimensionError("apply_whitening: summary has wrong dimension");
    return t.w * s;
}

EstimatorConfig EstimatorConfig::standard() { return EstimatorConfig{}; }

EstimatorConfig EstimatorConfig::shrinkage(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw InvalidArgumentError("shrinkage gamma must be in [0, 1]");
    return EstimatorConfig{Kind::Shrinkage, gamma, std::nullopt};
}

EstimatorConfig EstimatorConfig::whitened(WhiteningTransform t, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw InvalidArgumentError("whitened gamma must be in [0, 1]");
    return EstimatorConfig{Kind::Whitened, gamma, std::move(t)};
}

double synthetic_loglik(const SimulatorModel& model,
                        const ParameterVector& theta,
                        const SummaryVector& observed,
                        int m,
                        const EstimatorConfig& config,
                        const SeedStream& stream,
                        int threads) {
    if (observed.size() != model.summary_dim())
        throw DimensionError("synthetic_loglik: observed has wrong dimension");
    if (m < 2) throw InvalidArgumentError("synthetic_loglik: m must be >= 2");
    if (config.kind == EstimatorConfig::Kind::Whitened && !config.whitening)
        throw InvalidArgumentError("synthetic_loglik: whitened config lacks transform");

    std::vector<SummaryVector> sims = simulate_batch(model, theta, m, stream, threads);
    SummaryVector obs = observed;
    if (config.kind == EstimatorConfig::Kind::Whitened) {
        for (auto& s : sims) s = apply_whitening(*config.whitening, s);
        obs = apply_whitening(*config.whitening, obs);
    }
    MomentEstimate est = estimate_moments(sims);
    if (config.kind != EstimatorConfig::Kind::Standard)
        est.cov = shrink_covariance(est.cov, config.gamma);
    double ll = gaussian_logpdf(obs, est);
    // report whitened densities in the original summary coordinates; the
    // offset is theta-free so chains are unaffected, but logliks stay
    // comparable across estimators
    if (config.kind == EstimatorConfig::Kind::Whitened)
        ll += config.whitening->log_det_w;
    return ll;
}

LogLikEvaluator make_bsl_target(const SimulatorModel& model,
                                SummaryVector observed,
                                int m,
                                EstimatorConfig config,
                                int threads) {
    return [&model, observed = std::move(observed), m, config = std::move(config),
            threads](const ParameterVector& theta, const SeedStream& stream) {
        try {
            return synthetic_loglik(model, theta, observed, m, config, stream, threads);
        } catch (const SimulatorError&) {
            return -std::numeric_limits<double>::infinity();
        } catch (const NonPositiveDefiniteError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
}

double adjusted_loglik(const MomentEstimate& est,
                       const SummaryVector& observed,
                       const Vector& adjustment) {
    const Eigen::Index d = est.mean.size();
    if (observed.size() != d || adjustment.size() != d)
        throw DimensionError("adjusted_loglik: dimension mismatch");
    if (!all_finite(adjustment))
        throw InvalidArgumentError("adjusted_loglik: non-finite adjustment");
    MomentEstimate shifted = est;
    shifted.mean += est.cov.diagonal().array().sqrt().matrix().cwiseProduct(adjustment);
    return gaussian_logpdf(observed, shifted);
}

}  // namespace bsl
