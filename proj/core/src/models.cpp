#include "bsl/models.hpp"

#include <cmath>

#include "bsl/errors.hpp"

namespace bsl {

GaussianToyModel::GaussianToyModel(GaussianToyConfig cfg) : cfg_(cfg) {
    if (cfg_.n < 1) throw InvalidArgumentError("gaussian_toy: n must be >= 1");
    if (cfg_.summary == GaussianToyConfig::Summary::MeanLogVar && cfg_.n < 2)
        throw InvalidArgumentError("gaussian_toy: log-variance summary needs n >= 2");
    if (!(cfg_.sigma0 > 0.0)) throw InvalidArgumentError("gaussian_toy: sigma0 must be > 0");
    if (!(cfg_.prior_sd > 0.0)) throw InvalidArgumentError("gaussian_toy: prior sd must be > 0");
    if (cfg_.coords < 1) throw InvalidArgumentError("gaussian_toy: coords must be >= 1");
}

int GaussianToyModel::summary_dim() const {
    return cfg_.summary == GaussianToyConfig::Summary::MeanLogVar ? 2 : cfg_.coords;
}

// Summary components are drawn from their exact sampling distributions
// (mean ~ N(theta, sigma0^2/n), sample variance ~ sigma0^2 chi2_{n-1}/(n-1),
// independent for Gaussian data), so one draw costs O(d_s) whatever n is.
SummaryVector GaussianToyModel::simulate_summary(const ParameterVector& theta,
                                                 std::uint64_t seed) const {
    if (theta.size() != 1) throw DimensionError("gaussian_toy: theta must be scalar");
    Rng rng(seed);
    const double mean_sd = cfg_.sigma0 / std::sqrt(static_cast<double>(cfg_.n));
    SummaryVector s(summary_dim());
    if (cfg_.summary == GaussianToyConfig::Summary::MeanLogVar) {
        s[0] = theta[0] + mean_sd * rng.normal();
        const double chi2 = rng.chi_squared(static_cast<double>(cfg_.n - 1));
        s[1] = std::log(cfg_.sigma0 * cfg_.sigma0 * chi2 /
                        static_cast<double>(cfg_.n - 1));
    } else {
        for (int i = 0; i < cfg_.coords; ++i)
            s[i] = theta[0] + mean_sd * rng.normal();
    }
    return s;
}

Prior GaussianToyModel::prior() const {
    return Prior({PriorMarginal::normal(cfg_.prior_mean, cfg_.prior_sd)});
}

ToyPosterior toy_partial_posterior(double observed_mean, const GaussianToyConfig& cfg) {
    if (cfg.summary == GaussianToyConfig::Summary::CoordMeans && cfg.coords != 1)
        throw InvalidArgumentError(
            "toy_partial_posterior: needs the single-mean summary");
    const double prior_prec = 1.0 / (cfg.prior_sd * cfg.prior_sd);
    const double data_prec =
        static_cast<double>(cfg.n) / (cfg.sigma0 * cfg.sigma0);
    const double var = 1.0 / (prior_prec + data_prec);
    const double mean = var * (cfg.prior_mean * prior_prec + observed_mean * data_prec);
    return ToyPosterior{mean, std::sqrt(var)};
}

Ma2Model::Ma2Model(Ma2Config cfg) : cfg_(cfg) {
    if (cfg_.n < 3) throw InvalidArgumentError("ma2: n must be >= 3");
}

bool ma2_in_triangle(const ParameterVector& theta) {
    if (theta.size() != 2) throw DimensionError("ma2: theta must have 2 components");
    const double t1 = theta[0];
    const double t2 = theta[1];
    return t2 > -1.0 && t2 < 1.0 && t2 + t1 > -1.0 && t2 - t1 > -1.0;
}

SummaryVector Ma2Model::simulate_summary(const ParameterVector& theta,
                                         std::uint64_t seed) const {
    if (!ma2_in_triangle(theta))
        throw InvalidArgumentError("ma2: theta outside the invertibility triangle");
    Rng rng(seed);
    const int n = cfg_.n;
    std::vector<double> u(static_cast<size_t>(n) + 2);
    for (auto& v : u) v = rng.normal();
    std::vector<double> y(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t)
        y[static_cast<size_t>(t)] = u[static_cast<size_t>(t) + 2] +
                                    theta[0] * u[static_cast<size_t>(t) + 1] +
                                    theta[1] * u[static_cast<size_t>(t)];
    // autocovariances around zero with 1/(n-k): unbiased for the population
    // values at every n, which is what makes the batch-mean oracle exact
    SummaryVector s(3);
    for (int k = 0; k <= 2; ++k) {
        double acc = 0.0;
        for (int t = 0; t + k < n; ++t)
            acc += y[static_cast<size_t>(t)] * y[static_cast<size_t>(t + k)];
        s[k] = acc / static_cast<double>(n - k);
    }
    return s;
}

Prior Ma2Model::prior() const {
    return Prior({PriorMarginal::uniform(-2.0, 2.0), PriorMarginal::uniform(-1.0, 1.0)});
}

SummaryVector ma2_summary_mean(const ParameterVector& theta) {
    if (!ma2_in_triangle(theta))
        throw InvalidArgumentError("ma2_summary_mean: theta outside the triangle");
    const double t1 = theta[0];
    const double t2 = theta[1];
    SummaryVector s(3);
    s[0] = 1.0 + t1 * t1 + t2 * t2;
    s[1] = t1 + t1 * t2;
    s[2] = t2;
    return s;
}

ContaminatedNormalModel::ContaminatedNormalModel(ContaminatedNormalConfig cfg)
    : cfg_(cfg) {
    if (cfg_.n < 2) throw InvalidArgumentError("contaminated_normal: n must be >= 2");
    if (!(cfg_.sigma_true > 0.0))
        throw InvalidArgumentError("contaminated_normal: sigma_true must be > 0");
    if (!(cfg_.prior_sd > 0.0))
        throw InvalidArgumentError("contaminated_normal: prior sd must be > 0");
}

namespace {

// (sample mean, sample variance) of n Gaussian draws, via the exact joint
// law of the two statistics.
SummaryVector mean_var_summary(double mu, double sigma, int n, std::uint64_t seed) {
    Rng rng(seed);
    SummaryVector s(2);
    s[0] = mu + sigma / std::sqrt(static_cast<double>(n)) * rng.normal();
    s[1] = sigma * sigma * rng.chi_squared(static_cast<double>(n - 1)) /
           static_cast<double>(n - 1);
    return s;
}

}  // namespace

SummaryVector ContaminatedNormalModel::simulate_summary(const ParameterVector& theta,
                                                        std::uint64_t seed) const {
    if (theta.size() != 1)
        throw DimensionError("contaminated_normal: theta must be scalar");
    return mean_var_summary(theta[0], 1.0, cfg_.n, seed);
}

Prior ContaminatedNormalModel::prior() const {
    return Prior({PriorMarginal::normal(cfg_.prior_mean, cfg_.prior_sd)});
}

SummaryVector contaminated_observed(const ContaminatedNormalConfig& cfg,
                                    std::uint64_t seed) {
    return mean_var_summary(cfg.theta_true, cfg.sigma_true, cfg.n, seed);
}

}  // namespace bsl
