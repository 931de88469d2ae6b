#pragma once

#include "bsl/prior.hpp"
#include "bsl/simulator.hpp"
#include "bsl/types.hpp"

namespace bsl {

// Conjugate Gaussian toy: data y_i ~ N(theta, sigma0^2) with known sigma0
// and a normal prior on theta, so the posterior given the mean summary is
// available in closed form.  Summaries are either `coords` independent
// sample means (each over its own n draws) or the pair
// (sample mean, log sample variance); the log-variance component carries no
// information about theta, which keeps the oracle exact at d_s = 2.
struct GaussianToyConfig {
    enum class Summary { CoordMeans, MeanLogVar };

    int n = 100;
    double sigma0 = 1.0;
    double prior_mean = 0.0;
    double prior_sd = 1.0;
    Summary summary = Summary::CoordMeans;
    int coords = 1;  // CoordMeans only
};

class GaussianToyModel : public SimulatorModel {
public:
    explicit GaussianToyModel(GaussianToyConfig cfg);

    int param_dim() const override { return 1; }
    int summary_dim() const override;
    int dataset_size() const override { return cfg_.n; }
    SummaryVector simulate_summary(const ParameterVector& theta,
                                   std::uint64_t seed) const override;

    Prior prior() const;
    const GaussianToyConfig& config() const { return cfg_; }

private:
    GaussianToyConfig cfg_;
};

struct ToyPosterior {
    double mean = 0.0;
    double sd = 0.0;
};

// Exact posterior for theta given the observed mean summary.  Valid for the
// d_s = 1 summary and for the mean component of MeanLogVar, whose second
// component is ancillary.
ToyPosterior toy_partial_posterior(double observed_mean, const GaussianToyConfig& cfg);

// MA(2) series y_t = u_t + theta1 u_{t-1} + theta2 u_{t-2} with unit-variance
// innovations; summaries are the first three sample autocovariances, taken
// around zero with 1/(n-k) normalization so their expectation is exactly the
// population value at every n.
struct Ma2Config {
    int n = 500;
};

class Ma2Model : public SimulatorModel {
public:
    explicit Ma2Model(Ma2Config cfg);

    int param_dim() const override { return 2; }
    int summary_dim() const override { return 3; }
    int dataset_size() const override { return cfg_.n; }

    // Requires theta inside the invertibility triangle; this keeps chains
    // confined to identifiable parameters even under a box prior.
    SummaryVector simulate_summary(const ParameterVector& theta,
                                   std::uint64_t seed) const override;

    Prior prior() const;  // box prior; the triangle is enforced by the simulator
    const Ma2Config& config() const { return cfg_; }

private:
    Ma2Config cfg_;
};

bool ma2_in_triangle(const ParameterVector& theta);

// Population autocovariances (1 + t1^2 + t2^2, t1 + t1 t2, t2); throws
// outside the triangle.
SummaryVector ma2_summary_mean(const ParameterVector& theta);

// Misspecification demo: the simulator assumes y ~ N(theta, 1) while the
// observed data actually come from N(theta_true, sigma_true^2).  Summaries
// are (sample mean, sample variance), so contamination enters through the
// variance summary only when sigma_true != 1.
struct ContaminatedNormalConfig {
    int n = 100;
    double sigma_true = 2.0;
    double theta_true = 0.0;
    double prior_mean = 0.0;
    double prior_sd = 5.0;
};

class ContaminatedNormalModel : public SimulatorModel {
public:
    explicit ContaminatedNormalModel(ContaminatedNormalConfig cfg);

    int param_dim() const override { return 1; }
    int summary_dim() const override { return 2; }
    int dataset_size() const override { return cfg_.n; }

    // Assumed model: unit variance, whatever sigma_true says.
    SummaryVector simulate_summary(const ParameterVector& theta,
                                   std::uint64_t seed) const override;

    Prior prior() const;
    const ContaminatedNormalConfig& config() const { return cfg_; }

private:
    ContaminatedNormalConfig cfg_;
};

// Observed summary drawn from the TRUE generator N(theta_true, sigma_true^2).
SummaryVector contaminated_observed(const ContaminatedNormalConfig& cfg,
                                    std::uint64_t seed);

}  // namespace bsl
