#include <doctest.h>

#include <cmath>
#include <vector>

#include "bsl/errors.hpp"
#include "bsl/models.hpp"
#include "bsl/seed_stream.hpp"
#include "bsl/simulator.hpp"

#include "helpers/oracles.hpp"

namespace {

bsl::ParameterVector theta1(double v) {
    bsl::ParameterVector t(1);
    t[0] = v;
    return t;
}

bsl::ParameterVector theta2(double a, double b) {
    bsl::ParameterVector t(2);
    t[0] = a;
    t[1] = b;
    return t;
}

}  // namespace

TEST_CASE("toy summary obeys its sampling law") {
    bsl::GaussianToyConfig cfg;
    cfg.n = 100;
    cfg.sigma0 = 1.0;
    bsl::GaussianToyModel model(cfg);
    CHECK(model.summary_dim() == 1);
    CHECK(model.param_dim() == 1);
    CHECK(model.dataset_size() == 100);

    const int m = 20000;
    const auto batch =
        bsl::simulate_batch(model, theta1(0.4), m, bsl::SeedStream(10));
    std::vector<double> xs(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) xs[i] = batch[i][0];
    // mean summary ~ N(theta, sigma0^2/n): batch mean se = sigma0/sqrt(n m)
    const double se = cfg.sigma0 / std::sqrt(static_cast<double>(cfg.n) * m);
    CHECK(std::abs(oracle::mean1(xs) - 0.4) < 3.0 * se);
    CHECK(oracle::var1(xs) ==
          doctest::Approx(cfg.sigma0 * cfg.sigma0 / cfg.n).epsilon(0.05));
}

TEST_CASE("toy coordinate summaries are independent replicates") {
    bsl::GaussianToyConfig cfg;
    cfg.n = 25;
    cfg.coords = 3;
    bsl::GaussianToyModel model(cfg);
    CHECK(model.summary_dim() == 3);

    const auto batch =
        bsl::simulate_batch(model, theta1(-1.2), 5000, bsl::SeedStream(11));
    for (int j = 0; j < 3; ++j) {
        std::vector<double> xs(batch.size());
        for (size_t i = 0; i < batch.size(); ++i) xs[i] = batch[i][j];
        const double se = cfg.sigma0 / std::sqrt(25.0 * 5000.0);
        CHECK(std::abs(oracle::mean1(xs) - (-1.2)) < 4.0 * se);
    }
}

TEST_CASE("mean-logvar summary: ancillary second component") {
    bsl::GaussianToyConfig cfg;
    cfg.n = 200;
    cfg.summary = bsl::GaussianToyConfig::Summary::MeanLogVar;
    bsl::GaussianToyModel model(cfg);
    CHECK(model.summary_dim() == 2);

    const auto batch =
        bsl::simulate_batch(model, theta1(0.9), 4000, bsl::SeedStream(12));
    std::vector<double> means(batch.size()), vars(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
        means[i] = batch[i][0];
        vars[i] = std::exp(batch[i][1]);
    }
    CHECK(oracle::mean1(means) == doctest::Approx(0.9).epsilon(0.01));
    // E[s^2] = sigma0^2 regardless of theta
    CHECK(oracle::mean1(vars) == doctest::Approx(1.0).epsilon(0.02));

    bsl::GaussianToyConfig bad = cfg;
    bad.n = 1;
    CHECK_THROWS_AS(bsl::GaussianToyModel{bad}, bsl::InvalidArgumentError);
}

TEST_CASE("toy posterior closed form") {
    bsl::GaussianToyConfig cfg;
    cfg.n = 100;
    cfg.sigma0 = 1.0;
    cfg.prior_mean = 0.0;
    cfg.prior_sd = 1.0;

    const auto post = bsl::toy_partial_posterior(0.3, cfg);
    CHECK(post.mean == doctest::Approx(30.0 / 101.0).epsilon(1e-15));
    CHECK(post.sd == doctest::Approx(std::sqrt(1.0 / 101.0)).epsilon(1e-15));

    // independent oracle, different parameterization
    const auto ref = oracle::conjugate_posterior(0.25, 2.0, 1.5, 40, -0.6);
    bsl::GaussianToyConfig g;
    g.n = 40;
    g.sigma0 = 1.5;
    g.prior_mean = 0.25;
    g.prior_sd = 2.0;
    const auto got = bsl::toy_partial_posterior(-0.6, g);
    CHECK(got.mean == doctest::Approx(ref.mean).epsilon(1e-13));
    CHECK(got.sd == doctest::Approx(ref.sd).epsilon(1e-13));

    bsl::GaussianToyConfig multi = cfg;
    multi.coords = 2;
    CHECK_THROWS_AS(bsl::toy_partial_posterior(0.3, multi),
                    bsl::InvalidArgumentError);

    // the prior marginal the model reports matches the config
    bsl::GaussianToyModel model(cfg);
    CHECK(model.prior().dim() == 1);
    CHECK(model.prior().mean()[0] == cfg.prior_mean);
    CHECK(model.prior().sds()[0] == cfg.prior_sd);
}

TEST_CASE("ma2 population autocovariances") {
    const auto s = bsl::ma2_summary_mean(theta2(0.6, 0.2));
    CHECK(s[0] == doctest::Approx(1.4).epsilon(1e-15));
    CHECK(s[1] == doctest::Approx(0.72).epsilon(1e-15));
    CHECK(s[2] == doctest::Approx(0.2).epsilon(1e-15));

    // cross-check against the generic convolution oracle
    const auto o = oracle::ma2_autocov(0.6, 0.2);
    CHECK(s[0] == doctest::Approx(o[0]));
    CHECK(s[1] == doctest::Approx(o[1]));
    CHECK(s[2] == doctest::Approx(o[2]));

    CHECK_THROWS_AS(bsl::ma2_summary_mean(theta2(2.5, 0.0)),
                    bsl::InvalidArgumentError);
}

TEST_CASE("ma2 invertibility triangle") {
    CHECK(bsl::ma2_in_triangle(theta2(0.0, 0.0)));
    CHECK(bsl::ma2_in_triangle(theta2(0.6, 0.2)));
    CHECK(bsl::ma2_in_triangle(theta2(-1.9, 0.95)));
    // boundaries excluded
    CHECK(!bsl::ma2_in_triangle(theta2(0.0, 1.0)));
    CHECK(!bsl::ma2_in_triangle(theta2(0.0, -1.0)));
    CHECK(!bsl::ma2_in_triangle(theta2(2.0, 1.0)));
    CHECK(!bsl::ma2_in_triangle(theta2(1.5, -0.5)));   // t2 - t1 = -2
    CHECK(!bsl::ma2_in_triangle(theta2(-1.5, -0.5)));  // t2 + t1 = -2
    CHECK_THROWS_AS(bsl::ma2_in_triangle(theta1(0.0)), bsl::DimensionError);
}

TEST_CASE("ma2 batch mean matches the population summary") {
    bsl::Ma2Config cfg;
    cfg.n = 500;
    bsl::Ma2Model model(cfg);
    CHECK(model.summary_dim() == 3);

    const int m = 10000;
    const auto batch =
        bsl::simulate_batch(model, theta2(0.6, 0.2), m, bsl::SeedStream(13), 4);
    const auto want = bsl::ma2_summary_mean(theta2(0.6, 0.2));
    for (int j = 0; j < 3; ++j) {
        std::vector<double> xs(batch.size());
        for (size_t i = 0; i < batch.size(); ++i) xs[i] = batch[i][j];
        const double se = std::sqrt(oracle::var1(xs) / m);
        CHECK(std::abs(oracle::mean1(xs) - want[j]) < 3.5 * se);
    }
}

TEST_CASE("ma2 simulator refuses non-invertible parameters") {
    bsl::Ma2Model model(bsl::Ma2Config{100});
    CHECK_THROWS_AS(model.simulate_summary(theta2(0.0, 1.5), 1),
                    bsl::InvalidArgumentError);
    CHECK_THROWS_AS(model.simulate_summary(theta2(-2.1, 0.5), 1),
                    bsl::InvalidArgumentError);
    CHECK_THROWS_AS(bsl::Ma2Model{bsl::Ma2Config{2}}, bsl::InvalidArgumentError);

    // box prior is wider than the triangle on purpose
    const auto prior = model.prior();
    CHECK(prior.dim() == 2);
    CHECK(prior.logpdf(theta2(1.9, 0.99)) > -1e18);
}

TEST_CASE("contaminated model: variance summary carries the misfit") {
    bsl::ContaminatedNormalConfig cfg;
    cfg.n = 10000;
    cfg.sigma_true = 2.0;
    cfg.theta_true = 0.0;
    bsl::ContaminatedNormalModel model(cfg);
    CHECK(model.summary_dim() == 2);

    // observed draw follows the true generator: variance near sigma_true^2
    const auto obs = bsl::contaminated_observed(cfg, 424242);
    CHECK(std::abs(obs[1] - 4.0) < 0.25);
    CHECK(std::abs(obs[0]) < 0.1);

    // while the assumed model simulates at unit variance whatever theta is
    const auto batch =
        bsl::simulate_batch(model, theta1(0.0), 2000, bsl::SeedStream(14));
    std::vector<double> vars(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) vars[i] = batch[i][1];
    CHECK(oracle::mean1(vars) == doctest::Approx(1.0).epsilon(0.02));

    bsl::ContaminatedNormalConfig tiny;
    tiny.n = 1;
    CHECK_THROWS_AS((void)bsl::ContaminatedNormalModel(tiny),
                    bsl::InvalidArgumentError);
}

TEST_CASE("contaminated observed draw is seed-deterministic") {
    bsl::ContaminatedNormalConfig cfg;
    const auto a = bsl::contaminated_observed(cfg, 7);
    const auto b = bsl::contaminated_observed(cfg, 7);
    const auto c = bsl::contaminated_observed(cfg, 8);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
    CHECK(a[0] != c[0]);
}
