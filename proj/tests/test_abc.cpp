#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "bsl/abc.hpp"
#include "bsl/errors.hpp"
#include "bsl/models.hpp"
#include "helpers/oracles.hpp"

using bsl::AbcKernelConfig;
using bsl::Matrix;
using bsl::ParameterVector;
using bsl::Prior;
using bsl::PriorMarginal;
using bsl::SeedStream;
using bsl::SummaryVector;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

SummaryVector vec1(double v) {
    SummaryVector s(1);
    s << v;
    return s;
}

}  // namespace

TEST_CASE("gaussian kernel estimate reproduces the worked example") {
    AbcKernelConfig cfg;
    cfg.kernel = AbcKernelConfig::Kernel::Gaussian;
    cfg.epsilon = 1.0;
    cfg.m = 2;
    const std::vector<SummaryVector> sims{vec1(1.0), vec1(2.0)};
    const double expect = (std::exp(-0.5) + std::exp(-2.0)) / 2.0;
    CHECK(bsl::abc_kernel_estimate(vec1(0.0), sims, cfg) ==
          doctest::Approx(expect).epsilon(1e-14));
    CHECK(expect == doctest::Approx(0.3709).epsilon(1e-3));
    CHECK(bsl::abc_kernel_log_estimate(vec1(0.0), sims, cfg) ==
          doctest::Approx(std::log(expect)).epsilon(1e-13));
}

TEST_CASE("uniform kernel estimates are hit fractions") {
    AbcKernelConfig cfg;
    cfg.kernel = AbcKernelConfig::Kernel::Uniform;
    cfg.epsilon = 1.0;
    cfg.m = 4;
    const std::vector<SummaryVector> sims{vec1(0.5), vec1(0.99), vec1(1.0),
                                          vec1(1.01)};
    const double est = bsl::abc_kernel_estimate(vec1(0.0), sims, cfg);
    CHECK(est == doctest::Approx(0.75).epsilon(1e-15));
    const double scaled = est * 4.0;
    CHECK(scaled == std::round(scaled));

    // no hits: zero estimate, -inf log
    const std::vector<SummaryVector> far{vec1(5.0), vec1(-7.0)};
    CHECK(bsl::abc_kernel_estimate(vec1(0.0), far, cfg) == 0.0);
    CHECK(bsl::abc_kernel_log_estimate(vec1(0.0), far, cfg) == -kInf);
}

TEST_CASE("both kernels saturate to one as epsilon grows") {
    const std::vector<SummaryVector> sims{vec1(0.3), vec1(-1.2), vec1(4.0)};
    for (auto kernel : {AbcKernelConfig::Kernel::Uniform,
                        AbcKernelConfig::Kernel::Gaussian}) {
        AbcKernelConfig cfg;
        cfg.kernel = kernel;
        cfg.epsilon = 1e9;
        cfg.m = 3;
        CHECK(bsl::abc_kernel_estimate(vec1(0.0), sims, cfg) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("log estimate stays exact when kernel values underflow") {
    AbcKernelConfig cfg;
    cfg.kernel = AbcKernelConfig::Kernel::Gaussian;
    cfg.epsilon = 1.0;
    cfg.m = 2;
    // exp(-0.5 * 60^2) underflows to zero in double precision
    const std::vector<SummaryVector> sims{vec1(60.0), vec1(61.0)};
    CHECK(bsl::abc_kernel_estimate(vec1(0.0), sims, cfg) == 0.0);
    const double ll = bsl::abc_kernel_log_estimate(vec1(0.0), sims, cfg);
    CHECK(std::isfinite(ll));
    // dominated by the closer draw: log((e^{-1800} + e^{-1860.5})/2)
    CHECK(ll == doctest::Approx(-1800.0 + std::log1p(std::exp(-60.5)) -
                                std::log(2.0))
                    .epsilon(1e-12));
}

TEST_CASE("mahalanobis distance with identity pilot equals euclidean") {
    SummaryVector a(2), b(2);
    a << 1.0, 2.0;
    b << -1.0, 0.5;
    AbcKernelConfig eu;
    eu.distance = AbcKernelConfig::Distance::Euclidean;
    AbcKernelConfig ma;
    ma.distance = AbcKernelConfig::Distance::Mahalanobis;
    ma.pilot_cov = Matrix::Identity(2, 2);
    CHECK(bsl::summary_distance(a, b, eu) ==
          doctest::Approx((a - b).norm()).epsilon(1e-14));
    CHECK(bsl::summary_distance(a, b, ma) ==
          doctest::Approx(bsl::summary_distance(a, b, eu)).epsilon(1e-12));
}

TEST_CASE("mahalanobis distance matches the explicit quadratic form") {
    Matrix cov(2, 2);
    cov << 2.0, 0.3, 0.3, 0.5;
    SummaryVector a(2), b(2);
    a << 1.0, -1.0;
    b << 0.2, 0.4;
    AbcKernelConfig cfg;
    cfg.distance = AbcKernelConfig::Distance::Mahalanobis;
    cfg.pilot_cov = cov;
    const SummaryVector d = a - b;
    const double expect = std::sqrt((d.transpose() * cov.inverse() * d)(0));
    CHECK(bsl::summary_distance(a, b, cfg) ==
          doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("rejection keeps the quantile count in distance order") {
    const bsl::GaussianToyModel model{bsl::GaussianToyConfig{}};
    const Prior prior = model.prior();
    AbcKernelConfig cfg;
    cfg.distance = AbcKernelConfig::Distance::Euclidean;

    const int budget = 2000;
    const double q = 0.013;
    const auto rej = bsl::abc_rejection(model, prior, vec1(0.3), budget, q, cfg,
                                        SeedStream(8));
    const int keep = static_cast<int>(std::ceil(q * budget));
    CHECK(static_cast<int>(rej.accepted.size()) == keep);
    CHECK(static_cast<int>(rej.table.thetas.size()) == budget);
    CHECK(static_cast<int>(rej.table.distances.size()) == budget);

    std::vector<double> dist = rej.table.distances;
    std::sort(dist.begin(), dist.end());
    CHECK(rej.epsilon == dist[static_cast<size_t>(keep - 1)]);

    int not_above = 0;
    for (double d : rej.table.distances)
        if (d <= rej.epsilon) ++not_above;
    CHECK(not_above >= keep);
}

TEST_CASE("rejection with quantile one keeps every draw") {
    const bsl::GaussianToyModel model{bsl::GaussianToyConfig{}};
    const auto rej = bsl::abc_rejection(model, model.prior(), vec1(0.0), 200, 1.0,
                                        AbcKernelConfig{}, SeedStream(2));
    CHECK(rej.accepted.size() == 200);
}

TEST_CASE("rejection is deterministic in the stream") {
    const bsl::GaussianToyModel model{bsl::GaussianToyConfig{}};
    const auto a = bsl::abc_rejection(model, model.prior(), vec1(0.1), 500, 0.05,
                                      AbcKernelConfig{}, SeedStream(77));
    const auto b = bsl::abc_rejection(model, model.prior(), vec1(0.1), 500, 0.05,
                                      AbcKernelConfig{}, SeedStream(77));
    REQUIRE(a.accepted.size() == b.accepted.size());
    for (size_t i = 0; i < a.accepted.size(); ++i)
        CHECK(a.accepted[i] == b.accepted[i]);
    CHECK(a.epsilon == b.epsilon);
}

TEST_CASE("rejection posterior mean honors the conjugate oracle") {
    bsl::GaussianToyConfig cfg;  // d_s = 1, n = 100
    const bsl::GaussianToyModel model(cfg);
    const double observed = 0.3;
    const auto rej =
        bsl::abc_rejection(model, model.prior(), vec1(observed), 50000, 0.01,
                           AbcKernelConfig{}, SeedStream(10), 4);
    std::vector<double> kept;
    for (const auto& t : rej.accepted) kept.push_back(t[0]);
    const auto post = oracle::conjugate_posterior(cfg.prior_mean, cfg.prior_sd,
                                                  cfg.sigma0, cfg.n, observed);
    const double se = std::sqrt(oracle::var1(kept) / double(kept.size()));
    CHECK(std::abs(oracle::mean1(kept) - post.mean) < 3.0 * se + 1e-12);
}

TEST_CASE("pilot covariance approximates the summary covariance") {
    bsl::GaussianToyConfig cfg;
    cfg.summary = bsl::GaussianToyConfig::Summary::CoordMeans;
    cfg.coords = 2;
    const bsl::GaussianToyModel model(cfg);
    const Matrix pilot = bsl::abc_pilot_covariance(
        model, ParameterVector::Zero(1), 4000, SeedStream(5));
    const double truth = cfg.sigma0 * cfg.sigma0 / cfg.n;  // 0.01
    CHECK(pilot(0, 0) == doctest::Approx(truth).epsilon(0.2));
    CHECK(pilot(1, 1) == doctest::Approx(truth).epsilon(0.2));
    CHECK(std::abs(pilot(0, 1)) < 0.2 * truth);
}

TEST_CASE("abc target draws m fresh simulations per call") {
    const bsl::GaussianToyModel inner{bsl::GaussianToyConfig{}};
    const bsl::CountingModel model(inner);
    AbcKernelConfig cfg;
    cfg.epsilon = 0.5;
    cfg.m = 7;
    auto target = bsl::make_abc_target(model, vec1(0.0), cfg);
    const SeedStream stream(12);
    for (int i = 0; i < 3; ++i)
        (void)target(ParameterVector::Zero(1), stream.child(i));
    CHECK(model.calls() == 21);
    const auto seeds = model.seeds();
    CHECK(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == 21);
}

TEST_CASE("abc mcmc step rejects a zero estimate and accepts a sure ratio") {
    const bsl::GaussianToyModel model{bsl::GaussianToyConfig{}};
    const Prior prior = model.prior();
    bsl::ChainState current;
    current.theta = ParameterVector::Zero(1);
    current.retained_loglik = std::log(0.5);

    AbcKernelConfig cfg;
    cfg.kernel = AbcKernelConfig::Kernel::Uniform;
    cfg.epsilon = 1e-9;  // essentially impossible to hit
    cfg.m = 1;
    bsl::Vector scales = bsl::Vector::Constant(1, 0.1);
    const auto miss = bsl::abc_mcmc_step(current, model, prior, vec1(0.0), cfg,
                                         scales, SeedStream(3));
    CHECK_FALSE(miss.accepted);
    CHECK(miss.state.theta == current.theta);
    CHECK(miss.state.retained_loglik == current.retained_loglik);

    cfg.epsilon = 1e9;  // every draw hits: estimate 1, ratio 1/0.5 = 2
    const auto hit = bsl::abc_mcmc_step(current, model, prior, vec1(0.0), cfg,
                                        scales, SeedStream(4));
    CHECK(hit.accepted);
    CHECK(hit.state.retained_loglik == 0.0);
}

TEST_CASE("kernel config validation rejects nonsense") {
    AbcKernelConfig cfg;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(1), bsl::InvalidArgumentError);
    cfg.epsilon = 1.0;
    cfg.m = 0;
    CHECK_THROWS_AS(cfg.validate(1), bsl::InvalidArgumentError);
    cfg.m = 1;
    cfg.distance = AbcKernelConfig::Distance::Mahalanobis;
    cfg.pilot_cov = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(cfg.validate(2), bsl::InvalidArgumentError);
    CHECK_NOTHROW(cfg.validate(3));
}
