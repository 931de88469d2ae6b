#include <doctest.h>

#include <set>

#include "bsl/errors.hpp"
#include "bsl/models.hpp"
#include "bsl/simulator.hpp"
#include "helpers/test_doubles.hpp"

using bsl::ParameterVector;
using bsl::SeedStream;
using bsl::simulate_batch;
using bsl::SummaryVector;

namespace {

ParameterVector theta1(double v) {
    ParameterVector t(1);
    t << v;
    return t;
}

}  // namespace

TEST_CASE("constant model yields M identical vectors") {
    SummaryVector v(2);
    v << 3.0, -1.0;
    const testdoubles::ConstantModel model(1, v);
    const auto batch = simulate_batch(model, theta1(0.0), 3, SeedStream(1));
    REQUIRE(batch.size() == 3);
    for (const auto& s : batch) CHECK(s == v);
}

TEST_CASE("same root stream gives bit-identical batches") {
    const bsl::GaussianToyModel model{bsl::GaussianToyConfig{}};
    const auto a = simulate_batch(model, theta1(0.3), 64, SeedStream(9));
    const auto b = simulate_batch(model, theta1(0.3), 64, SeedStream(9));
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("parallel batches equal sequential batches bitwise") {
    bsl::GaussianToyConfig cfg;
    cfg.summary = bsl::GaussianToyConfig::Summary::CoordMeans;
    cfg.coords = 4;
    const bsl::GaussianToyModel model(cfg);
    const auto seq = simulate_batch(model, theta1(0.1), 257, SeedStream(5), 1);
    const auto par = simulate_batch(model, theta1(0.1), 257, SeedStream(5), 8);
    REQUIRE(seq.size() == par.size());
    for (size_t i = 0; i < seq.size(); ++i) CHECK(seq[i] == par[i]);
}

TEST_CASE("every batch element gets a distinct seed") {
    const bsl::GaussianToyModel inner{bsl::GaussianToyConfig{}};
    const bsl::CountingModel model(inner);
    (void)simulate_batch(model, theta1(0.0), 100, SeedStream(2));
    const auto seeds = model.seeds();
    CHECK(seeds.size() == 100);
    CHECK(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == 100);
    CHECK(model.calls() == 100);
}

TEST_CASE("batch mean honors the CLT oracle on the toy model") {
    bsl::GaussianToyConfig cfg;  // n=100, sigma0=1
    const bsl::GaussianToyModel model(cfg);
    const int m = 10000;
    const auto batch = simulate_batch(model, theta1(0.4), m, SeedStream(6));
    double sum = 0.0;
    for (const auto& s : batch) sum += s[0];
    const double se = cfg.sigma0 / std::sqrt(double(cfg.n) * double(m));
    CHECK(std::abs(sum / m - 0.4) < 3.0 * se);
}

TEST_CASE("failures carry the smallest offending batch index") {
    // find the seeds of elements 3 and 7 for this stream, then plant faults
    const SeedStream stream(42);
    const std::uint64_t seed3 = stream.child(3).seed();
    const std::uint64_t seed7 = stream.child(7).seed();

    for (auto mode : {testdoubles::FailingModel::Mode::NonFinite,
                      testdoubles::FailingModel::Mode::WrongLength,
                      testdoubles::FailingModel::Mode::Throws}) {
        const testdoubles::FailingModel model(2, {seed7, seed3}, mode);
        bool threw = false;
        try {
            (void)simulate_batch(model, theta1(0.0), 16, stream, 4);
        } catch (const bsl::SimulatorError& e) {
            threw = true;
            CHECK(e.index() == 3);
        }
        CHECK(threw);
    }
}

TEST_CASE("out-of-triangle MA(2) parameters fail as simulator errors") {
    const bsl::Ma2Model model{bsl::Ma2Config{64}};
    ParameterVector bad(2);
    bad << 0.0, 1.5;
    CHECK_THROWS_AS((void)simulate_batch(model, bad, 4, SeedStream(1)),
                    bsl::SimulatorError);
}

TEST_CASE("protocol failures pass through batches unconverted") {
    struct ProtocolThrower : bsl::SimulatorModel {
        int param_dim() const override { return 1; }
        int summary_dim() const override { return 1; }
        int dataset_size() const override { return 1; }
        SummaryVector simulate_summary(const ParameterVector&,
                                       std::uint64_t) const override {
            throw bsl::ProtocolError("child went away");
        }
    };
    const ProtocolThrower model;
    CHECK_THROWS_AS((void)simulate_batch(model, theta1(0.0), 4, SeedStream(1)),
                    bsl::ProtocolError);
}

TEST_CASE("invalid batch arguments are rejected") {
    const bsl::GaussianToyModel model{bsl::GaussianToyConfig{}};
    CHECK_THROWS_AS((void)simulate_batch(model, theta1(0.0), 0, SeedStream(1)),
                    bsl::InvalidArgumentError);
    ParameterVector wrong(2);
    wrong.setZero();
    CHECK_THROWS_AS((void)simulate_batch(model, wrong, 4, SeedStream(1)),
                    bsl::DimensionError);
}
