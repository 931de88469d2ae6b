#include "bsl/abc.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bsl/errors.hpp"
#include "bsl/synthetic_likelihood.hpp"

namespace bsl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Distance evaluator with the Mahalanobis factor prepared once.
class Metric {
public:
    explicit Metric(const AbcKernelConfig& config) : mahalanobis_(false) {
        if (config.distance == AbcKernelConfig::Distance::Mahalanobis) {
            mahalanobis_ = true;
            Eigen::LLT<Matrix> llt(config.pilot_cov);
            if (llt.info() != Eigen::Success)
                throw NonPositiveDefiniteError(
                    "pilot covariance for Mahalanobis distance is not positive definite");
            l_ = llt.matrixL();
        }
    }

    double operator()(const SummaryVector& a, const SummaryVector& b) const {
        if (a.size() != b.size())
            throw DimensionError("summary_distance: length mismatch");
        if (!mahalanobis_) return (a - b).norm();
        if (a.size() != l_.rows())
            throw DimensionError("summary_distance: pilot covariance has wrong size");
        return l_.triangularView<Eigen::Lower>().solve(a - b).norm();
    }

private:
    bool mahalanobis_;
    Matrix l_;
};

double kernel_log_value(double dist, const AbcKernelConfig& config) {
    if (config.kernel == AbcKernelConfig::Kernel::Uniform)
        return dist <= config.epsilon ? 0.0 : kNegInf;
    const double z = dist / config.epsilon;
    return -0.5 * z * z;
}

double log_mean_exp(const std::vector<double>& logs) {
    const double top = *std::max_element(logs.begin(), logs.end());
    if (top == kNegInf) return kNegInf;
    double s = 0.0;
    for (double lv : logs) s += std::exp(lv - top);
    return top + std::log(s / static_cast<double>(logs.size()));
}

}  // namespace

void AbcKernelConfig::validate(int summary_dim) const {
    if (!(epsilon > 0.0))
        throw InvalidArgumentError("abc kernel: epsilon must be > 0");
    if (m < 1) throw InvalidArgumentError("abc kernel: m must be >= 1");
    if (distance == Distance::Mahalanobis &&
        (pilot_cov.rows() != summary_dim || pilot_cov.cols() != summary_dim))
        throw InvalidArgumentError(
            "abc kernel: Mahalanobis distance needs a pilot covariance of the "
            "summary dimension");
}

double summary_distance(const SummaryVector& a, const SummaryVector& b,
                        const AbcKernelConfig& config) {
    return Metric(config)(a, b);
}

double abc_kernel_estimate(const SummaryVector& observed,
                           const std::vector<SummaryVector>& simulated,
                           const AbcKernelConfig& config) {
    const double lv = abc_kernel_log_estimate(observed, simulated, config);
    return lv == kNegInf ? 0.0 : std::exp(lv);
}

double abc_kernel_log_estimate(const SummaryVector& observed,
                               const std::vector<SummaryVector>& simulated,
                               const AbcKernelConfig& config) {
    if (simulated.empty())
        throw InvalidArgumentError("abc kernel: empty simulated batch");
    config.validate(static_cast<int>(observed.size()));
    const Metric metric(config);
    std::vector<double> logs;
    logs.reserve(simulated.size());
    for (const auto& s : simulated)
        logs.push_back(kernel_log_value(metric(observed, s), config));
    return log_mean_exp(logs);
}

RejectionResult abc_rejection(const SimulatorModel& model,
                              const Prior& prior,
                              const SummaryVector& observed,
                              int budget,
                              double quantile,
                              const AbcKernelConfig& config,
                              const SeedStream& stream,
                              int threads) {
    if (budget < 1) throw InvalidArgumentError("abc_rejection: budget must be >= 1");
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw InvalidArgumentError("abc_rejection: quantile must be in (0, 1]");
    if (prior.dim() != model.param_dim())
        throw DimensionError("abc_rejection: prior and model disagree on dimension");
    if (observed.size() != model.summary_dim())
        throw DimensionError("abc_rejection: observed has wrong dimension");
    if (config.distance == AbcKernelConfig::Distance::Mahalanobis)
        config.validate(model.summary_dim());

    const Metric metric(config);

    // One composite draw per table row: theta from the prior, then a single
    // summary at that theta, both derived from the row's seed so rows are
    // independent of scheduling.  Routing rows through simulate_batch reuses
    // its threading and its first-failing-index error semantics.
    struct RowModel : SimulatorModel {
        const SimulatorModel& inner;
        const Prior& prior;
        RowModel(const SimulatorModel& m, const Prior& p) : inner(m), prior(p) {}
        int param_dim() const override { return inner.param_dim(); }
        int summary_dim() const override { return inner.summary_dim(); }
        int dataset_size() const override { return inner.dataset_size(); }
        bool parallel_safe() const override { return inner.parallel_safe(); }
        static ParameterVector row_theta(const Prior& p, std::uint64_t seed) {
            return p.sample(SeedStream(seed, 0));
        }
        SummaryVector simulate_summary(const ParameterVector&,
                                       std::uint64_t seed) const override {
            return inner.simulate_summary(row_theta(prior, seed),
                                          SeedStream(seed, 1).seed());
        }
    };

    RejectionResult out;
    out.table.thetas.reserve(static_cast<size_t>(budget));
    out.table.summaries.reserve(static_cast<size_t>(budget));
    out.table.distances.reserve(static_cast<size_t>(budget));

    const RowModel rows(model, prior);
    const SeedStream row_stream = stream.child(0);
    const auto summaries = simulate_batch(rows, prior.mean(), budget, row_stream, threads);
    for (int i = 0; i < budget; ++i) {
        const std::uint64_t row_seed =
            row_stream.child(static_cast<std::uint64_t>(i)).seed();
        out.table.thetas.push_back(RowModel::row_theta(prior, row_seed));
        out.table.summaries.push_back(summaries[static_cast<size_t>(i)]);
        out.table.distances.push_back(metric(observed, summaries[static_cast<size_t>(i)]));
    }

    const int keep = static_cast<int>(
        std::ceil(quantile * static_cast<double>(budget)));
    std::vector<int> order(static_cast<size_t>(budget));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return out.table.distances[static_cast<size_t>(a)] <
               out.table.distances[static_cast<size_t>(b)];
    });
    out.accepted.reserve(static_cast<size_t>(keep));
    for (int r = 0; r < keep; ++r)
        out.accepted.push_back(out.table.thetas[static_cast<size_t>(order[static_cast<size_t>(r)])]);
    out.epsilon = out.table.distances[static_cast<size_t>(order[static_cast<size_t>(keep - 1)])];
    return out;
}

Matrix abc_pilot_covariance(const SimulatorModel& model,
                            const ParameterVector& theta0,
                            int budget,
                            const SeedStream& stream,
                            int threads) {
    if (budget < 2)
        throw InvalidArgumentError("abc_pilot_covariance: budget must be >= 2");
    const auto sims = simulate_batch(model, theta0, budget, stream, threads);
    return estimate_moments(sims).cov;
}

LogLikEvaluator make_abc_target(const SimulatorModel& model,
                                SummaryVector observed,
                                AbcKernelConfig config,
                                int threads) {
    config.validate(model.summary_dim());
    return [&model, observed = std::move(observed), config = std::move(config),
            threads](const ParameterVector& theta, const SeedStream& stream) {
        try {
            const auto sims = simulate_batch(model, theta, config.m, stream, threads);
            return abc_kernel_log_estimate(observed, sims, config);
        } catch (const SimulatorError&) {
            return kNegInf;
        }
    };
}

StepResult abc_mcmc_step(const ChainState& current,
                         const SimulatorModel& model,
                         const Prior& prior,
                         const SummaryVector& observed,
                         const AbcKernelConfig& config,
                         const Vector& scales,
                         const SeedStream& iter_stream,
                         int threads) {
    const auto target = make_abc_target(model, observed, config, threads);
    return pm_mh_step(current, target, prior, scales, iter_stream);
}

}  // namespace bsl
