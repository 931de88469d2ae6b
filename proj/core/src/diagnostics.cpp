#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bsl/errors.hpp"
#include "bsl/mcmc.hpp"

namespace bsl {

double quantile(std::vector<double> x, double p) {
    if (x.empty()) throw InvalidArgumentError("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw InvalidArgumentError("quantile: p must be in [0, 1]");
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * p;
    const auto lo = static_cast<size_t>(std::floor(h));
    if (lo + 1 >= x.size()) return x.back();
    const double frac = h - std::floor(h);
    return x[lo] + frac * (x[lo + 1] - x[lo]);
}

namespace {

// Autocovariance at lag t with the (n - t) denominator, so a perfectly
// alternating series really shows acf1 == -1 and its pair sum truncates
// immediately.
double autocov(const std::vector<double>& x, double mean, int lag) {
    const int n = static_cast<int>(x.size());
    double s = 0.0;
    for (int i = 0; i + lag < n; ++i)
        s += (x[static_cast<size_t>(i)] - mean) *
             (x[static_cast<size_t>(i + lag)] - mean);
    return s / static_cast<double>(n - lag);
}

}  // namespace

SeriesDiagnostics series_diagnostics(const std::vector<double>& x,
                                     const std::string& name) {
    SeriesDiagnostics d;
    d.name = name;
    d.count = static_cast<int>(x.size());
    if (x.empty()) return d;

    const int n = d.count;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    d.mean = mean;

    if (n > 1) {
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        d.sd = std::sqrt(ss / static_cast<double>(n - 1));
    }

    d.q025 = quantile(x, 0.025);
    d.q500 = quantile(x, 0.5);
    d.q975 = quantile(x, 0.975);

    const double g0 = autocov(x, mean, 0);
    if (!(g0 > 0.0)) {
        // constant series: one effective draw
        d.ess = 1.0;
        d.iact = static_cast<double>(n);
        d.acf1 = 0.0;
        return d;
    }
    d.acf1 = n > 1 ? autocov(x, mean, 1) / g0 : 0.0;

    // Geyer initial positive sequence: sum pair autocovariances while they
    // stay positive, tau = 2 * S / g0 - 1.
    double pair_sum = 0.0;
    int pairs = 0;
    for (int k = 0; 2 * k + 1 < n; ++k) {
        const double pair = autocov(x, mean, 2 * k) + autocov(x, mean, 2 * k + 1);
        if (pair <= 0.0) break;
        pair_sum += pair;
        ++pairs;
    }
    d.pairs_used = pairs;
    const double tau = 2.0 * pair_sum / g0 - 1.0;
    double ess = tau <= 0.0 ? static_cast<double>(n)
                            : static_cast<double>(n) / tau;
    ess = std::min(std::max(ess, 1.0), static_cast<double>(n));
    d.ess = ess;
    d.iact = static_cast<double>(n) / ess;
    return d;
}

Diagnostics diagnostics(const Trace& trace) {
    Diagnostics out;
    out.sample_count = trace.size();
    out.acceptance_rate = trace.acceptance_rate();

    const int n = trace.size();
    std::vector<double> column(static_cast<size_t>(n));
    for (int j = 0; j < trace.param_dim(); ++j) {
        for (int i = 0; i < n; ++i)
            column[static_cast<size_t>(i)] = trace.thetas[static_cast<size_t>(i)][j];
        out.params.push_back(
            series_diagnostics(column, "theta_" + std::to_string(j + 1)));
    }
    for (int j = 0; j < trace.adjustment_dim(); ++j) {
        for (int i = 0; i < n; ++i)
            column[static_cast<size_t>(i)] =
                trace.adjustments[static_cast<size_t>(i)][j];
        out.params.push_back(
            series_diagnostics(column, "gamma_" + std::to_string(j + 1)));
    }
    return out;
}

}  // namespace bsl
