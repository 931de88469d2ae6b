#include "bsl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "bsl/abc.hpp"
#include "bsl/errors.hpp"
#include "bsl/mcmc.hpp"
#include "bsl/models.hpp"
#include "bsl/synthetic_likelihood.hpp"
#include "bsl/trace_io.hpp"

namespace bsl {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double var_of(const std::vector<double>& v) {
    const double s = sd_of(v);
    return s * s;
}

// mean over replicates with its standard error
ResultRow agg_row(const std::string& exp, const std::string& cell,
                  const std::string& metric, const std::vector<double>& vals) {
    return ResultRow{exp, cell, metric, mean_of(vals),
                     sd_of(vals) / std::sqrt(static_cast<double>(vals.size()))};
}

// fraction of successes with a binomial standard error
ResultRow frac_row(const std::string& exp, const std::string& cell,
                   const std::string& metric, const std::vector<double>& indicator) {
    const double n = static_cast<double>(indicator.size());
    const double p = mean_of(indicator);
    return ResultRow{exp, cell, metric, p, std::sqrt(p * (1.0 - p) / n)};
}

// variance over replicates; normal-theory standard error var * sqrt(2/(R-1))
ResultRow var_row(const std::string& exp, const std::string& cell,
                  const std::string& metric, const std::vector<double>& vals) {
    const double v = var_of(vals);
    const double r = static_cast<double>(vals.size());
    return ResultRow{exp, cell, metric, v, v * std::sqrt(2.0 / (r - 1.0))};
}

// median over replicates; large-sample standard error of a sample median
ResultRow med_row(const std::string& exp, const std::string& cell,
                  const std::string& metric, const std::vector<double>& vals) {
    const double se =
        1.2533 * sd_of(vals) / std::sqrt(static_cast<double>(vals.size()));
    return ResultRow{exp, cell, metric, quantile(vals, 0.5), se};
}

void sort_rows(std::vector<ResultRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.experiment != b.experiment) return a.experiment < b.experiment;
        if (a.cell != b.cell) return a.cell < b.cell;
        return a.metric < b.metric;
    });
}

ProposalConfig prior_scaled_proposal(const Prior& prior) {
    ProposalConfig p;
    p.scales = prior.sds();
    p.adapt = true;
    return p;
}

const SeriesDiagnostics& find_series(const Diagnostics& d, const std::string& name) {
    for (const auto& s : d.params)
        if (s.name == name) return s;
    throw InvalidArgumentError("diagnostics: no series named " + name);
}

double min_theta_ess(const Diagnostics& d, int k) {
    double ess = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j)
        ess = std::min(ess, find_series(d, "theta_" + std::to_string(j + 1)).ess);
    return ess;
}

}  // namespace

std::string experiment_id_name(ExperimentSpec::Id id) {
    switch (id) {
        case ExperimentSpec::Id::CompareAbcBsl: return "compare_abc_bsl";
        case ExperimentSpec::Id::SlVarianceScaling: return "sl_variance_scaling";
        case ExperimentSpec::Id::MisspecificationDemo: return "misspecification_demo";
    }
    throw InvalidArgumentError("unknown experiment id");
}

std::vector<std::string> ExperimentSpec::validate() const {
    std::vector<std::string> bad;
    if (replicates < 2) bad.push_back("replicates must be >= 2");
    if (threads < 1) bad.push_back("threads must be >= 1");

    switch (id) {
        case Id::CompareAbcBsl: {
            if (model != "gaussian_toy" && model != "ma2")
                bad.push_back("compare_abc_bsl needs model gaussian_toy or ma2");
            if (bsl_m < 2) bad.push_back("bsl_m must be >= 2");
            if (abc_m < 1) bad.push_back("abc_m must be >= 1");
            if (pilot_budget < 2) bad.push_back("pilot_budget must be >= 2");
            if (table_budget < 1) bad.push_back("table_budget must be >= 1");
            if (!(epsilon_quantile > 0.0 && epsilon_quantile <= 1.0))
                bad.push_back("epsilon_quantile must be in (0, 1]");
            else if (epsilon_quantile * static_cast<double>(table_budget) < 2.0)
                bad.push_back("epsilon_quantile * table_budget must be >= 2 so the "
                              "kept set can set proposal scales");
            if (budget < pilot_budget + table_budget + 10LL * bsl_m)
                bad.push_back("budget too small: needs pilot_budget + table_budget "
                              "+ 10 * bsl_m simulator calls");
            break;
        }
        case Id::SlVarianceScaling: {
            if (model != "gaussian_toy")
                bad.push_back("sl_variance_scaling needs model gaussian_toy");
            if (ds_grid.empty()) bad.push_back("ds_grid must be non-empty");
            for (int d : ds_grid)
                if (d < 1) bad.push_back("ds_grid entries must be >= 1");
            if (m_grid.empty()) bad.push_back("m_grid must be non-empty");
            for (int m : m_grid)
                if (m < 2) bad.push_back("m_grid entries must be >= 2");
            if (!(gamma >= 0.0 && gamma <= 1.0)) bad.push_back("gamma must be in [0, 1]");
            for (int d : ds_grid)
                if (whitening_m0 < d + 2)
                    bad.push_back("whitening_m0 must be >= d_s + 2 for every grid d_s");
            break;
        }
        case Id::MisspecificationDemo: {
            if (model != "contaminated_normal")
                bad.push_back("misspecification_demo needs model contaminated_normal");
            if (!(sigma_true > 0.0)) bad.push_back("sigma_true must be > 0");
            if (rbsl_m < 2) bad.push_back("rbsl_m must be >= 2");
            if (!(rbsl_lambda > 0.0)) bad.push_back("rbsl_lambda must be > 0");
            if (!(rbsl_adjustment_step > 0.0))
                bad.push_back("rbsl_adjustment_step must be > 0");
            if (iterations < 1) bad.push_back("iterations must be >= 1");
            if (burn_in < 0) bad.push_back("burn_in must be >= 0");
            break;
        }
    }
    return bad;
}

const ResultRow& ExperimentResult::find(const std::string& cell,
                                        const std::string& metric) const {
    for (const auto& r : rows)
        if (r.cell == cell && r.metric == metric) return r;
    throw InvalidArgumentError("no result row for cell '" + cell + "', metric '" +
                               metric + "'");
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    const auto bad = spec.validate();
    if (!bad.empty()) throw ConfigError(bad);
    switch (spec.id) {
        case ExperimentSpec::Id::CompareAbcBsl: return run_compare_abc_bsl(spec);
        case ExperimentSpec::Id::SlVarianceScaling: return run_sl_variance_scaling(spec);
        case ExperimentSpec::Id::MisspecificationDemo:
            return run_misspecification_demo(spec);
    }
    throw InvalidArgumentError("unknown experiment id");
}

namespace {

// Per-replicate chain summaries shared by both methods of the comparison.
struct MethodStats {
    std::vector<double> mean_error;  // toy only: theta mean minus oracle mean
    std::vector<double> theta_mean;
    std::vector<double> posterior_sd;
    std::vector<double> ess;
    std::vector<double> ess_per_sim;
    std::vector<double> sim_calls;
    std::vector<double> acceptance;
    std::vector<double> epsilon;  // abc only

    void emit(std::vector<ResultRow>& rows, const std::string& exp,
              const std::string& cell) const {
        if (!mean_error.empty()) rows.push_back(agg_row(exp, cell, "mean_error", mean_error));
        rows.push_back(agg_row(exp, cell, "theta_mean", theta_mean));
        rows.push_back(agg_row(exp, cell, "posterior_sd", posterior_sd));
        rows.push_back(agg_row(exp, cell, "ess", ess));
        rows.push_back(agg_row(exp, cell, "ess_per_sim", ess_per_sim));
        rows.push_back(agg_row(exp, cell, "sim_calls", sim_calls));
        rows.push_back(agg_row(exp, cell, "acceptance_rate", acceptance));
        if (!epsilon.empty()) rows.push_back(agg_row(exp, cell, "epsilon", epsilon));
    }
};

}  // namespace

ExperimentResult run_compare_abc_bsl(const ExperimentSpec& spec) {
    const std::string exp = experiment_id_name(ExperimentSpec::Id::CompareAbcBsl);
    const bool toy = spec.model == "gaussian_toy";

    MethodStats bsl_stats, abc_stats;

    for (int r = 0; r < spec.replicates; ++r) {
        const SeedStream rep = SeedStream(spec.seed).child(static_cast<std::uint64_t>(r));

        // dataset (not charged to either method)
        std::unique_ptr<SimulatorModel> model;
        Prior prior;
        ParameterVector theta_star;
        GaussianToyConfig toy_cfg;
        if (toy) {
            toy_cfg.n = 100;
            toy_cfg.summary = GaussianToyConfig::Summary::MeanLogVar;
            auto m = std::make_unique<GaussianToyModel>(toy_cfg);
            prior = m->prior();
            theta_star = ParameterVector::Constant(1, 0.3);
            model = std::move(m);
        } else {
            auto m = std::make_unique<Ma2Model>(Ma2Config{});
            prior = m->prior();
            theta_star = ParameterVector(2);
            theta_star << 0.6, 0.2;
            model = std::move(m);
        }
        if (!spec.theta_true.empty()) {
            if (static_cast<int>(spec.theta_true.size()) != model->param_dim())
                throw ConfigError({"theta_true has wrong dimension for model " + spec.model});
            for (int j = 0; j < model->param_dim(); ++j)
                theta_star[j] = spec.theta_true[static_cast<size_t>(j)];
        }
        const SummaryVector observed =
            model->simulate_summary(theta_star, rep.child(0).seed());
        const int k = model->param_dim();

        // ---- synthetic-likelihood chain
        {
            CountingModel counted(*model);
            const long long total_steps = spec.budget / spec.bsl_m - 1;
            const int burn = static_cast<int>(total_steps / 5);
            const int iters = static_cast<int>(total_steps) - burn;
            const auto target = make_bsl_target(counted, observed, spec.bsl_m,
                                                EstimatorConfig::standard(), spec.threads);
            const Trace tr = run_chain(prior.mean(), iters, burn, target, prior,
                                       prior_scaled_proposal(prior), rep.child(1));
            const Diagnostics d = diagnostics(tr);
            const double sims = static_cast<double>(counted.calls());
            const double ess = min_theta_ess(d, k);
            if (toy) {
                const ToyPosterior oracle = toy_partial_posterior(observed[0], toy_cfg);
                bsl_stats.mean_error.push_back(find_series(d, "theta_1").mean - oracle.mean);
            }
            bsl_stats.theta_mean.push_back(find_series(d, "theta_1").mean);
            bsl_stats.posterior_sd.push_back(find_series(d, "theta_1").sd);
            bsl_stats.ess.push_back(ess);
            bsl_stats.ess_per_sim.push_back(ess / sims);
            bsl_stats.sim_calls.push_back(sims);
            bsl_stats.acceptance.push_back(d.acceptance_rate);
        }

        // ---- kernel (ABC) chain with the same total simulator spend
        {
            CountingModel counted(*model);
            AbcKernelConfig kernel;
            kernel.kernel = AbcKernelConfig::Kernel::Uniform;
            kernel.m = spec.abc_m;
            kernel.distance = AbcKernelConfig::Distance::Mahalanobis;
            kernel.epsilon = 1.0;  // placeholder until the table realizes it
            kernel.pilot_cov = abc_pilot_covariance(counted, prior.mean(),
                                                    spec.pilot_budget, rep.child(3),
                                                    spec.threads);
            const RejectionResult rej =
                abc_rejection(counted, prior, observed, spec.table_budget,
                              spec.epsilon_quantile, kernel, rep.child(4), spec.threads);
            kernel.epsilon = rej.epsilon;

            // proposal scales and start point from the kept draws; adaptation
            // stays off because the acceptance rate of a hit-or-miss chain is
            // capped by the hit probability, which a 0.234 controller would
            // chase by collapsing the step size
            ParameterVector keeper_mean = ParameterVector::Zero(k);
            for (const auto& t : rej.accepted) keeper_mean += t;
            keeper_mean /= static_cast<double>(rej.accepted.size());
            ProposalConfig prop;
            prop.adapt = false;
            prop.scales = Vector(k);
            for (int j = 0; j < k; ++j) {
                std::vector<double> col;
                col.reserve(rej.accepted.size());
                for (const auto& t : rej.accepted) col.push_back(t[j]);
                const double s = sd_of(col);
                prop.scales[j] = s > 0.0 ? s : prior.sds()[j];
            }

            const auto target = make_abc_target(counted, observed, kernel, spec.threads);
            ChainState start;
            start.theta = rej.accepted.front();  // smallest-distance keeper
            start.retained_loglik = target(start.theta, rep.child(5));

            const long long mcmc_steps = spec.budget - spec.pilot_budget -
                                         spec.table_budget - spec.abc_m;
            const int burn = static_cast<int>(mcmc_steps / 5);
            const int iters = static_cast<int>(mcmc_steps) - burn;
            const Trace tr = run_chain_from(start, iters, burn, target, prior, prop,
                                            rep.child(2));
            const Diagnostics d = diagnostics(tr);
            const double sims = static_cast<double>(counted.calls());
            const double ess = min_theta_ess(d, k);
            if (toy) {
                const ToyPosterior oracle = toy_partial_posterior(observed[0], toy_cfg);
                abc_stats.mean_error.push_back(find_series(d, "theta_1").mean - oracle.mean);
            }
            abc_stats.theta_mean.push_back(find_series(d, "theta_1").mean);
            abc_stats.posterior_sd.push_back(find_series(d, "theta_1").sd);
            abc_stats.ess.push_back(ess);
            abc_stats.ess_per_sim.push_back(ess / sims);
            abc_stats.sim_calls.push_back(sims);
            abc_stats.acceptance.push_back(d.acceptance_rate);
            abc_stats.epsilon.push_back(rej.epsilon);
        }
    }

    ExperimentResult out;
    bsl_stats.emit(out.rows, exp, "method=bsl");
    abc_stats.emit(out.rows, exp, "method=abc");
    sort_rows(out.rows);
    return out;
}

ExperimentResult run_sl_variance_scaling(const ExperimentSpec& spec) {
    const std::string exp = experiment_id_name(ExperimentSpec::Id::SlVarianceScaling);
    ExperimentResult out;

    double theta_val = 0.3;
    if (!spec.theta_true.empty()) {
        if (spec.theta_true.size() != 1)
            throw ConfigError({"theta_true must be scalar for gaussian_toy"});
        theta_val = spec.theta_true[0];
    }
    const ParameterVector theta = ParameterVector::Constant(1, theta_val);

    std::uint64_t cell_index = 0;
    for (const int ds : spec.ds_grid) {
        GaussianToyConfig cfg;
        cfg.n = 100;
        cfg.summary = GaussianToyConfig::Summary::CoordMeans;
        cfg.coords = ds;
        const GaussianToyModel model(cfg);

        for (const int m : spec.m_grid) {
            const SeedStream cell = SeedStream(spec.seed).child(cell_index++);
            const SummaryVector observed =
                model.simulate_summary(theta, cell.child(0).seed());
            const WhiteningTransform wt =
                fit_whitening(model, theta, spec.whitening_m0, cell.child(1), spec.threads);

            std::ostringstream base;
            base << "d_s=" << ds << ",M=" << m;
            const std::string std_cell = base.str() + ",estimator=standard";
            const std::string whit_cell = base.str() + ",estimator=whitened";

            std::vector<double> whit_vals(static_cast<size_t>(spec.replicates));
            for (int r = 0; r < spec.replicates; ++r)
                whit_vals[static_cast<size_t>(r)] = synthetic_loglik(
                    model, theta, observed, m, EstimatorConfig::whitened(wt, spec.gamma),
                    cell.child(3).child(static_cast<std::uint64_t>(r)), spec.threads);
            out.rows.push_back(var_row(exp, whit_cell, "log_sl_variance", whit_vals));
            out.rows.push_back(agg_row(exp, whit_cell, "log_sl_mean", whit_vals));

            if (m <= ds + 1) {
                // singular sample covariance: mark, don't fail
                out.rows.push_back(ResultRow{exp, std_cell, "skipped", 1.0, 0.0});
            } else {
                std::vector<double> std_vals(static_cast<size_t>(spec.replicates));
                for (int r = 0; r < spec.replicates; ++r)
                    std_vals[static_cast<size_t>(r)] = synthetic_loglik(
                        model, theta, observed, m, EstimatorConfig::standard(),
                        cell.child(2).child(static_cast<std::uint64_t>(r)), spec.threads);
                out.rows.push_back(var_row(exp, std_cell, "log_sl_variance", std_vals));
                out.rows.push_back(agg_row(exp, std_cell, "log_sl_mean", std_vals));
            }
        }
    }
    sort_rows(out.rows);
    return out;
}

namespace {

// z-score of the observed variance summary under a posterior-median
// predictive batch; `shift` carries the robust mean adjustment if any.
double predictive_var_z(const SimulatorModel& model, const ParameterVector& theta_med,
                        const SummaryVector& observed, double gamma2, int m,
                        const SeedStream& stream, int threads) {
    const auto sims = simulate_batch(model, theta_med, m, stream, threads);
    const MomentEstimate est = estimate_moments(sims);
    const double sd = std::sqrt(est.cov(1, 1));
    return (observed[1] - (est.mean[1] + sd * gamma2)) / sd;
}

}  // namespace

ExperimentResult run_misspecification_demo(const ExperimentSpec& spec) {
    const std::string exp = experiment_id_name(ExperimentSpec::Id::MisspecificationDemo);
    ExperimentResult out;

    const double theta_true = spec.theta_true.empty() ? 0.0 : spec.theta_true[0];
    if (!spec.theta_true.empty() && spec.theta_true.size() != 1)
        throw ConfigError({"theta_true must be scalar for contaminated_normal"});

    const struct {
        const char* name;
        double sigma;
    } cases[2] = {{"misspecified", spec.sigma_true}, {"control", 1.0}};

    for (std::uint64_t c = 0; c < 2; ++c) {
        ContaminatedNormalConfig cfg;
        cfg.sigma_true = cases[c].sigma;
        cfg.theta_true = theta_true;
        // Short datasets keep the variance-summary misfit near 9 of its sds
        // instead of ~21 at the model default, which is what rbsl_m = 100 can
        // absorb as pseudo-marginal noise without stalling the theta walk.
        // The flagged-vs-control contrast is unaffected: both scale with n.
        cfg.n = 20;
        const ContaminatedNormalModel model(cfg);
        const Prior prior = model.prior();
        const SeedStream case_stream = SeedStream(spec.seed).child(c);

        std::vector<double> std_theta_mean, std_covers, std_pred_cover, std_acc;
        std::vector<double> rob_theta_mean, rob_covers, rob_pred_cover, rob_acc;
        std::vector<double> rob_g2_median, rob_g2_abs_median, rob_theta_ci_width;

        for (int r = 0; r < spec.replicates; ++r) {
            const SeedStream rep = case_stream.child(static_cast<std::uint64_t>(r));
            const SummaryVector observed = contaminated_observed(cfg, rep.child(0).seed());

            // standard chain
            const auto target = make_bsl_target(model, observed, spec.rbsl_m,
                                                EstimatorConfig::standard(), spec.threads);
            const Trace tstd =
                run_chain(prior.mean(), spec.iterations, spec.burn_in, target, prior,
                          prior_scaled_proposal(prior), rep.child(1));
            const Diagnostics dstd = diagnostics(tstd);
            const auto& s_theta = find_series(dstd, "theta_1");
            std_theta_mean.push_back(s_theta.mean);
            std_covers.push_back(
                s_theta.q025 <= theta_true && theta_true <= s_theta.q975 ? 1.0 : 0.0);
            std_acc.push_back(dstd.acceptance_rate);
            const ParameterVector med_std = ParameterVector::Constant(1, s_theta.q500);
            const double z_std = predictive_var_z(model, med_std, observed, 0.0, 200,
                                                  rep.child(3), spec.threads);
            std_pred_cover.push_back(std::abs(z_std) <= 1.96 ? 1.0 : 0.0);

            // robust chain
            RbslConfig rc;
            rc.m = spec.rbsl_m;
            rc.lambda = spec.rbsl_lambda;
            rc.adjustment_step = spec.rbsl_adjustment_step;
            const Trace trob =
                run_rbsl_chain(prior.mean(), spec.iterations, spec.burn_in, model,
                               observed, rc, prior, prior_scaled_proposal(prior),
                               rep.child(2), spec.threads);
            const Diagnostics drob = diagnostics(trob);
            const auto& r_theta = find_series(drob, "theta_1");
            const auto& r_g2 = find_series(drob, "gamma_2");
            rob_theta_mean.push_back(r_theta.mean);
            rob_covers.push_back(
                r_theta.q025 <= theta_true && theta_true <= r_theta.q975 ? 1.0 : 0.0);
            rob_theta_ci_width.push_back(r_theta.q975 - r_theta.q025);
            rob_acc.push_back(drob.acceptance_rate);
            rob_g2_median.push_back(r_g2.q500);
            std::vector<double> abs_g2(trob.adjustments.size());
            for (size_t i = 0; i < trob.adjustments.size(); ++i)
                abs_g2[i] = std::abs(trob.adjustments[i][1]);
            rob_g2_abs_median.push_back(quantile(abs_g2, 0.5));
            const ParameterVector med_rob = ParameterVector::Constant(1, r_theta.q500);
            const double z_rob = predictive_var_z(model, med_rob, observed, r_g2.q500,
                                                  200, rep.child(4), spec.threads);
            rob_pred_cover.push_back(std::abs(z_rob) <= 1.96 ? 1.0 : 0.0);
        }

        const std::string cs = cases[c].name;
        out.rows.push_back(agg_row(exp, "case=" + cs + ",method=standard", "theta_mean",
                                   std_theta_mean));
        out.rows.push_back(frac_row(exp, "case=" + cs + ",method=standard",
                                    "theta_ci_covers", std_covers));
        out.rows.push_back(frac_row(exp, "case=" + cs + ",method=standard",
                                    "predictive_coverage_var", std_pred_cover));
        out.rows.push_back(agg_row(exp, "case=" + cs + ",method=standard",
                                   "acceptance_rate", std_acc));
        out.rows.push_back(agg_row(exp, "case=" + cs + ",method=robust", "theta_mean",
                                   rob_theta_mean));
        out.rows.push_back(frac_row(exp, "case=" + cs + ",method=robust",
                                    "theta_ci_covers", rob_covers));
        out.rows.push_back(agg_row(exp, "case=" + cs + ",method=robust",
                                   "theta_ci_width", rob_theta_ci_width));
        out.rows.push_back(frac_row(exp, "case=" + cs + ",method=robust",
                                    "predictive_coverage_var", rob_pred_cover));
        out.rows.push_back(agg_row(exp, "case=" + cs + ",method=robust",
                                   "acceptance_rate", rob_acc));
        out.rows.push_back(med_row(exp, "case=" + cs + ",method=robust",
                                   "gamma2_median", rob_g2_median));
        out.rows.push_back(med_row(exp, "case=" + cs + ",method=robust",
                                   "gamma2_abs_median", rob_g2_abs_median));
    }
    sort_rows(out.rows);
    return out;
}

void write_result_csv(const ExperimentResult& result, std::ostream& os) {
    os << "experiment,cell,metric,value,mc_se\n";
    for (const auto& r : result.rows)
        os << r.experiment << ',' << '"' << r.cell << '"' << ',' << r.metric << ','
           << format_double(r.value) << ',' << format_double(r.mc_se) << "\n";
}

}  // namespace bsl
