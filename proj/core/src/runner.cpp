#include "bsl/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "bsl/errors.hpp"
#include "bsl/trace_io.hpp"

namespace bsl {

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// left-aligned first column, right-aligned numbers
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) return {};
    std::vector<size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
        for (size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    std::string out;
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += "  ";
            const size_t pad = width[c] - row[c].size();
            if (c == 0) {
                out += row[c];
                if (c + 1 < row.size()) out.append(pad, ' ');
            } else {
                out.append(pad, ' ');
                out += row[c];
            }
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f << text;
    f.flush();
    if (!f) throw IoError("write failed: " + path.string());
}

SummaryVector resolve_observed(const RunConfig& cfg, const SimulatorModel& model,
                               const SeedStream& stream) {
    if (cfg.observed) return *cfg.observed;
    const std::uint64_t seed = stream.seed();
    if (!cfg.model.external && cfg.model.name == "contaminated_normal") {
        // the observed summary comes from the true generator, not the
        // assumed unit-variance model
        ContaminatedNormalConfig ccfg = cfg.model.contaminated;
        ccfg.theta_true = (*cfg.theta_true)[0];
        return contaminated_observed(ccfg, seed);
    }
    return model.simulate_summary(*cfg.theta_true, seed);
}

const char* method_name(RunConfig::Method m) {
    switch (m) {
        case RunConfig::Method::Bsl: return "bsl";
        case RunConfig::Method::Rbsl: return "rbsl";
        case RunConfig::Method::AbcMcmc: return "abc_mcmc";
        case RunConfig::Method::AbcRejection: return "abc_rejection";
    }
    return "?";
}

AbcKernelConfig kernel_config(const RunConfig& cfg, const SimulatorModel& model,
                              const Prior& prior, const SeedStream& setup,
                              std::vector<std::string>* notes) {
    AbcKernelConfig kc;
    kc.kernel = cfg.abc_kernel;
    kc.distance = cfg.abc_distance;
    kc.m = cfg.abc_m;
    if (kc.distance == AbcKernelConfig::Distance::Mahalanobis) {
        kc.pilot_cov = abc_pilot_covariance(model, prior.mean(), cfg.abc_pilot_budget,
                                            setup.child(1), cfg.threads);
        if (notes)
            notes->push_back("pilot_budget: " + std::to_string(cfg.abc_pilot_budget));
    }
    return kc;
}

Trace rejection_trace(const RunConfig& cfg, const SimulatorModel& model,
                      const Prior& prior, const SummaryVector& observed,
                      const SeedStream& setup, double& epsilon_out, int& budget_out) {
    AbcKernelConfig kc = kernel_config(cfg, model, prior, setup, nullptr);
    const int budget = static_cast<int>(cfg.abc_budget);
    budget_out = budget;

    // explicit epsilon keeps whatever falls inside it; otherwise the
    // tolerance is realized as the distance quantile of the table
    const double quantile = cfg.abc_epsilon ? 1.0 : cfg.abc_epsilon_quantile;
    RejectionResult rej = abc_rejection(model, prior, observed, budget, quantile, kc,
                                        setup.child(2), cfg.threads);

    std::vector<double> dist = rej.table.distances;
    std::sort(dist.begin(), dist.end());

    size_t keep = rej.accepted.size();
    double eps = rej.epsilon;
    if (cfg.abc_epsilon) {
        eps = *cfg.abc_epsilon;
        keep = static_cast<size_t>(std::upper_bound(dist.begin(), dist.end(), eps) -
                                   dist.begin());
        if (keep == 0)
            throw InitializationError("abc_rejection: no draws within epsilon");
    }
    epsilon_out = eps;

    Trace trace;
    trace.burn_in = 0;
    trace.thetas.reserve(keep);
    for (size_t r = 0; r < keep; ++r) {
        trace.thetas.push_back(rej.accepted[r]);
        const double d = dist[r];
        const double ll = kc.kernel == AbcKernelConfig::Kernel::Uniform
                              ? 0.0
                              : (eps > 0.0 ? -0.5 * (d / eps) * (d / eps) : 0.0);
        trace.logliks.push_back(ll);
        trace.accepted.push_back(1);
    }
    return trace;
}

}  // namespace

ExitCode exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return ExitCode::Config;
    if (dynamic_cast<const InitializationError*>(&e)) return ExitCode::Init;
    if (dynamic_cast<const ProtocolError*>(&e)) return ExitCode::Protocol;
    if (dynamic_cast<const IoError*>(&e)) return ExitCode::Io;
    return ExitCode::Internal;
}

std::string render_diagnostics(const Diagnostics& d) {
    std::ostringstream os;
    os << "samples: " << d.sample_count << "\n";
    os << "acceptance_rate: " << fmt6(d.acceptance_rate) << "\n\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"series", "mean", "sd", "q2.5", "median", "q97.5", "ess",
                    "iact", "acf1"});
    for (const auto& s : d.params)
        rows.push_back({s.name, fmt6(s.mean), fmt6(s.sd), fmt6(s.q025), fmt6(s.q500),
                        fmt6(s.q975), fmt6(s.ess), fmt6(s.iact), fmt6(s.acf1)});
    os << render_table(rows);
    return os.str();
}

RunOutput run_to_dir(const RunConfig& cfg) {
    if (cfg.output_dir.empty())
        throw ConfigError({"output_dir: required to run"});

    const std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output dir " + dir.string() + ": " +
                          ec.message());

    std::unique_ptr<SimulatorModel> model = make_model(cfg.model);
    const Prior prior = model_prior(cfg.model);
    const SeedStream root(cfg.seed);

    RunOutput out;
    out.observed = resolve_observed(cfg, *model, root.child(0));

    // snapshot carries the realized observed summary so reruns are exact
    RunConfig resolved = cfg;
    resolved.observed = out.observed;
    resolved.theta_true.reset();
    write_text_file(dir / "config_snapshot.json", config_snapshot(resolved));
    write_text_file(dir / "seed.txt", std::to_string(cfg.seed) + "\n");

    ProposalConfig prop;
    prop.scales = cfg.scales ? *cfg.scales : prior.sds();
    prop.adapt = cfg.adapt;
    prop.target_accept = cfg.target_accept;

    const SeedStream setup = root.child(1);
    const SeedStream chain = root.child(2);
    std::vector<std::string> extra;

    switch (cfg.method) {
        case RunConfig::Method::Bsl: {
            EstimatorConfig est = EstimatorConfig::standard();
            if (cfg.whitening) {
                WhiteningTransform wt =
                    fit_whitening(*model, *cfg.whitening_theta0, cfg.whitening_m0,
                                  setup.child(0), cfg.threads);
                extra.push_back("whitening_m0: " + std::to_string(wt.sample_count));
                est = EstimatorConfig::whitened(std::move(wt), cfg.gamma);
            } else if (cfg.gamma < 1.0) {
                est = EstimatorConfig::shrinkage(cfg.gamma);
            }
            auto target = make_bsl_target(*model, out.observed, cfg.m, est, cfg.threads);
            out.trace = run_chain(prior.mean(), cfg.iterations, cfg.burn_in, target,
                                  prior, prop, chain);
            break;
        }
        case RunConfig::Method::Rbsl: {
            RbslConfig rc;
            rc.m = cfg.m;
            rc.lambda = cfg.rbsl_lambda;
            rc.adjustment_step = cfg.rbsl_adjustment_step;
            out.trace = run_rbsl_chain(prior.mean(), cfg.iterations, cfg.burn_in,
                                       *model, out.observed, rc, prior, prop, chain,
                                       cfg.threads);
            break;
        }
        case RunConfig::Method::AbcMcmc: {
            AbcKernelConfig kc = kernel_config(cfg, *model, prior, setup, &extra);
            std::optional<ChainState> start;
            if (cfg.abc_epsilon) {
                kc.epsilon = *cfg.abc_epsilon;
            } else {
                RejectionResult rej =
                    abc_rejection(*model, prior, out.observed, cfg.abc_table_budget,
                                  cfg.abc_epsilon_quantile, kc, setup.child(2),
                                  cfg.threads);
                kc.epsilon = rej.epsilon;
                extra.push_back("table_budget: " +
                                std::to_string(cfg.abc_table_budget));
                // warm start from the closest keeper; its own table draw is
                // a positive kernel estimate at that theta, so the chain
                // never begins from a zero-likelihood state
                const double d0 =
                    *std::min_element(rej.table.distances.begin(),
                                      rej.table.distances.end());
                ChainState s;
                s.theta = rej.accepted.front();
                s.retained_loglik = kc.kernel == AbcKernelConfig::Kernel::Uniform
                                        ? 0.0
                                        : -0.5 * (d0 / kc.epsilon) * (d0 / kc.epsilon);
                start = std::move(s);
                // unless the config pins scales, size the walk by the
                // keepers' spread rather than the prior's
                if (!cfg.scales) {
                    const auto& kept = rej.accepted;
                    const auto n = static_cast<double>(kept.size());
                    if (kept.size() >= 2) {
                        Vector mean = Vector::Zero(kept[0].size());
                        for (const auto& t : kept) mean += t;
                        mean /= n;
                        Vector var = Vector::Zero(kept[0].size());
                        for (const auto& t : kept)
                            var += (t - mean).cwiseProduct(t - mean);
                        var /= n - 1.0;
                        const Vector sd = var.cwiseSqrt();
                        if ((sd.array() > 0.0).all()) prop.scales = sd;
                    }
                }
            }
            out.epsilon = kc.epsilon;
            extra.push_back("epsilon: " + fmt6(kc.epsilon));
            auto target = make_abc_target(*model, out.observed, kc, cfg.threads);
            out.trace = start ? run_chain_from(*start, cfg.iterations, cfg.burn_in,
                                               target, prior, prop, chain)
                              : run_chain(prior.mean(), cfg.iterations, cfg.burn_in,
                                          target, prior, prop, chain);
            break;
        }
        case RunConfig::Method::AbcRejection: {
            double eps = 0.0;
            int budget = 0;
            out.trace = rejection_trace(cfg, *model, prior, out.observed, setup, eps,
                                        budget);
            out.epsilon = eps;
            extra.push_back("epsilon: " + fmt6(eps));
            extra.push_back("kept: " + std::to_string(out.trace.size()) + " of " +
                            std::to_string(budget));
            break;
        }
    }

    out.diag = diagnostics(out.trace);

    std::ostringstream head;
    head << "method: " << method_name(cfg.method) << "\n";
    head << "model: " << (cfg.model.external ? "external" : cfg.model.name) << "\n";
    head << "seed: " << cfg.seed << "\n";
    head << "observed:";
    for (Eigen::Index i = 0; i < out.observed.size(); ++i)
        head << " " << fmt6(out.observed[i]);
    head << "\n";
    for (const auto& line : extra) head << line << "\n";
    out.summary_text = head.str() + render_diagnostics(out.diag);

    {
        std::ofstream f(dir / "trace.csv", std::ios::binary);
        if (!f) throw IoError("cannot open for writing: " +
                              (dir / "trace.csv").string());
        write_trace_csv(out.trace, f);
        f.flush();
        if (!f) throw IoError("write failed: " + (dir / "trace.csv").string());
    }
    write_text_file(dir / "summary.txt", out.summary_text);
    return out;
}

ExperimentResult run_experiment_to_dir(const ExperimentFile& file) {
    if (file.output_dir.empty())
        throw ConfigError({"output_dir: required to run"});

    const std::filesystem::path dir(file.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output dir " + dir.string() + ": " +
                          ec.message());

    write_text_file(dir / "config_snapshot.json", experiment_snapshot(file));
    write_text_file(dir / "seed.txt", std::to_string(file.spec.seed) + "\n");

    ExperimentResult result = run_experiment(file.spec);

    {
        std::ofstream f(dir / "results.csv", std::ios::binary);
        if (!f) throw IoError("cannot open for writing: " +
                              (dir / "results.csv").string());
        write_result_csv(result, f);
        f.flush();
        if (!f) throw IoError("write failed: " + (dir / "results.csv").string());
    }

    std::ostringstream os;
    os << "experiment: " << experiment_id_name(file.spec.id) << "\n";
    os << "replicates: " << file.spec.replicates << "\n";
    os << "seed: " << file.spec.seed << "\n\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"cell", "metric", "value", "mc_se"});
    for (const auto& r : result.rows)
        rows.push_back({r.cell, r.metric, fmt6(r.value), fmt6(r.mc_se)});
    os << render_table(rows);
    write_text_file(dir / "summary.txt", os.str());
    return result;
}

std::string diagnose_trace_file(const std::string& path) {
    const Trace trace = read_trace_csv_file(path);
    return render_diagnostics(diagnostics(trace));
}

}  // namespace bsl
