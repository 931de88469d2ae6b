#include "bsl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bsl/errors.hpp"
#include "bsl/trace_io.hpp"

namespace bsl {

using nlohmann::json;

namespace {

// Strict object reader: every key must be consumed, every violation is
// collected (with its JSON path) instead of aborting at the first one.
class ObjectReader {
public:
    ObjectReader(const json& node, std::string path, std::vector<std::string>& bad)
        : node_(node), path_(std::move(path)), bad_(bad) {}

    const json* take(const char* key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    void complain(const std::string& key, const std::string& msg) {
        bad_.push_back(at(key) + ": " + msg);
    }

    void read_string(const char* key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) return complain(key, "expected a string");
            out = v->get<std::string>();
        }
    }

    void read_bool(const char* key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) return complain(key, "expected true or false");
            out = v->get<bool>();
        }
    }

    void read_opt_bool(const char* key, std::optional<bool>& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) return complain(key, "expected true or false");
            out = v->get<bool>();
        }
    }

    template <class Int>
    void read_int(const char* key, Int& out, long long lo, const char* req) {
        if (const json* v = take(key)) {
            if (!v->is_number_integer())
                return complain(key, "expected an integer");
            const long long x = v->get<long long>();
            if (x < lo) return complain(key, req);
            out = static_cast<Int>(x);
        }
    }

    void read_u64(const char* key, std::uint64_t& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
                return complain(key, "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void read_double(const char* key, double& out, bool (*ok)(double), const char* req) {
        if (const json* v = take(key)) {
            if (!v->is_number()) return complain(key, "expected a number");
            const double x = v->get<double>();
            if (ok && !ok(x)) return complain(key, req);
            out = x;
        }
    }

    void read_opt_double(const char* key, std::optional<double>& out, bool (*ok)(double),
                         const char* req) {
        double tmp = 0.0;
        if (const json* v = take(key)) {
            if (!v->is_number()) return complain(key, "expected a number");
            tmp = v->get<double>();
            if (ok && !ok(tmp)) return complain(key, req);
            out = tmp;
        }
    }

    void read_vector(const char* key, std::optional<Vector>& out) {
        if (const json* v = take(key)) {
            if (!v->is_array() || v->empty())
                return complain(key, "expected a non-empty array of numbers");
            Vector vec(static_cast<Eigen::Index>(v->size()));
            for (size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number())
                    return complain(key, "expected a non-empty array of numbers");
                vec[static_cast<Eigen::Index>(i)] = (*v)[i].get<double>();
            }
            out = std::move(vec);
        }
    }

    void read_int_list(const char* key, std::vector<int>& out) {
        if (const json* v = take(key)) {
            if (!v->is_array() || v->empty())
                return complain(key, "expected a non-empty array of integers");
            std::vector<int> vals;
            for (const auto& e : *v) {
                if (!e.is_number_integer())
                    return complain(key, "expected a non-empty array of integers");
                vals.push_back(e.get<int>());
            }
            out = std::move(vals);
        }
    }

    // nested object; returns nullptr when absent or not an object
    const json* take_object(const char* key) {
        if (const json* v = take(key)) {
            if (!v->is_object()) {
                complain(key, "expected an object");
                return nullptr;
            }
            return v;
        }
        return nullptr;
    }

    void finish() {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!seen_.count(it.key())) bad_.push_back(at(it.key()) + ": unknown key");
    }

private:
    std::string at(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json& node_;
    std::string path_;
    std::vector<std::string>& bad_;
    std::set<std::string> seen_;
};

bool positive(double x) { return x > 0.0; }
bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }
bool unit_open_left(double x) { return x > 0.0 && x <= 1.0; }
bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

std::vector<PriorMarginal> parse_prior_array(const json& arr, const std::string& path,
                                             std::vector<std::string>& bad) {
    std::vector<PriorMarginal> out;
    if (!arr.is_array() || arr.empty()) {
        bad.push_back(path + ": expected a non-empty array of marginals");
        return out;
    }
    for (size_t i = 0; i < arr.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!arr[i].is_object()) {
            bad.push_back(p + ": expected an object");
            continue;
        }
        ObjectReader r(arr[i], p, bad);
        std::string kind;
        r.read_string("kind", kind);
        if (kind == "uniform") {
            double lo = 0.0, hi = 1.0;
            r.read_double("low", lo, nullptr, "");
            r.read_double("high", hi, nullptr, "");
            r.finish();
            if (!(lo < hi)) {
                bad.push_back(p + ": uniform marginal needs low < high");
                continue;
            }
            out.push_back(PriorMarginal::uniform(lo, hi));
        } else if (kind == "normal") {
            double mean = 0.0, sd = 1.0;
            r.read_double("mean", mean, nullptr, "");
            r.read_double("sd", sd, positive, "must be > 0");
            r.finish();
            if (sd > 0.0) out.push_back(PriorMarginal::normal(mean, sd));
        } else {
            bad.push_back(p + ".kind: must be uniform or normal");
        }
    }
    return out;
}

void parse_model_block(const json& node, ModelChoice& model,
                       std::vector<std::string>& bad) {
    ObjectReader r(node, "model", bad);
    r.read_string("name", model.name);

    if (model.name == "gaussian_toy") {
        auto& t = model.toy;
        r.read_int("n", t.n, 1, "must be >= 1");
        r.read_double("sigma0", t.sigma0, positive, "must be > 0");
        r.read_double("prior_mean", t.prior_mean, nullptr, "");
        r.read_double("prior_sd", t.prior_sd, positive, "must be > 0");
        std::string summary = "coord_means";
        r.read_string("summary", summary);
        if (summary == "coord_means")
            t.summary = GaussianToyConfig::Summary::CoordMeans;
        else if (summary == "mean_logvar")
            t.summary = GaussianToyConfig::Summary::MeanLogVar;
        else
            r.complain("summary", "must be coord_means or mean_logvar");
        r.read_int("coords", t.coords, 1, "must be >= 1");
    } else if (model.name == "ma2") {
        r.read_int("n", model.ma2.n, 3, "must be >= 3");
    } else if (model.name == "contaminated_normal") {
        auto& c = model.contaminated;
        r.read_int("n", c.n, 2, "must be >= 2");
        r.read_double("sigma_true", c.sigma_true, positive, "must be > 0");
        r.read_double("prior_mean", c.prior_mean, nullptr, "");
        r.read_double("prior_sd", c.prior_sd, positive, "must be > 0");
    } else if (model.name == "external") {
        ExternalSimulatorSpec spec;
        if (const json* cmd = r.take("command")) {
            if (!cmd->is_array() || cmd->empty()) {
                r.complain("command", "expected a non-empty array of strings");
            } else {
                for (const auto& e : *cmd) {
                    if (!e.is_string()) {
                        r.complain("command", "expected a non-empty array of strings");
                        spec.command.clear();
                        break;
                    }
                    spec.command.push_back(e.get<std::string>());
                }
            }
        } else {
            r.complain("command", "required for external simulators");
        }
        r.read_int("d_theta", spec.d_theta, 1, "must be >= 1");
        r.read_int("d_s", spec.d_s, 1, "must be >= 1");
        r.read_int("n", spec.n, 1, "must be >= 1");
        r.read_double("handshake_timeout_s", spec.handshake_timeout_s, positive,
                      "must be > 0");
        r.read_double("request_timeout_s", spec.request_timeout_s, positive,
                      "must be > 0");
        if (spec.d_theta < 1) r.complain("d_theta", "required and must be >= 1");
        if (spec.d_s < 1) r.complain("d_s", "required and must be >= 1");
        if (spec.n < 1) r.complain("n", "required and must be >= 1");
        model.external = std::move(spec);
    } else {
        r.complain("name", "must be gaussian_toy, ma2, contaminated_normal or external");
    }
    r.finish();
}

int model_summary_dim(const ModelChoice& m) {
    if (m.external) return m.external->d_s;
    if (m.name == "gaussian_toy")
        return m.toy.summary == GaussianToyConfig::Summary::MeanLogVar ? 2 : m.toy.coords;
    if (m.name == "ma2") return 3;
    return 2;  // contaminated_normal
}

int model_param_dim(const ModelChoice& m) {
    if (m.external) return m.external->d_theta;
    return m.name == "ma2" ? 2 : 1;
}

RunConfig parse_config_json(const json& root) {
    std::vector<std::string> bad;
    if (!root.is_object()) throw ConfigError({"top level must be a JSON object"});

    RunConfig cfg;
    ObjectReader r(root, "", bad);

    std::string method = "bsl";
    r.read_string("method", method);
    if (method == "bsl")
        cfg.method = RunConfig::Method::Bsl;
    else if (method == "rbsl")
        cfg.method = RunConfig::Method::Rbsl;
    else if (method == "abc_mcmc")
        cfg.method = RunConfig::Method::AbcMcmc;
    else if (method == "abc_rejection")
        cfg.method = RunConfig::Method::AbcRejection;
    else
        r.complain("method", "must be bsl, rbsl, abc_mcmc or abc_rejection");

    r.read_u64("seed", cfg.seed);
    r.read_int("threads", cfg.threads, 1, "must be >= 1");
    r.read_string("output_dir", cfg.output_dir);

    if (const json* m = r.take_object("model")) parse_model_block(*m, cfg.model, bad);

    std::optional<Vector> observed, theta_true;
    r.read_vector("observed", observed);
    r.read_vector("theta_true", theta_true);
    cfg.observed = std::move(observed);
    cfg.theta_true = std::move(theta_true);

    if (const json* prior = r.take("prior")) {
        if (cfg.model.external)
            cfg.model.external_prior = parse_prior_array(*prior, "prior", bad);
        else
            bad.push_back("prior: built-in models define their own prior");
    } else if (cfg.model.external) {
        bad.push_back("prior: required for external simulators");
    }

    std::optional<double> gamma;
    std::optional<bool> shrinkage;
    if (const json* est = r.take_object("estimator")) {
        ObjectReader er(*est, "estimator", bad);
        er.read_int("m", cfg.m, 2, "must be >= 2");
        er.read_opt_double("gamma", gamma, &in_unit, "must be in [0, 1]");
        er.read_opt_bool("shrinkage", shrinkage);
        er.read_bool("whitening", cfg.whitening);
        er.read_int("whitening_m0", cfg.whitening_m0, 2, "must be >= 2");
        er.read_vector("whitening_theta0", cfg.whitening_theta0);
        er.finish();
    }
    // shrinkage=true without an explicit gamma picks the house default 0.95
    if (gamma) {
        cfg.gamma = *gamma;
        if (shrinkage && !*shrinkage && cfg.gamma < 1.0)
            bad.push_back("estimator.shrinkage: false contradicts gamma < 1");
    } else if (shrinkage && *shrinkage) {
        cfg.gamma = 0.95;
    }

    std::optional<bool> adapt;
    if (const json* s = r.take_object("sampler")) {
        ObjectReader sr(*s, "sampler", bad);
        sr.read_int("iterations", cfg.iterations, 0, "must be >= 0");
        sr.read_int("burn_in", cfg.burn_in, 0, "must be >= 0");
        sr.read_vector("scales", cfg.scales);
        sr.read_opt_bool("adapt", adapt);
        sr.read_double("target_accept", cfg.target_accept, &in_open_unit,
                       "must be in (0, 1)");
        sr.finish();
    }
    // hit-or-miss kernels cap the acceptance rate below the usual target, so
    // the controller would shrink steps forever; default it off for abc_mcmc
    cfg.adapt = adapt ? *adapt : cfg.method != RunConfig::Method::AbcMcmc;

    if (const json* rb = r.take_object("rbsl")) {
        ObjectReader rr(*rb, "rbsl", bad);
        rr.read_double("lambda", cfg.rbsl_lambda, positive, "must be > 0");
        rr.read_double("adjustment_step", cfg.rbsl_adjustment_step, positive,
                       "must be > 0");
        rr.finish();
    }

    if (const json* a = r.take_object("abc")) {
        ObjectReader ar(*a, "abc", bad);
        std::string kernel = "uniform", distance = "mahalanobis";
        ar.read_string("kernel", kernel);
        if (kernel == "uniform")
            cfg.abc_kernel = AbcKernelConfig::Kernel::Uniform;
        else if (kernel == "gaussian")
            cfg.abc_kernel = AbcKernelConfig::Kernel::Gaussian;
        else
            ar.complain("kernel", "must be uniform or gaussian");
        ar.read_string("distance", distance);
        if (distance == "euclidean")
            cfg.abc_distance = AbcKernelConfig::Distance::Euclidean;
        else if (distance == "mahalanobis")
            cfg.abc_distance = AbcKernelConfig::Distance::Mahalanobis;
        else
            ar.complain("distance", "must be euclidean or mahalanobis");
        ar.read_int("m", cfg.abc_m, 1, "must be >= 1");
        ar.read_opt_double("epsilon", cfg.abc_epsilon, positive, "must be > 0");
        ar.read_double("epsilon_quantile", cfg.abc_epsilon_quantile, &unit_open_left,
                       "must be in (0, 1]");
        ar.read_int("pilot_budget", cfg.abc_pilot_budget, 2, "must be >= 2");
        ar.read_int("table_budget", cfg.abc_table_budget, 1, "must be >= 1");
        ar.read_int("budget", cfg.abc_budget, 1, "must be >= 1");
        ar.finish();
    }

    r.finish();

    // cross-field checks need the model dimensions
    const int d_s = model_summary_dim(cfg.model);
    const int d_theta = model_param_dim(cfg.model);

    if (cfg.observed && cfg.theta_true)
        bad.push_back("observed and theta_true are mutually exclusive");
    if (!cfg.observed && !cfg.theta_true)
        bad.push_back("one of observed or theta_true is required");
    if (cfg.observed && cfg.observed->size() != d_s)
        bad.push_back("observed: expected " + std::to_string(d_s) + " values");
    if (cfg.theta_true && cfg.theta_true->size() != d_theta)
        bad.push_back("theta_true: expected " + std::to_string(d_theta) + " values");
    if (cfg.model.external && cfg.theta_true)
        bad.push_back("theta_true: external simulators need an explicit observed "
                      "summary");
    if (cfg.scales) {
        if (cfg.scales->size() != d_theta)
            bad.push_back("sampler.scales: expected " + std::to_string(d_theta) +
                          " values");
        else
            for (Eigen::Index i = 0; i < cfg.scales->size(); ++i)
                if (!((*cfg.scales)[i] > 0.0)) {
                    bad.push_back("sampler.scales: entries must be > 0");
                    break;
                }
    }
    if (cfg.whitening_theta0 && cfg.whitening_theta0->size() != d_theta)
        bad.push_back("estimator.whitening_theta0: expected " +
                      std::to_string(d_theta) + " values");
    if (cfg.whitening && cfg.whitening_m0 < d_s + 2)
        bad.push_back("estimator.whitening_m0: must be >= summary dim + 2");
    if (cfg.method == RunConfig::Method::Rbsl && cfg.whitening)
        bad.push_back("estimator.whitening: not available with method rbsl");
    if (cfg.method == RunConfig::Method::Rbsl && cfg.gamma < 1.0)
        bad.push_back("estimator.gamma: shrinkage is not available with method rbsl");
    if (cfg.model.external &&
        static_cast<int>(cfg.model.external_prior.size()) != d_theta &&
        !cfg.model.external_prior.empty())
        bad.push_back("prior: expected " + std::to_string(d_theta) + " marginals");
    if (cfg.abc_epsilon_quantile * static_cast<double>(cfg.abc_table_budget) < 1.0)
        bad.push_back("abc.epsilon_quantile: too small for table_budget (keeps "
                      "nothing)");

    if (!cfg.model.external && bad.empty()) {
        try {
            make_model(cfg.model);
        } catch (const Error& e) {
            bad.push_back(std::string("model: ") + e.what());
        }
    }

    if (!bad.empty()) throw ConfigError(bad);

    // materialize remaining defaults so the snapshot is complete; kernel
    // samplers pick their scales from the rejection table at run time, so
    // theirs stay unset unless given explicitly
    if (!cfg.scales && (cfg.method == RunConfig::Method::Bsl ||
                        cfg.method == RunConfig::Method::Rbsl)) {
        const Prior prior = model_prior(cfg.model);
        cfg.scales = prior.sds();
    }
    if (cfg.whitening && !cfg.whitening_theta0) {
        const Prior prior = model_prior(cfg.model);
        cfg.whitening_theta0 = prior.mean();
    }
    return cfg;
}

json parse_text_to_json(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) throw ConfigError({"not valid JSON"});
    return root;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace

std::unique_ptr<SimulatorModel> make_model(const ModelChoice& choice) {
    if (choice.external) return std::make_unique<ExternalSimulator>(*choice.external);
    if (choice.name == "gaussian_toy")
        return std::make_unique<GaussianToyModel>(choice.toy);
    if (choice.name == "ma2") return std::make_unique<Ma2Model>(choice.ma2);
    if (choice.name == "contaminated_normal")
        return std::make_unique<ContaminatedNormalModel>(choice.contaminated);
    throw InvalidArgumentError("unknown model name: " + choice.name);
}

Prior model_prior(const ModelChoice& choice) {
    if (choice.external) {
        if (choice.external_prior.empty())
            throw InvalidArgumentError("external model needs a prior");
        return Prior(choice.external_prior);
    }
    if (choice.name == "gaussian_toy") return GaussianToyModel(choice.toy).prior();
    if (choice.name == "ma2") return Ma2Model(choice.ma2).prior();
    if (choice.name == "contaminated_normal")
        return ContaminatedNormalModel(choice.contaminated).prior();
    throw InvalidArgumentError("unknown model name: " + choice.name);
}

RunConfig parse_config_text(const std::string& text) {
    return parse_config_json(parse_text_to_json(text));
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_snapshot(const RunConfig& cfg) {
    json root;
    switch (cfg.method) {
        case RunConfig::Method::Bsl: root["method"] = "bsl"; break;
        case RunConfig::Method::Rbsl: root["method"] = "rbsl"; break;
        case RunConfig::Method::AbcMcmc: root["method"] = "abc_mcmc"; break;
        case RunConfig::Method::AbcRejection: root["method"] = "abc_rejection"; break;
    }
    root["seed"] = cfg.seed;
    root["threads"] = cfg.threads;
    if (!cfg.output_dir.empty()) root["output_dir"] = cfg.output_dir;

    json model;
    model["name"] = cfg.model.external ? "external" : cfg.model.name;
    if (cfg.model.external) {
        const auto& e = *cfg.model.external;
        model["command"] = e.command;
        model["d_theta"] = e.d_theta;
        model["d_s"] = e.d_s;
        model["n"] = e.n;
        model["handshake_timeout_s"] = e.handshake_timeout_s;
        model["request_timeout_s"] = e.request_timeout_s;
        json prior = json::array();
        for (const auto& m : cfg.model.external_prior) {
            if (m.kind == PriorMarginal::Kind::Uniform)
                prior.push_back({{"kind", "uniform"}, {"low", m.a}, {"high", m.b}});
            else
                prior.push_back({{"kind", "normal"}, {"mean", m.a}, {"sd", m.b}});
        }
        root["prior"] = prior;
    } else if (cfg.model.name == "gaussian_toy") {
        const auto& t = cfg.model.toy;
        model["n"] = t.n;
        model["sigma0"] = t.sigma0;
        model["prior_mean"] = t.prior_mean;
        model["prior_sd"] = t.prior_sd;
        model["summary"] = t.summary == GaussianToyConfig::Summary::MeanLogVar
                               ? "mean_logvar"
                               : "coord_means";
        model["coords"] = t.coords;
    } else if (cfg.model.name == "ma2") {
        model["n"] = cfg.model.ma2.n;
    } else {
        const auto& c = cfg.model.contaminated;
        model["n"] = c.n;
        model["sigma_true"] = c.sigma_true;
        model["prior_mean"] = c.prior_mean;
        model["prior_sd"] = c.prior_sd;
    }
    root["model"] = model;

    if (cfg.observed) root["observed"] = vector_to_json(*cfg.observed);
    if (cfg.theta_true) root["theta_true"] = vector_to_json(*cfg.theta_true);

    json est;
    est["m"] = cfg.m;
    est["gamma"] = cfg.gamma;
    est["whitening"] = cfg.whitening;
    est["whitening_m0"] = cfg.whitening_m0;
    if (cfg.whitening_theta0)
        est["whitening_theta0"] = vector_to_json(*cfg.whitening_theta0);
    root["estimator"] = est;

    json sampler;
    sampler["iterations"] = cfg.iterations;
    sampler["burn_in"] = cfg.burn_in;
    if (cfg.scales) sampler["scales"] = vector_to_json(*cfg.scales);
    sampler["adapt"] = cfg.adapt;
    sampler["target_accept"] = cfg.target_accept;
    root["sampler"] = sampler;

    root["rbsl"] = {{"lambda", cfg.rbsl_lambda},
                    {"adjustment_step", cfg.rbsl_adjustment_step}};

    json abc;
    abc["kernel"] =
        cfg.abc_kernel == AbcKernelConfig::Kernel::Uniform ? "uniform" : "gaussian";
    abc["distance"] = cfg.abc_distance == AbcKernelConfig::Distance::Euclidean
                          ? "euclidean"
                          : "mahalanobis";
    abc["m"] = cfg.abc_m;
    if (cfg.abc_epsilon) abc["epsilon"] = *cfg.abc_epsilon;
    abc["epsilon_quantile"] = cfg.abc_epsilon_quantile;
    abc["pilot_budget"] = cfg.abc_pilot_budget;
    abc["table_budget"] = cfg.abc_table_budget;
    abc["budget"] = cfg.abc_budget;
    root["abc"] = abc;

    return root.dump(2) + "\n";
}

namespace {

ExperimentFile parse_experiment_json(const json& root) {
    std::vector<std::string> bad;
    if (!root.is_object()) throw ConfigError({"top level must be a JSON object"});

    ExperimentFile out;
    ExperimentSpec& spec = out.spec;
    ObjectReader r(root, "", bad);

    std::string id;
    r.read_string("experiment", id);
    if (id == "compare_abc_bsl")
        spec.id = ExperimentSpec::Id::CompareAbcBsl;
    else if (id == "sl_variance_scaling")
        spec.id = ExperimentSpec::Id::SlVarianceScaling;
    else if (id == "misspecification_demo")
        spec.id = ExperimentSpec::Id::MisspecificationDemo;
    else
        r.complain("experiment", "must be compare_abc_bsl, sl_variance_scaling or "
                                 "misspecification_demo");

    // model defaults follow the experiment
    if (spec.id == ExperimentSpec::Id::SlVarianceScaling) spec.model = "gaussian_toy";
    if (spec.id == ExperimentSpec::Id::MisspecificationDemo)
        spec.model = "contaminated_normal";
    if (spec.id == ExperimentSpec::Id::MisspecificationDemo) spec.replicates = 20;

    r.read_string("model", spec.model);
    r.read_string("output_dir", out.output_dir);
    r.read_int("replicates", spec.replicates, 2, "must be >= 2");
    r.read_u64("seed", spec.seed);
    r.read_int("threads", spec.threads, 1, "must be >= 1");
    std::optional<Vector> theta_true;
    r.read_vector("theta_true", theta_true);
    if (theta_true)
        spec.theta_true.assign(theta_true->data(), theta_true->data() + theta_true->size());

    r.read_int("budget", spec.budget, 1, "must be >= 1");
    r.read_int("bsl_m", spec.bsl_m, 2, "must be >= 2");
    r.read_int("abc_m", spec.abc_m, 1, "must be >= 1");
    r.read_int("pilot_budget", spec.pilot_budget, 2, "must be >= 2");
    r.read_int("table_budget", spec.table_budget, 1, "must be >= 1");
    r.read_double("epsilon_quantile", spec.epsilon_quantile, &unit_open_left,
                  "must be in (0, 1]");

    r.read_int_list("ds_grid", spec.ds_grid);
    r.read_int_list("m_grid", spec.m_grid);
    r.read_double("gamma", spec.gamma, &in_unit, "must be in [0, 1]");
    r.read_int("whitening_m0", spec.whitening_m0, 2, "must be >= 2");

    r.read_double("sigma_true", spec.sigma_true, positive, "must be > 0");
    r.read_int("rbsl_m", spec.rbsl_m, 2, "must be >= 2");
    r.read_double("rbsl_lambda", spec.rbsl_lambda, positive, "must be > 0");
    r.read_double("rbsl_adjustment_step", spec.rbsl_adjustment_step, positive,
                  "must be > 0");
    r.read_int("iterations", spec.iterations, 1, "must be >= 1");
    r.read_int("burn_in", spec.burn_in, 0, "must be >= 0");

    r.finish();
    for (const auto& v : spec.validate()) bad.push_back(v);
    if (!bad.empty()) throw ConfigError(bad);
    return out;
}

}  // namespace

ExperimentFile parse_experiment_text(const std::string& text) {
    return parse_experiment_json(parse_text_to_json(text));
}

ExperimentFile parse_experiment_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open experiment file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_experiment_text(buf.str());
}

std::string experiment_snapshot(const ExperimentFile& file) {
    const ExperimentSpec& spec = file.spec;
    json root;
    root["experiment"] = experiment_id_name(spec.id);
    root["model"] = spec.model;
    if (!file.output_dir.empty()) root["output_dir"] = file.output_dir;
    root["replicates"] = spec.replicates;
    root["seed"] = spec.seed;
    root["threads"] = spec.threads;
    if (!spec.theta_true.empty()) root["theta_true"] = spec.theta_true;
    root["budget"] = spec.budget;
    root["bsl_m"] = spec.bsl_m;
    root["abc_m"] = spec.abc_m;
    root["pilot_budget"] = spec.pilot_budget;
    root["table_budget"] = spec.table_budget;
    root["epsilon_quantile"] = spec.epsilon_quantile;
    root["ds_grid"] = spec.ds_grid;
    root["m_grid"] = spec.m_grid;
    root["gamma"] = spec.gamma;
    root["whitening_m0"] = spec.whitening_m0;
    root["sigma_true"] = spec.sigma_true;
    root["rbsl_m"] = spec.rbsl_m;
    root["rbsl_lambda"] = spec.rbsl_lambda;
    root["rbsl_adjustment_step"] = spec.rbsl_adjustment_step;
    root["iterations"] = spec.iterations;
    root["burn_in"] = spec.burn_in;
    return root.dump(2) + "\n";
}

}  // namespace bsl
