#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <CLI11.hpp>
#include <json.hpp>
#include <structnet/dataset.hpp>
#include <structnet/eval.hpp>
#include <structnet/io.hpp>
#include <structnet/latent_em.hpp>
#include <structnet/neighborhood.hpp>
#include <structnet/netsim.hpp>
#include <structnet/penalty_select.hpp>
#include <structnet/report.hpp>
#include <structnet/rng.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace structnet;

namespace {

/// Binds CLI11 options to keys of a JSON config; flags given on the command line win.
class Overrides
{
public:
    explicit Overrides(CLI::App* app)
        : app_(app)
    {}

    template <class T>
    void add(const std::string& flag, const std::string& key, const std::string& help)
    {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app_->add_option(flag, *value, help);
        appliers_.push_back([opt, value, key](json& cfg) {
            if (opt->count() > 0) cfg[key] = *value;
        });
    }

    void apply(json& cfg) const
    {
        for (const auto& a : appliers_) a(cfg);
    }

private:
    CLI::App* app_;
    std::vector<std::function<void(json&)>> appliers_;
};

struct Command
{
    CLI::App* app = nullptr;
    std::string config_path;
    std::unique_ptr<Overrides> overrides;
    json defaults;
};

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

json effective_config(const Command& c)
{
    json cfg = c.defaults;
    if (!c.config_path.empty()) {
        const json file = read_json_file(c.config_path);
        if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
        for (const auto& [k, v] : file.items()) {
            if (!cfg.contains(k)) throw ConfigError("unknown config key '" + k + "'");
            cfg[k] = v;
        }
    }
    c.overrides->apply(cfg);
    return cfg;
}

template <class T>
T get(const json& cfg, const std::string& key)
{
    const auto& v = cfg.at(key);
    if (v.is_null()) throw ConfigError("'" + key + "' is required");
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("'" + key + "' has the wrong type");
    }
}

std::uint64_t get_seed(const json& cfg)
{
    if (cfg.at("seed").is_null()) throw ConfigError("'seed' is required");
    return get<std::uint64_t>(cfg, "seed");
}

fs::path output_dir(const json& cfg)
{
    const fs::path out = get<std::string>(cfg, "out");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw ConfigError("cannot create output directory '" + out.string() + "'");
    return out;
}

std::string input_path(const json& cfg, const std::string& key)
{
    const auto path = get<std::string>(cfg, key);
    if (!fs::is_regular_file(path)) throw ConfigError("'" + key + "': file '" + path + "' does not exist");
    return path;
}

void echo_config(const json& cfg, const fs::path& out)
{
    io::write_text((out / "config.json").string(), cfg.dump(2) + "\n");
}

void write_json(const fs::path& path, const json& j)
{
    io::write_text(path.string(), j.dump(2) + "\n");
}

netsim::AffiliationSpec spec_from(const json& cfg, std::uint64_t seed)
{
    netsim::AffiliationSpec spec;
    spec.p = get<Index>(cfg, "p");
    spec.clusters = get<Index>(cfg, "clusters");
    const auto alpha = cfg.at("alpha");
    if (!alpha.is_null()) {
        const auto a = get<std::vector<double>>(cfg, "alpha");
        spec.alpha = Eigen::Map<const Vector<double>>(a.data(), Index(a.size()));
    }
    spec.p_in = get<double>(cfg, "p_in");
    spec.p_out = get<double>(cfg, "p_out");
    spec.seed = seed;
    spec.validate();
    return spec;
}

em::EmConfig em_from(const json& cfg, std::uint64_t seed)
{
    em::EmConfig ec;
    ec.clusters = get<Index>(cfg, "clusters");
    ec.lambda_ratio = get<double>(cfg, "lambda_ratio");
    ec.em_tol = get<double>(cfg, "em_tol");
    ec.em_max_iter = get<int>(cfg, "em_max_iter");
    ec.fixedpoint_tol = get<double>(cfg, "fixedpoint_tol");
    ec.fixedpoint_max_iter = get<int>(cfg, "fixedpoint_max_iter");
    if (!cfg.at("inv_lambda0").is_null()) ec.inv_lambda0 = get<double>(cfg, "inv_lambda0");
    ec.seed = seed;
    ec.validate();
    return ec;
}

// simulate ---------------------------------------------------------------

int run_simulate(const json& cfg)
{
    const std::uint64_t seed = get_seed(cfg);
    const auto spec = spec_from(cfg, rng::substream_seed(seed, "structure"));
    const Index n = get<Index>(cfg, "n");
    if (n < 2) throw ConfigError("'n' must be at least 2");
    const fs::path out = output_dir(cfg);

    const auto gt = netsim::sample_structure(spec);
    const auto data = netsim::sample_data(gt, n, rng::substream_seed(seed, "data"));
    write_dataset_csv((out / "data.csv").string(), data);
    netsim::write_ground_truth(gt, out);
    echo_config(cfg, out);
    std::cout << "simulated " << n << " x " << spec.p << " with " << gt.edge_count() << " edges\n";
    return 0;
}

// infer ------------------------------------------------------------------

int run_infer(const json& cfg)
{
    const auto method = get<std::string>(cfg, "method");
    static const std::vector<std::string> methods{"simone", "simone-perfect", "glasso", "mb-and", "mb-or"};
    if (std::find(methods.begin(), methods.end(), method) == methods.end())
        throw ConfigError("unknown method '" + method + "'");
    const std::uint64_t seed = get_seed(cfg);
    const Dataset data = read_dataset_csv(input_path(cfg, "data"));
    data.validate();
    std::vector<int> labels;
    if (method == "simone-perfect") {
        if (cfg.at("labels").is_null()) throw ConfigError("'labels' is required for method simone-perfect");
        labels = io::read_labels_csv(input_path(cfg, "labels"));
    }
    em::EmConfig ec = em_from(cfg, seed);
    const double epsilon = get<double>(cfg, "epsilon");
    const fs::path out = output_dir(cfg);

    const Index n = data.n(), p = data.p();
    const auto s = empirical_covariance(data);
    const double inv0 = ec.inv_lambda0 ? *ec.inv_lambda0 : glasso::default_inv_lambda0(s, n);
    ec.inv_lambda0 = inv0;

    std::optional<double> weight;
    if (!cfg.at("penalty").is_null()) {
        weight = get<double>(cfg, "penalty");
        if (!(*weight > 0)) throw ConfigError("'penalty' must be positive");
    }
    // calibrated default: the weight implied by the component-merge bound
    auto calibrated = [&] { return 1.0 / lambda_floor({epsilon, n, p}, s); };

    json summary{{"method", method}, {"n", n}, {"p", p}, {"inv_lambda0", inv0}};
    if (method == "glasso") {
        const double w = weight ? *weight : calibrated();
        const auto est = glasso::solve_uniform(s, w, n, inv0, ec.glasso);
        report::write_precision(est, out);
        summary["penalty"] = w;
        summary["edges"] = (edge_mask(est.k).count()) / 2;
        summary["cycles"] = est.cycles;
    } else if (method == "mb-and" || method == "mb-or") {
        const double w = weight ? *weight : calibrated();
        const auto r = mb_select(s, PenaltyMatrix<double>::uniform(p, w, n));
        io::write_matrix_csv((out / "coef.csv").string(), r.coef);
        write_neighborhood_edges(r, out / "edges.csv");
        summary["penalty"] = w;
        summary["edges"] = (method == "mb-and" ? r.adjacency_and.count() : r.adjacency_or.count()) / 2;
    } else {
        std::optional<Matrix<double>> lam;
        if (weight) lam = em::affiliation_lambda(ec.clusters, 1.0 / *weight, 1.0 / (*weight * ec.lambda_ratio));
        std::optional<LatentPosterior> known;
        if (method == "simone-perfect") {
            if (Index(labels.size()) != p)
                throw ConfigError("'labels' has " + std::to_string(labels.size()) + " entries, expected "
                                  + std::to_string(p));
            known = LatentPosterior::from_labels(labels, ec.clusters);
        }
        const auto res = em::run_em(s, n, ec, lam, known);
        report::write_precision(res.estimate, out);
        report::write_em_result(res, out);
        if (weight) summary["penalty"] = *weight;
        summary["edges"] = (edge_mask(res.estimate.k).count()) / 2;
        summary["em_iterations"] = res.iterations;
        summary["converged"] = res.converged;
    }
    write_json(out / "summary.json", summary);
    echo_config(cfg, out);
    std::cout << summary.dump() << "\n";
    return 0;
}

// benchmark --------------------------------------------------------------

int run_benchmark_cmd(const json& cfg)
{
    eval::BenchConfig bc;
    bc.seed = get_seed(cfg);
    bc.spec = spec_from(cfg, bc.seed);
    bc.n = get<Index>(cfg, "n");
    bc.replicates = get<Index>(cfg, "replicates");
    bc.methods = get<std::vector<std::string>>(cfg, "methods");
    bc.grid_size = get<Index>(cfg, "grid_size");
    bc.grid_min_ratio = get<double>(cfg, "grid_min_ratio");
    bc.em = em_from(cfg, bc.seed);
    bc.lambda_ratio = bc.em.lambda_ratio;
    bc.validate();
    const fs::path out = output_dir(cfg);

    const auto res = eval::run_benchmark(bc);
    fs::create_directories(out / "curves");
    for (const auto& run : res.runs)
        eval::write_pr_curve_csv(run.curve, out / "curves" / (run.method + "_r" + std::to_string(run.replicate) + ".csv"));
    const json summary = eval::summary_json(res, bc);
    write_json(out / "summary.json", summary);
    echo_config(cfg, out);
    for (const auto& [name, sm] : res.summary)
        std::cout << name << " aupr " << sm.mean << " (sd " << sm.sd << ")\n";
    return 0;
}

// select-penalty ---------------------------------------------------------

int run_select_penalty(const json& cfg)
{
    SymmetricMatrix<double> s;
    Index n = 0;
    if (!cfg.at("data").is_null()) {
        const Dataset data = read_dataset_csv(input_path(cfg, "data"));
        data.validate();
        s = empirical_covariance(data);
        n = data.n();
    } else if (!cfg.at("covariance").is_null()) {
        s = io::read_symmetric_csv(input_path(cfg, "covariance"));
        n = get<Index>(cfg, "n");
    } else {
        throw ConfigError("one of 'data' or 'covariance' is required");
    }
    const ErrorBudget budget{get<double>(cfg, "epsilon"), n, s.dim()};
    try {
        budget.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const double multiplier = get<double>(cfg, "multiplier");
    if (!(multiplier > 0)) throw ConfigError("'multiplier' must be positive");

    const double lam = lambda_floor(budget, s);
    json rep{{"epsilon", budget.epsilon},
             {"n", n},
             {"p", s.dim()},
             {"lambda_floor", lam},
             {"penalty_weight", 1.0 / lam},
             {"multiplier", multiplier},
             {"suggested_lambda", multiplier * lam},
             {"suggested_penalty_weight", 1.0 / (multiplier * lam)}};
    if (!cfg.at("labels").is_null()) {
        const auto labels = io::read_labels_csv(input_path(cfg, "labels"));
        const Matrix<double> cw = lambda_floor_classwise(budget, s, labels);
        json rows = json::array();
        for (Index q = 0; q < cw.rows(); ++q) {
            std::vector<double> row(cw.cols());
            for (Index l = 0; l < cw.cols(); ++l) row[std::size_t(l)] = cw(q, l);
            rows.push_back(row);
        }
        rep["lambda_floor_classwise"] = rows;
    }
    if (!cfg.at("out").is_null()) {
        const fs::path out = output_dir(cfg);
        write_json(out / "penalty.json", rep);
        echo_config(cfg, out);
    }
    std::cout << rep.dump(2) << "\n";
    return 0;
}

json em_defaults()
{
    const em::EmConfig ec;
    return {{"clusters", ec.clusters},
            {"lambda_ratio", ec.lambda_ratio},
            {"em_tol", ec.em_tol},
            {"em_max_iter", ec.em_max_iter},
            {"fixedpoint_tol", ec.fixedpoint_tol},
            {"fixedpoint_max_iter", ec.fixedpoint_max_iter},
            {"inv_lambda0", nullptr}};
}

void add_em_flags(Overrides& o)
{
    o.add<Index>("--clusters,-Q", "clusters", "number of latent clusters");
    o.add<double>("--lambda-ratio", "lambda_ratio", "lambda_in / lambda_out");
    o.add<double>("--em-tol", "em_tol", "relative EM stopping tolerance");
    o.add<int>("--em-max-iter", "em_max_iter", "EM iteration budget");
    o.add<double>("--fixedpoint-tol", "fixedpoint_tol", "E-step fixed-point tolerance");
    o.add<int>("--fixedpoint-max-iter", "fixedpoint_max_iter", "E-step iteration budget");
    o.add<double>("--inv-lambda0", "inv_lambda0", "diagonal l1 weight 1/lambda0");
}

void add_spec_flags(Overrides& o)
{
    o.add<Index>("--p", "p", "number of variables");
    o.add<std::vector<double>>("--alpha", "alpha", "cluster proportions");
    o.add<double>("--p-in", "p_in", "within-cluster edge probability");
    o.add<double>("--p-out", "p_out", "between-cluster edge probability");
    o.add<Index>("--n", "n", "sample size");
}

std::string version_text()
{
    const GlassoSettings gs;
    const lasso::LassoSettings ls;
    json d{{"em", em_defaults()},
           {"glasso", {{"tol", gs.tol}, {"max_cycles", gs.max_cycles}, {"lasso_tol_factor", gs.lasso_tol_factor},
                       {"lasso_max_sweeps", gs.lasso_max_sweeps}}},
           {"lasso", {{"tol", ls.tol}, {"max_sweeps", ls.max_sweeps}}},
           {"epsilon", ErrorBudget{}.epsilon},
           {"lambda_floor_value", em::lambda_floor_value}};
    return std::string("structnet ") + STRUCTNET_VERSION + "\ndefaults " + d.dump();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse Gaussian graphical models with latent-block penalties"};
    app.set_version_flag("--version", version_text());
    app.require_subcommand(1);

    std::map<std::string, Command> cmds;
    auto make = [&](const std::string& name, const std::string& help, json defaults) -> Command& {
        Command& c = cmds[name];
        c.app = app.add_subcommand(name, help);
        c.app->add_option("--config,-c", c.config_path, "JSON config file");
        c.overrides = std::make_unique<Overrides>(c.app);
        c.overrides->add<std::uint64_t>("--seed", "seed", "top-level seed");
        c.overrides->add<std::string>("--out,-o", "out", "output directory");
        c.defaults = std::move(defaults);
        return c;
    };

    {
        Command& c = make("simulate", "sample an affiliation network and Gaussian data",
                          {{"p", 50}, {"clusters", 2}, {"alpha", nullptr}, {"p_in", 0.2}, {"p_out", 0.01},
                           {"n", 100}, {"seed", nullptr}, {"out", "sim"}});
        add_spec_flags(*c.overrides);
        c.overrides->add<Index>("--clusters,-Q", "clusters", "number of clusters");
    }
    {
        json d = em_defaults();
        d.update({{"method", "simone"}, {"data", nullptr}, {"labels", nullptr}, {"penalty", nullptr},
                  {"epsilon", ErrorBudget{}.epsilon}, {"seed", nullptr}, {"out", "infer"}});
        Command& c = make("infer", "estimate a sparse precision matrix", d);
        add_em_flags(*c.overrides);
        c.overrides->add<std::string>("--method,-m", "method", "simone, simone-perfect, glasso, mb-and or mb-or");
        c.overrides->add<std::string>("--data,-d", "data", "dataset CSV");
        c.overrides->add<std::string>("--labels", "labels", "labels CSV (simone-perfect)");
        c.overrides->add<double>("--penalty", "penalty", "l1 weight; for SIMoNe 1/lambda_in");
        c.overrides->add<double>("--epsilon", "epsilon", "error budget of the default penalty");
    }
    {
        json d = em_defaults();
        d.update({{"p", 50}, {"clusters", 2}, {"alpha", nullptr}, {"p_in", 0.2}, {"p_out", 0.01}, {"n", 100},
                  {"replicates", 1}, {"methods", {"glasso", "simone", "simone-perfect"}}, {"grid_size", 12},
                  {"grid_min_ratio", 0.02}, {"seed", nullptr}, {"out", "bench"}});
        Command& c = make("benchmark", "precision/recall benchmark on simulated networks", d);
        add_spec_flags(*c.overrides);
        add_em_flags(*c.overrides);
        c.overrides->add<Index>("--replicates,-r", "replicates", "number of replicates");
        c.overrides->add<std::vector<std::string>>("--methods", "methods", "methods to compare");
        c.overrides->add<Index>("--grid-size", "grid_size", "penalty grid points");
        c.overrides->add<double>("--grid-min-ratio", "grid_min_ratio", "smallest grid point relative to the top");
    }
    {
        Command& c = make("select-penalty", "penalty calibrated on the component-merge error",
                          {{"data", nullptr}, {"covariance", nullptr}, {"n", nullptr}, {"labels", nullptr},
                           {"epsilon", ErrorBudget{}.epsilon}, {"multiplier", 1.0}, {"seed", nullptr},
                           {"out", nullptr}});
        c.overrides->add<std::string>("--data,-d", "data", "dataset CSV");
        c.overrides->add<std::string>("--covariance", "covariance", "covariance CSV (needs --n)");
        c.overrides->add<Index>("--n", "n", "sample size behind the covariance");
        c.overrides->add<std::string>("--labels", "labels", "labels CSV for classwise floors");
        c.overrides->add<double>("--epsilon", "epsilon", "tolerated merge probability");
        c.overrides->add<double>("--multiplier", "multiplier", "factor applied to lambda_floor");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::map<std::string, std::function<int(const json&)>> runners{
        {"simulate", run_simulate},
        {"infer", run_infer},
        {"benchmark", run_benchmark_cmd},
        {"select-penalty", run_select_penalty}};

    for (auto& [name, c] : cmds) {
        if (!c.app->parsed()) continue;
        try {
            return runners.at(name)(effective_config(c));
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const json::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return 2;
}
