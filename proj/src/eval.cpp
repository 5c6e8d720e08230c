#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <structnet/eval.hpp>
#include <structnet/io.hpp>
#include <structnet/neighborhood.hpp>
#include <structnet/rng.hpp>

namespace structnet::eval {
namespace {

void check_masks(const Mask& a, const Mask& b)
{
    if (a.rows() != a.cols() || a.rows() != b.rows() || b.rows() != b.cols()) {
        throw DimensionError("edge masks must be square and of equal size");
    }
}

class UnionFind
{
public:
    explicit UnionFind(Index n)
        : parent_(std::size_t(n))
    {
        std::iota(parent_.begin(), parent_.end(), Index(0));
    }

    Index find(Index x)
    {
        while (parent_[std::size_t(x)] != x) {
            parent_[std::size_t(x)] = parent_[std::size_t(parent_[std::size_t(x)])];
            x = parent_[std::size_t(x)];
        }
        return x;
    }

    void unite(Index a, Index b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::size_t(std::max(a, b))] = std::min(a, b);
    }

private:
    std::vector<Index> parent_;
};

Mask partial_correlation_mask(const SymmetricMatrix<double>& kinv, double threshold)
{
    const Index p = kinv.dim();
    Mask m = Mask::Constant(p, p, false);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < j; ++i) {
            const double pc = std::abs(kinv(i, j)) / std::sqrt(kinv(i, i) * kinv(j, j));
            m(i, j) = m(j, i) = pc > threshold;
        }
    return m;
}

} // namespace

Confusion confusion(const Mask& est, const Mask& truth)
{
    check_masks(est, truth);
    Confusion c;
    for (Index j = 0; j < est.cols(); ++j)
        for (Index i = 0; i < j; ++i) {
            const bool e = est(i, j), t = truth(i, j);
            if (e && t) ++c.tp;
            else if (e) ++c.fp;
            else if (t) ++c.fn;
            else ++c.tn;
        }
    return c;
}

double aupr(const std::vector<PRPoint>& points)
{
    std::map<double, double> best;
    for (const auto& pt : points) {
        auto [it, inserted] = best.emplace(pt.recall, pt.precision);
        if (!inserted) it->second = std::max(it->second, pt.precision);
    }
    if (best.empty()) return 0.0;
    best.emplace(0.0, 1.0);
    double area = 0;
    auto prev = best.begin();
    for (auto it = std::next(best.begin()); it != best.end(); ++it, ++prev)
        area += (it->first - prev->first) * (it->second + prev->second) / 2.0;
    return area;
}

PRCurve pr_sweep(const Mask& truth, const std::vector<double>& grid, const Selector& select)
{
    if (grid.empty()) throw DomainError("penalty grid is empty");
    PRCurve curve;
    for (const double pen : grid) {
        if (!(pen > 0) || !std::isfinite(pen)) throw DomainError("penalty grid values must be positive");
        try {
            const Mask est = select(pen);
            PRPoint pt;
            pt.penalty = pen;
            pt.counts = confusion(est, truth);
            pt.precision = pt.counts.precision();
            pt.recall = pt.counts.recall();
            curve.points.push_back(pt);
        } catch (const Error& e) {
            curve.skipped.push_back(io::format_double(pen) + ": " + e.what());
        }
    }
    curve.aupr = aupr(curve.points);
    return curve;
}

std::vector<double> penalty_grid(double top, Index size, double min_ratio)
{
    if (!(top > 0) || size < 1 || !(min_ratio > 0 && min_ratio < 1)) {
        throw DomainError("grid needs top > 0, size >= 1 and min_ratio in (0, 1)");
    }
    const double hi = std::log(top * 1.01), lo = std::log(top * min_ratio);
    std::vector<double> g(static_cast<std::size_t>(size));
    for (Index k = 0; k < size; ++k)
        g[std::size_t(k)] = size == 1 ? top * 1.01 : std::exp(lo + (hi - lo) * double(k) / double(size - 1));
    return g;
}

Containment component_containment(const Mask& est, const Mask& truth)
{
    check_masks(est, truth);
    const Index p = est.rows();
    UnionFind uf(p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < j; ++i)
            if (truth(i, j) || truth(j, i)) uf.unite(i, j);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < j; ++i)
            if ((est(i, j) || est(j, i)) && uf.find(i) != uf.find(j)) return {false, i};
    return {};
}

void write_pr_curve_csv(const PRCurve& curve, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "penalty,tp,fp,tn,fn,precision,recall\n";
    for (const auto& pt : curve.points) {
        out << io::format_double(pt.penalty) << ',' << pt.counts.tp << ',' << pt.counts.fp << ',' << pt.counts.tn
            << ',' << pt.counts.fn << ',' << io::format_double(pt.precision) << ',' << io::format_double(pt.recall)
            << '\n';
    }
}

void BenchConfig::validate() const
{
    spec.validate();
    em.validate();
    if (n < 2) throw ConfigError("n must be at least 2");
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
    if (methods.empty()) throw ConfigError("methods must not be empty");
    for (const auto& m : methods)
        if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
            throw ConfigError("unknown method '" + m + "'");
    if (grid_size < 1) throw ConfigError("grid_size must be at least 1");
    if (!(grid_min_ratio > 0 && grid_min_ratio < 1)) throw ConfigError("grid_min_ratio must lie in (0, 1)");
    if (!(lambda_ratio > 0)) throw ConfigError("lambda_ratio must be positive");
    if (em.clusters > spec.p) throw ConfigError("Q exceeds p");
}

PRCurve method_curve(const std::string& method, const SymmetricMatrix<double>& s, Index n,
                     const netsim::GroundTruth& gt, const BenchConfig& cfg)
{
    const Mask truth = gt.symmetric_edges();
    const double inv0 = cfg.em.inv_lambda0 ? *cfg.em.inv_lambda0 : glasso::default_inv_lambda0(s, n);
    const double top = glasso::max_penalty(s, n);
    const auto grid = penalty_grid(top, cfg.grid_size, cfg.grid_min_ratio);

    if (method == "glasso") {
        return pr_sweep(truth, grid, [&](double rho) {
            return edge_mask(glasso::solve_uniform(s, rho, n, inv0, cfg.em.glasso).k);
        });
    }
    if (method == "simone" || method == "simone-perfect") {
        em::EmConfig ec = cfg.em;
        ec.inv_lambda0 = inv0;
        std::optional<LatentPosterior> known;
        if (method == "simone-perfect") known = LatentPosterior::from_labels(gt.z, ec.clusters);
        return pr_sweep(truth, grid, [&](double rho) {
            const double lin = 1.0 / rho;
            const auto lam = em::affiliation_lambda(ec.clusters, lin, lin / cfg.lambda_ratio);
            return edge_mask(em::run_em(s, n, ec, lam, known).estimate.k);
        });
    }
    if (method == "mb-and" || method == "mb-or") {
        const auto mgrid = penalty_grid(mb_max_penalty(s, n), cfg.grid_size, cfg.grid_min_ratio);
        const bool use_and = method == "mb-and";
        return pr_sweep(truth, mgrid, [&](double rho) {
            const auto r = mb_select(s, PenaltyMatrix<double>::uniform(s.dim(), rho, n));
            return use_and ? r.adjacency_and : r.adjacency_or;
        });
    }
    if (method == "invcor") {
        if (!is_positive_definite(s)) {
            PRCurve c;
            c.skipped.push_back("S is not positive definite; inverse unavailable");
            return c;
        }
        const Matrix<double> kinv_d = Eigen::LLT<Matrix<double>>(s.dense()).solve(Matrix<double>::Identity(s.dim(), s.dim()));
        const auto kinv = SymmetricMatrix<double>::symmetrize(kinv_d);
        double pcmax = 0;
        for (Index j = 0; j < s.dim(); ++j)
            for (Index i = 0; i < j; ++i)
                pcmax = std::max(pcmax, std::abs(kinv(i, j)) / std::sqrt(kinv(i, i) * kinv(j, j)));
        if (!(pcmax > 0)) pcmax = 1.0;
        const auto tgrid = penalty_grid(pcmax, cfg.grid_size, cfg.grid_min_ratio);
        return pr_sweep(truth, tgrid, [&](double t) { return partial_correlation_mask(kinv, t); });
    }
    throw ConfigError("unknown method '" + method + "'");
}

BenchResult run_benchmark(const BenchConfig& cfg)
{
    cfg.validate();
    BenchResult res;
    for (Index r = 0; r < cfg.replicates; ++r) {
        const std::string tag = "replicate-" + std::to_string(r);
        netsim::AffiliationSpec spec = cfg.spec;
        spec.seed = rng::substream_seed(cfg.seed, tag + "-structure");
        const auto gt = netsim::sample_structure(spec);
        const auto data = netsim::sample_data(gt, cfg.n, rng::substream_seed(cfg.seed, tag + "-data"));
        const auto s = empirical_covariance(data);
        for (const auto& m : cfg.methods) {
            MethodRun run{m, r, method_curve(m, s, cfg.n, gt, cfg)};
            res.summary[m].aupr.push_back(run.curve.aupr);
            res.runs.push_back(std::move(run));
        }
    }
    for (auto& [name, sm] : res.summary) {
        const double k = double(sm.aupr.size());
        sm.mean = std::accumulate(sm.aupr.begin(), sm.aupr.end(), 0.0) / k;
        double ss = 0;
        for (const double v : sm.aupr) ss += (v - sm.mean) * (v - sm.mean);
        sm.sd = sm.aupr.size() > 1 ? std::sqrt(ss / (k - 1)) : 0.0;
    }
    return res;
}

nlohmann::json summary_json(const BenchResult& result, const BenchConfig& cfg)
{
    nlohmann::json j;
    j["replicates"] = cfg.replicates;
    j["n"] = cfg.n;
    j["p"] = cfg.spec.p;
    j["seed"] = cfg.seed;
    nlohmann::json methods = nlohmann::json::object();
    for (const auto& [name, sm] : result.summary) {
        methods[name] = {{"aupr_mean", sm.mean}, {"aupr_sd", sm.sd}, {"aupr", sm.aupr}};
    }
    j["methods"] = methods;
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& run : result.runs)
        for (const auto& msg : run.curve.skipped)
            skipped.push_back({{"method", run.method}, {"replicate", run.replicate}, {"point", msg}});
    j["skipped_points"] = skipped;
    return j;
}

} // namespace structnet::eval
