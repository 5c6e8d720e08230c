#include <cmath>
#include <numbers>
#include <structnet/latent_em.hpp>

namespace structnet::em {
namespace {

constexpr double tau_log_floor = 1e-12;
constexpr double alpha_log_floor = 1e-12;
constexpr int estep_max_rounds = 20;

Matrix<double> offdiag_abs(const SymmetricMatrix<double>& k)
{
    Matrix<double> a = k.dense().cwiseAbs();
    a.diagonal().setZero();
    return a;
}

double mean_offdiag_abs(const SymmetricMatrix<double>& k)
{
    const Index p = k.dim();
    if (p < 2) return 0.0;
    return offdiag_abs(k).sum() / double(p * (p - 1));
}

void check_shapes(const LatentPosterior& tau, const SymmetricMatrix<double>& k)
{
    if (tau.nodes() != k.dim()) {
        throw DimensionError("tau has " + std::to_string(tau.nodes()) + " nodes but K is "
                             + std::to_string(k.dim()) + "x" + std::to_string(k.dim()));
    }
}

// Numerator and denominator of the scale update: tau^T |K| tau and tau^T (11^T - I) tau.
void lambda_moments(const LatentPosterior& tau, const SymmetricMatrix<double>& k, Matrix<double>& num,
                    Matrix<double>& den)
{
    check_shapes(tau, k);
    const Matrix<double>& t = tau.tau();
    num = t.transpose() * offdiag_abs(k) * t;
    const Vector<double> c = t.colwise().sum().transpose();
    den = c * c.transpose() - t.transpose() * t;
}

double entropy_sum(const Matrix<double>& t)
{
    double acc = 0;
    for (Index j = 0; j < t.cols(); ++j)
        for (Index i = 0; i < t.rows(); ++i)
            if (t(i, j) > 0) acc += t(i, j) * std::log(std::max(t(i, j), tau_log_floor));
    return acc;
}

Matrix<double> floor_lambda(Matrix<double> lam)
{
    return lam.cwiseMax(lambda_floor_value);
}

} // namespace

void EmConfig::validate() const
{
    if (clusters < 1) throw ConfigError("cluster count must be at least 1");
    if (!(lambda_ratio > 0) || !std::isfinite(lambda_ratio)) throw ConfigError("lambda_ratio must be positive");
    if (!(em_tol > 0)) throw ConfigError("em_tol must be positive");
    if (!(fixedpoint_tol > 0)) throw ConfigError("fixedpoint_tol must be positive");
    if (em_max_iter < 1) throw ConfigError("em_max_iter must be at least 1");
    if (fixedpoint_max_iter < 1) throw ConfigError("fixedpoint_max_iter must be at least 1");
    if (inv_lambda0 && !(*inv_lambda0 >= 0 && std::isfinite(*inv_lambda0))) {
        throw ConfigError("inv_lambda0 must be finite and nonnegative");
    }
}

Matrix<double> affiliation_lambda(Index q, double lambda_in, double lambda_out)
{
    return MixtureParams::affiliation(q, lambda_in, lambda_out).lambda;
}

LatentPosterior fixed_point_map(const SymmetricMatrix<double>& k, const MixtureParams& params,
                                const LatentPosterior& tau)
{
    params.validate();
    check_shapes(tau, k);
    if (tau.clusters() != params.clusters()) throw DimensionError("tau and parameters disagree on Q");
    const Matrix<double>& t = tau.tau();
    const Index p = t.rows();
    const Index q = t.cols();

    const Matrix<double> inv = params.lambda.cwiseInverse();
    const Matrix<double> log2l = (2.0 * params.lambda).array().log().matrix();
    const Matrix<double> at = offdiag_abs(k) * t;
    const Eigen::RowVectorXd colsum = t.colwise().sum();

    Matrix<double> logu(p, q);
    // row i: -(A tau)_i Lambda^{-1} - (colsum - tau_i) log 2 Lambda
    const Matrix<double> others = (-t).rowwise() + colsum;
    logu = -(at * inv) - others * log2l;
    for (Index c = 0; c < q; ++c) logu.col(c).array() += std::log(std::max(params.alpha(c), alpha_log_floor));

    Matrix<double> out(p, q);
    for (Index i = 0; i < p; ++i) {
        const double mx = logu.row(i).maxCoeff();
        Eigen::RowVectorXd e = (logu.row(i).array() - mx).exp().matrix();
        out.row(i) = e / e.sum();
    }
    return LatentPosterior(std::move(out));
}

FixedPointResult estep_fixed_point(const SymmetricMatrix<double>& k, const MixtureParams& params,
                                   const LatentPosterior& tau0, const EmConfig& cfg)
{
    FixedPointResult res{tau0, 0, false};
    LatentPosterior cur = tau0;
    for (int it = 1; it <= cfg.fixedpoint_max_iter; ++it) {
        LatentPosterior next = fixed_point_map(k, params, cur);
        const double delta = (next.tau() - cur.tau()).cwiseAbs().maxCoeff();
        cur = std::move(next);
        res.iterations = it;
        if (delta < cfg.fixedpoint_tol) {
            res.tau = std::move(cur);
            res.converged = true;
            return res;
        }
    }
    return res;
}

Vector<double> update_alpha(const LatentPosterior& tau)
{
    return tau.tau().colwise().mean().transpose();
}

Matrix<double> update_lambda(const LatentPosterior& tau, const SymmetricMatrix<double>& k)
{
    Matrix<double> num, den;
    lambda_moments(tau, k, num, den);
    const double fallback = mean_offdiag_abs(k);
    Matrix<double> lam(num.rows(), num.cols());
    for (Index j = 0; j < lam.cols(); ++j)
        for (Index i = 0; i < lam.rows(); ++i) lam(i, j) = den(i, j) > 1e-300 ? num(i, j) / den(i, j) : fallback;
    return (lam + lam.transpose()) / 2.0;
}

Matrix<double> update_lambda_affiliation(const LatentPosterior& tau, const SymmetricMatrix<double>& k)
{
    Matrix<double> num, den;
    lambda_moments(tau, k, num, den);
    const double fallback = mean_offdiag_abs(k);
    const double num_in = num.trace(), den_in = den.trace();
    const double num_out = num.sum() - num_in, den_out = den.sum() - den_in;
    const double lin = den_in > 1e-300 ? num_in / den_in : fallback;
    const double lout = den_out > 1e-300 ? num_out / den_out : lin;
    Matrix<double> lam = Matrix<double>::Constant(num.rows(), num.cols(), lout);
    lam.diagonal().setConstant(lin);
    return lam;
}

double expected_complete_loglik(const LatentPosterior& tau, const SymmetricMatrix<double>& k,
                                const MixtureParams& params, const SymmetricMatrix<double>& s, Index n)
{
    params.validate();
    check_shapes(tau, k);
    if (s.dim() != k.dim()) throw DimensionError("S and K dimensions disagree");
    const Matrix<double>& t = tau.tau();
    const Index p = k.dim();
    const double dn = double(n);

    const double tr = (s.dense().array() * k.dense().array()).sum();
    double val = dn / 2.0 * (log_det(k) - tr);

    for (Index c = 0; c < t.cols(); ++c) val += t.col(c).sum() * std::log(std::max(params.alpha(c), alpha_log_floor));

    const Matrix<double> inv = params.lambda.cwiseInverse();
    const Matrix<double> log2l = (2.0 * params.lambda).array().log().matrix();
    // sum_{i!=j} sum_{ql} tau_iq tau_jl (|K_ij| / lambda_ql + log 2 lambda_ql)
    Matrix<double> num, den;
    lambda_moments(tau, k, num, den);
    val -= (num.array() * inv.array()).sum() + (den.array() * log2l.array()).sum();

    if (!std::isinf(params.lambda0)) {
        val -= k.dense().diagonal().cwiseAbs().sum() / params.lambda0;
        val -= double(p) * std::log(2.0 * params.lambda0);
    }
    val -= dn * double(p) / 2.0 * std::log(2.0 * std::numbers::pi);
    return val;
}

double lower_bound_J(const LatentPosterior& tau, const SymmetricMatrix<double>& k, const MixtureParams& params,
                     const SymmetricMatrix<double>& s, Index n)
{
    return expected_complete_loglik(tau, k, params, s, n) - entropy_sum(tau.tau());
}

EmResult run_em(const SymmetricMatrix<double>& s, Index n, const EmConfig& cfg,
                const std::optional<Matrix<double>>& mstep_lambda, const std::optional<LatentPosterior>& known_tau)
{
    cfg.validate();
    const Index p = s.dim();
    const Index q = cfg.clusters;
    if (p < 2) throw DimensionError("need at least two variables");
    if (n < 2) throw DomainError("need at least two samples");
    if (mstep_lambda) {
        if (mstep_lambda->rows() != q || mstep_lambda->cols() != q) {
            throw DimensionError("penalty override must be " + std::to_string(q) + "x" + std::to_string(q));
        }
        if (!(mstep_lambda->minCoeff() > 0) || !mstep_lambda->allFinite()) {
            throw DomainError("penalty override scales must be positive and finite");
        }
    }
    if (!cfg.estimate_lambda && !mstep_lambda) {
        throw ConfigError("fixed scales (estimate_lambda = false) need a penalty override");
    }
    if (known_tau && (known_tau->nodes() != p || known_tau->clusters() != q)) {
        throw DimensionError("known tau must be " + std::to_string(p) + "x" + std::to_string(q));
    }

    const double inv0 = cfg.inv_lambda0 ? *cfg.inv_lambda0 : glasso::default_inv_lambda0(s, n);
    const double lambda0 = inv0 > 0 ? 1.0 / inv0 : std::numeric_limits<double>::infinity();

    EmResult res;
    LatentPosterior tau = known_tau ? *known_tau : spectral_init(s, q, cfg.seed);
    MixtureParams params;
    params.alpha = update_alpha(tau);
    params.lambda0 = lambda0;

    auto estimate_scales = [&](const LatentPosterior& t, const SymmetricMatrix<double>& k) {
        return floor_lambda(cfg.affiliation ? update_lambda_affiliation(t, k) : update_lambda(t, k));
    };

    std::optional<SymmetricMatrix<double>> k;
    if (!mstep_lambda) {
        // No scales yet: take them from a ridge-stabilized inverse of S.
        Matrix<double> reg = s.dense();
        reg.diagonal().array() += 2.0 * inv0 / double(n);
        if (!is_positive_definite(SymmetricMatrix<double>(reg))) {
            reg.diagonal().array() += std::abs(min_eigenvalue(s)) + 0.01 * s.dense().trace() / double(p);
        }
        const Eigen::LLT<Matrix<double>> llt(reg);
        k = SymmetricMatrix<double>::symmetrize(llt.solve(Matrix<double>::Identity(p, p)));
        params.lambda = estimate_scales(tau, *k);
    } else {
        params.lambda = *mstep_lambda;
    }

    for (int m = 1; m <= cfg.em_max_iter; ++m) {
        if (m > 1) {
            params.alpha = update_alpha(tau);
            params.lambda = cfg.estimate_lambda ? estimate_scales(tau, *k) : *mstep_lambda;
            if (!known_tau) {
                for (int round = 0; round < estep_max_rounds; ++round) {
                    const FixedPointResult fp = estep_fixed_point(*k, params, tau, cfg);
                    if (!fp.converged) {
                        ++res.fixedpoint_fallbacks;
                        break;
                    }
                    const double delta = (fp.tau.tau() - tau.tau()).cwiseAbs().maxCoeff();
                    tau = fp.tau;
                    params.alpha = update_alpha(tau);
                    if (cfg.estimate_lambda) params.lambda = estimate_scales(tau, *k);
                    if (delta < cfg.fixedpoint_tol) break;
                }
            }
        }

        MixtureParams mparams = params;
        if (mstep_lambda) mparams.lambda = *mstep_lambda;
        const PenaltyMatrix<double> pen = build_penalty_matrix(tau, mparams, n);
        res.estimate = glasso::solve(s, pen, n, cfg.glasso);
        k = res.estimate.k;
        res.mstep_lambda = mparams.lambda;

        const double qh = expected_complete_loglik(tau, *k, mparams, s, n);
        res.qhat_trace.push_back(qh);
        res.iterations = m;
        if (m > 1) {
            const double prev = res.qhat_trace[res.qhat_trace.size() - 2];
            if (std::abs(qh - prev) < cfg.em_tol * (1.0 + std::abs(qh))) {
                res.converged = true;
                break;
            }
        }
    }
    res.tau = tau;
    res.params = params;
    return res;
}

EmResult run_em(const Dataset& data, const EmConfig& cfg, const std::optional<Matrix<double>>& mstep_lambda,
                const std::optional<LatentPosterior>& known_tau)
{
    return run_em(empirical_covariance(data), data.n(), cfg, mstep_lambda, known_tau);
}

ContractionReport contraction_check(const SymmetricMatrix<double>& k, double lambda_in, double lambda_out,
                                    double eps)
{
    if (!(eps > 0 && eps <= 0.5)) throw DomainError("eps must lie in (0, 1/2]");
    if (!(lambda_in > 0) || !(lambda_out > 0)) throw DomainError("scales must be positive");
    const Index p = k.dim();
    if (p < 2) throw DimensionError("need at least two variables");

    ContractionReport rep;
    rep.bound = eps / (2.0 * double(p - 1) * (1.0 + eps));
    const double kmax = offdiag_abs(k).maxCoeff();
    rep.below_inv_2e = kmax < 1.0 / (2.0 * std::numbers::e);
    rep.pass = true;
    rep.max_h = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            const double a = std::abs(k(i, j));
            ContractionEntry e{i, j, a / lambda_in + std::log(2.0 * lambda_in),
                               a / lambda_out + std::log(2.0 * lambda_out), false};
            e.pass = e.h_in > 0 && e.h_in < rep.bound && e.h_out > 0 && e.h_out < rep.bound;
            rep.max_h = std::max({rep.max_h, std::abs(e.h_in), std::abs(e.h_out)});
            if (!e.pass) rep.pass = false;
            rep.entries.push_back(e);
        }
    }
    rep.lipschitz = (1.0 + 1.0 / eps) * 2.0 * double(p - 1) * rep.max_h;
    if (!rep.pass) {
        rep.reason = rep.below_inv_2e ? "some h_K(lambda) falls outside (0, bound)"
                                      : "max |K_ij| >= 1/(2e): h_K(lambda) >= 1 + log 2|K_ij| leaves little or no room";
    }
    return rep;
}

double tau_distance(const LatentPosterior& a, const LatentPosterior& b)
{
    if (a.nodes() != b.nodes() || a.clusters() != b.clusters()) throw DimensionError("tau shapes disagree");
    double worst = 0;
    for (Index i = 0; i < a.nodes(); ++i) {
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (Index q = 0; q < a.clusters(); ++q) {
            const double r = std::log(std::max(a(i, q), tau_log_floor)) - std::log(std::max(b(i, q), tau_log_floor));
            hi = std::max(hi, r);
            lo = std::min(lo, r);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

} // namespace structnet::em
