#pragma once
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>
#include <structnet/lasso.hpp>
#include <structnet/latent_types.hpp>
#include <structnet/linalg.hpp>

namespace structnet {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Relative floor below which an entry of K is treated as zero.
inline constexpr double zero_floor = 1e-9;

/**
 * Entrywise bound on |Sigma - S| in the covariance-space problem. For ell_1
 * weights rho_ij on K in (n/2)(log det K - tr SK) - sum rho_ij |K_ij| the
 * bound is P_ij = 2 rho_ij / n.
 */
template <class Scalar>
struct PenaltyMatrix
{
    struct Provenance
    {
        Matrix<double> tau;
        Matrix<double> lambda;
        double lambda0;
        Index n;
    };

    SymmetricMatrix<Scalar> entries;
    std::optional<Provenance> derived_from;

    PenaltyMatrix() = default;
    explicit PenaltyMatrix(SymmetricMatrix<Scalar> e)
        : entries(std::move(e))
    {
        if (entries.dim() > 0 && entries.dense().minCoeff() < Scalar(0)) {
            throw DomainError("penalty matrix entries must be nonnegative");
        }
    }

    Index dim() const noexcept { return entries.dim(); }
    Scalar operator()(Index i, Index j) const { return entries(i, j); }

    /// Same weight on every off-diagonal entry, 1/lambda0 on the diagonal.
    static PenaltyMatrix uniform(Index p, Scalar weight, Index n, Scalar inv_lambda0 = Scalar(0))
    {
        if (weight < Scalar(0) || inv_lambda0 < Scalar(0)) {
            throw DomainError("penalty weights must be nonnegative");
        }
        if (n < 1) throw DomainError("sample count must be positive");
        Matrix<Scalar> m = Matrix<Scalar>::Constant(p, p, Scalar(2) * weight / Scalar(n));
        m.diagonal().setConstant(Scalar(2) * inv_lambda0 / Scalar(n));
        return PenaltyMatrix(SymmetricMatrix<Scalar>(m));
    }
};

/**
 * P_ij = (2/n) sum_{q,l} tau_iq tau_jl / lambda_ql for i != j and
 * P_ii = 2 / (n lambda0), zero when lambda0 is infinite.
 */
PenaltyMatrix<double> build_penalty_matrix(const LatentPosterior& tau, const MixtureParams& params, Index n);

template <class Scalar>
struct PrecisionEstimate
{
    SymmetricMatrix<Scalar> sigma;
    SymmetricMatrix<Scalar> k;
    /// Penalized log-likelihood after each block cycle.
    std::vector<Scalar> objective_trace;
    bool converged = false;
    int cycles = 0;
};

struct GlassoSettings
{
    double tol = 1e-7;
    int max_cycles = 1000;
    /// Inner lasso tolerance is tol * lasso_tol_factor.
    double lasso_tol_factor = 1e-2;
    int lasso_max_sweeps = 10000;
};

namespace glasso {

/// (n/2)(log det K - tr(S K)) - (n/2) sum_ij P_ij |K_ij|.
template <class Scalar>
Scalar penalized_objective(const SymmetricMatrix<Scalar>& s, const PenaltyMatrix<Scalar>& penalty,
                           const SymmetricMatrix<Scalar>& k, Index n)
{
    const Scalar half_n = Scalar(n) / Scalar(2);
    const Scalar tr = (s.dense().array() * k.dense().array()).sum();
    const Scalar pen = (penalty.entries.dense().array() * k.dense().array().abs()).sum();
    return half_n * (log_det(k) - tr) - half_n * pen;
}

/// Largest uniform off-diagonal weight that still leaves an edge: (n/2) max_{i!=j} |S_ij|.
template <class Scalar>
Scalar max_penalty(const SymmetricMatrix<Scalar>& s, Index n)
{
    Scalar m = 0;
    for (Index j = 0; j < s.dim(); ++j)
        for (Index i = 0; i < s.dim(); ++i)
            if (i != j) m = std::max(m, std::abs(s(i, j)));
    return Scalar(n) / Scalar(2) * m;
}

/**
 * Inverse diagonal scale used when none is given: 0 (no diagonal penalty)
 * when S is positive definite, otherwise n (|min eig S| + 0.01 tr(S)/p) / 2.
 */
template <class Scalar>
Scalar default_inv_lambda0(const SymmetricMatrix<Scalar>& s, Index n)
{
    if (is_positive_definite(s)) return Scalar(0);
    const Scalar lmin = min_eigenvalue(s);
    const Scalar shift = std::abs(lmin) + Scalar(0.01) * s.dense().trace() / Scalar(s.dim());
    return Scalar(n) * shift / Scalar(2);
}

} // namespace glasso

/// Symmetric mask of off-diagonal |K_ij| above the relative zero floor.
template <class Scalar>
Mask edge_mask(const SymmetricMatrix<Scalar>& k, double floor = zero_floor)
{
    const Index p = k.dim();
    Scalar kmax = 0;
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < p; ++i) kmax = std::max(kmax, std::abs(k(i, j)));
    const Scalar thr = Scalar(floor) * kmax;
    Mask m = Mask::Constant(p, p, false);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < j; ++i)
            if (std::abs(k(i, j)) > thr) {
                m(i, j) = true;
                m(j, i) = true;
            }
    return m;
}

namespace glasso {
namespace detail {

// K from Sigma and the stored column solutions: K22 = 1/(Sigma22 - sigma12^T beta/2),
// K12 = -K22 beta/2. Columns are merged symmetrically; a zero on either side wins.
template <class Scalar>
SymmetricMatrix<Scalar> reconstruct_precision(const Matrix<Scalar>& w, const Matrix<Scalar>& betas)
{
    const Index p = w.rows();
    Matrix<Scalar> k = Matrix<Scalar>::Zero(p, p);
    for (Index j = 0; j < p; ++j) {
        const auto idx = complement_indices(p, j);
        const Vector<Scalar> beta = betas.col(j);
        const Vector<Scalar> w12 = w(idx, j);
        const Scalar schur = w(j, j) - w12.dot(beta) / Scalar(2);
        if (!(schur > Scalar(0))) {
            throw DefinitenessError("nonpositive Schur complement while reconstructing K", j);
        }
        const Scalar k22 = Scalar(1) / schur;
        k(j, j) = k22;
        for (std::size_t r = 0; r < idx.size(); ++r) k(idx[r], j) = -k22 * beta(Index(r)) / Scalar(2);
    }
    Matrix<Scalar> sym(p, p);
    for (Index j = 0; j < p; ++j) {
        sym(j, j) = k(j, j);
        for (Index i = 0; i < j; ++i) {
            const Scalar a = k(i, j);
            const Scalar b = k(j, i);
            const Scalar v = (a == Scalar(0) || b == Scalar(0)) ? Scalar(0) : (a + b) / Scalar(2);
            sym(i, j) = v;
            sym(j, i) = v;
        }
    }
    return SymmetricMatrix<Scalar>(sym);
}

} // namespace detail

/**
 * Penalized maximum likelihood for K by block coordinate ascent on Sigma:
 *
 *     max log det Sigma  subject to  |Sigma_ij - S_ij| <= P_ij.
 *
 * The diagonal is fixed at S_ii + P_ii. Columns are visited in order 0..p-1;
 * each column solves a weighted lasso with gram Sigma_11, linear s_12 and
 * weights p_12, then sets sigma_12 = Sigma_11 beta / 2. Cycles stop when no
 * entry of Sigma moved by more than tol. K is assembled column by column from
 * the lasso solutions, never by a dense inverse.
 */
template <class Scalar>
PrecisionEstimate<Scalar> solve(const SymmetricMatrix<Scalar>& s, const PenaltyMatrix<Scalar>& penalty, Index n,
                                const GlassoSettings& settings = {})
{
    const Index p = s.dim();
    if (penalty.dim() != p) {
        throw DimensionError("penalty is " + std::to_string(penalty.dim()) + "x" + std::to_string(penalty.dim())
                             + " but S is " + std::to_string(p) + "x" + std::to_string(p));
    }
    if (p < 1) throw DimensionError("empty covariance matrix");
    if (n < 1) throw DomainError("sample count must be positive");
    if (!(settings.tol > 0)) throw DomainError("glasso tolerance must be positive");

    const auto& sd = s.dense();
    const auto& pd = penalty.entries.dense();

    Matrix<Scalar> w = sd;
    w.diagonal() += pd.diagonal();
    {
        const auto start = SymmetricMatrix<Scalar>(w);
        if (!is_positive_definite(start)) {
            throw DefinitenessError("S + diag(P) is not positive definite; the diagonal of K needs a positive "
                                    "penalty (finite lambda0, i.e. 1/lambda0 > 0)");
        }
    }

    PrecisionEstimate<Scalar> est;
    Matrix<Scalar> betas = Matrix<Scalar>::Zero(std::max<Index>(p - 1, 0), p);
    const lasso::LassoSettings inner{settings.tol * settings.lasso_tol_factor, settings.lasso_max_sweeps};

    for (int cycle = 1; cycle <= settings.max_cycles; ++cycle) {
        Scalar max_change = 0;
        for (Index j = 0; j < p && p > 1; ++j) {
            const auto idx = complement_indices(p, j);
            lasso::WeightedLassoProblem<Scalar> pb{w(idx, idx), sd(idx, j), pd(idx, j)};
            const Vector<Scalar> warm = betas.col(j);
            const auto sol = lasso::solve_weighted_lasso(pb, std::optional<Vector<Scalar>>(warm), inner);
            betas.col(j) = sol.beta;
            const Vector<Scalar> w12 = pb.gram * sol.beta / Scalar(2);
            max_change = std::max(max_change, (w12 - w(idx, j)).cwiseAbs().maxCoeff());
            w(idx, j) = w12;
            w(j, idx) = w12.transpose();
        }
        est.cycles = cycle;
        const auto k = detail::reconstruct_precision(w, betas);
        // An intermediate K need not be PD; its log det is then replaced by -log det Sigma.
        if (is_positive_definite(k)) {
            est.objective_trace.push_back(penalized_objective(s, penalty, k, n));
        } else {
            const Scalar half_n = Scalar(n) / Scalar(2);
            const Scalar tr = (sd.array() * k.dense().array()).sum();
            const Scalar pen = (pd.array() * k.dense().array().abs()).sum();
            est.objective_trace.push_back(half_n * (-log_det(SymmetricMatrix<Scalar>::symmetrize(w)) - tr) - half_n * pen);
        }
        if (max_change < Scalar(settings.tol)) {
            est.converged = true;
            est.k = k;
            break;
        }
    }
    if (!est.converged) {
        throw ConvergenceError("graphical lasso did not converge in " + std::to_string(settings.max_cycles)
                                   + " cycles",
                               double(settings.tol));
    }
    // Diagonal is exactly S_ii + P_ii; assignment avoids any drift from the updates above.
    for (Index i = 0; i < p; ++i) w(i, i) = sd(i, i) + pd(i, i);
    est.sigma = SymmetricMatrix<Scalar>(w);
    return est;
}

/// Scalar uniform-penalty convenience overload.
template <class Scalar>
PrecisionEstimate<Scalar> solve_uniform(const SymmetricMatrix<Scalar>& s, Scalar weight, Index n,
                                        Scalar inv_lambda0 = Scalar(0), const GlassoSettings& settings = {})
{
    return solve(s, PenaltyMatrix<Scalar>::uniform(s.dim(), weight, n, inv_lambda0), n, settings);
}

struct KktReport
{
    double max_violation = 0;
    Index worst_i = 0;
    Index worst_j = 0;
    Matrix<double> violations;
};

/**
 * Optimality audit of an estimate: for K_ij != 0 the residual
 * |Sigma_ij - S_ij - P_ij sgn K_ij|, for K_ij = 0 the band excess
 * max(|Sigma_ij - S_ij| - P_ij, 0).
 */
template <class Scalar>
KktReport kkt_report(const SymmetricMatrix<Scalar>& s, const PenaltyMatrix<Scalar>& penalty,
                     const PrecisionEstimate<Scalar>& est)
{
    const Index p = s.dim();
    const Mask nz = edge_mask(est.k);
    KktReport rep;
    rep.violations = Matrix<double>::Zero(p, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
            const double diff = double(est.sigma(i, j) - s(i, j));
            const double pij = double(penalty(i, j));
            const double kij = double(est.k(i, j));
            const bool nonzero = (i == j) ? kij != 0.0 : nz(i, j);
            double v;
            if (nonzero) {
                v = std::abs(diff - pij * (kij > 0 ? 1.0 : -1.0));
            } else {
                v = std::max(std::abs(diff) - pij, 0.0);
            }
            rep.violations(i, j) = v;
            if (v > rep.max_violation) {
                rep.max_violation = v;
                rep.worst_i = i;
                rep.worst_j = j;
            }
        }
    }
    return rep;
}

/// max |Sigma_ij - S_ij| / P_ij over entries with P_ij > 0.
template <class Scalar>
double feasibility_ratio(const SymmetricMatrix<Scalar>& s, const PenaltyMatrix<Scalar>& penalty,
                         const SymmetricMatrix<Scalar>& sigma)
{
    double worst = 0;
    for (Index j = 0; j < s.dim(); ++j)
        for (Index i = 0; i < s.dim(); ++i)
            if (penalty(i, j) > Scalar(0))
                worst = std::max(worst, double(std::abs(sigma(i, j) - s(i, j)) / penalty(i, j)));
    return worst;
}

} // namespace glasso
} // namespace structnet
