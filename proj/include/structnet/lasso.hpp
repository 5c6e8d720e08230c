#pragma once
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>
#include <structnet/linalg.hpp>

namespace structnet {
namespace lasso {

/// sgn(x) * max(|x| - rho, 0).
template <class Scalar>
inline Scalar soft_threshold(Scalar x, Scalar rho)
{
    const Scalar mag = std::abs(x) - rho;
    if (mag <= Scalar(0)) return Scalar(0);
    return x > Scalar(0) ? mag : -mag;
}

/**
 * min_beta  1/4 beta^T G beta - l^T beta + sum_j w_j |beta_j|
 *
 * with G = gram (positive definite), l = linear and w = weights >= 0.
 */
template <class Scalar>
struct WeightedLassoProblem
{
    Matrix<Scalar> gram;
    Vector<Scalar> linear;
    Vector<Scalar> weights;

    Index dim() const noexcept { return linear.size(); }

    void validate() const
    {
        const Index d = linear.size();
        if (gram.rows() != d || gram.cols() != d || weights.size() != d) {
            throw DimensionError("lasso problem dimensions disagree");
        }
        if (!gram.allFinite() || !linear.allFinite() || !weights.allFinite()) {
            throw DataError("lasso problem has non-finite entries");
        }
        if (d > 0 && weights.minCoeff() < Scalar(0)) {
            throw DomainError("lasso weights must be nonnegative");
        }
        for (Index j = 0; j < d; ++j) {
            if (!(gram(j, j) > Scalar(0))) {
                throw DefinitenessError("lasso gram has nonpositive diagonal", j);
            }
        }
    }
};

template <class Scalar>
struct LassoSolution
{
    Vector<Scalar> beta;
    int iterations = 0;
    Scalar max_kkt_violation = 0;
    /// Objective after each sweep, filled only when requested.
    std::vector<Scalar> objective_trace;
};

struct LassoSettings
{
    double tol = 1e-7;
    int max_sweeps = 10000;
    bool record_objective = false;
};

template <class Scalar>
Scalar objective(const WeightedLassoProblem<Scalar>& pb, const Vector<Scalar>& beta)
{
    return Scalar(0.25) * beta.dot(pb.gram * beta) - pb.linear.dot(beta)
           + (pb.weights.array() * beta.array().abs()).sum();
}

/// Largest violation of the subgradient optimality conditions at beta.
template <class Scalar>
Scalar kkt_violation(const WeightedLassoProblem<Scalar>& pb, const Vector<Scalar>& beta)
{
    const Vector<Scalar> grad = Scalar(0.5) * (pb.gram * beta) - pb.linear;
    Scalar worst = 0;
    for (Index j = 0; j < beta.size(); ++j) {
        Scalar v;
        if (beta(j) != Scalar(0)) {
            const Scalar sgn = beta(j) > Scalar(0) ? Scalar(1) : Scalar(-1);
            v = std::abs(grad(j) + pb.weights(j) * sgn);
        } else {
            v = std::max(std::abs(grad(j)) - pb.weights(j), Scalar(0));
        }
        worst = std::max(worst, v);
    }
    return worst;
}

/**
 * Cyclic coordinate descent, coordinates visited in order 0..d-1. Each update is
 *
 *     beta_j = 2 S(l_j - 1/2 sum_{k != j} G_jk beta_k ; w_j) / G_jj
 *
 * and a running vector G beta is kept up to date so a sweep costs O(d^2).
 * Stops when the largest coordinate change in a sweep is below tol and the
 * KKT residual at that point is also below tol.
 */
template <class Scalar>
LassoSolution<Scalar> solve_weighted_lasso(const WeightedLassoProblem<Scalar>& pb,
                                           const std::optional<std::type_identity_t<Vector<Scalar>>>& init = std::nullopt,
                                           const LassoSettings& settings = {})
{
    pb.validate();
    if (!(settings.tol > 0)) throw DomainError("lasso tolerance must be positive");
    const Index d = pb.dim();

    LassoSolution<Scalar> sol;
    if (init) {
        if (init->size() != d) throw DimensionError("lasso warm start has wrong length");
        sol.beta = *init;
    } else {
        sol.beta = Vector<Scalar>::Zero(d);
    }
    if (d == 0) return sol;

    Vector<Scalar> gb = pb.gram * sol.beta;
    const Scalar tol = Scalar(settings.tol);
    Scalar max_change = 0;
    for (int sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
        max_change = 0;
        for (Index j = 0; j < d; ++j) {
            const Scalar gjj = pb.gram(j, j);
            const Scalar old = sol.beta(j);
            // partial residual: sum over k != j
            const Scalar partial = gb(j) - gjj * old;
            const Scalar updated = Scalar(2) * soft_threshold(pb.linear(j) - Scalar(0.5) * partial, pb.weights(j)) / gjj;
            const Scalar delta = updated - old;
            if (delta != Scalar(0)) {
                sol.beta(j) = updated;
                gb += delta * pb.gram.col(j);
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        sol.iterations = sweep;
        if (settings.record_objective) sol.objective_trace.push_back(objective(pb, sol.beta));
        if (max_change < tol) {
            sol.max_kkt_violation = kkt_violation(pb, sol.beta);
            if (sol.max_kkt_violation <= tol) return sol;
        }
    }
    throw ConvergenceError("weighted lasso did not converge in " + std::to_string(settings.max_sweeps)
                               + " sweeps (last max change " + std::to_string(double(max_change)) + ")",
                           double(max_change));
}

} // namespace lasso
} // namespace structnet
