#pragma once
// Shared fixtures and independent oracles for the test suites.
#include <cmath>
#include <cstdint>
#include <numbers>
#include <structnet/dataset.hpp>
#include <structnet/glasso.hpp>
#include <structnet/lasso.hpp>
#include <structnet/latent_types.hpp>
#include <structnet/rng.hpp>

namespace testing {

using structnet::Index;
using structnet::Matrix;
using structnet::SymmetricMatrix;
using structnet::Vector;
using namespace structnet;

inline Matrix<double> gaussian_matrix(Index rows, Index cols, std::uint64_t seed)
{
    structnet::rng::Stream g(seed, "test-gaussian");
    Matrix<double> m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = g.normal();
    return m;
}

inline double uniform(structnet::rng::Stream& g, double lo, double hi)
{
    return lo + (hi - lo) * g.uniform();
}

/// Data with a mildly correlated random covariance.
inline structnet::Dataset random_dataset(Index n, Index p, std::uint64_t seed)
{
    const Matrix<double> z = gaussian_matrix(n, p, seed);
    Matrix<double> mix = Matrix<double>::Identity(p, p) + 0.4 * gaussian_matrix(p, p, seed + 7777) / std::sqrt(double(p));
    return structnet::Dataset(z * mix);
}

inline SymmetricMatrix<double> random_covariance(Index n, Index p, std::uint64_t seed)
{
    return structnet::empirical_covariance(random_dataset(n, p, seed));
}

inline SymmetricMatrix<double> random_spd(Index p, std::uint64_t seed)
{
    const Matrix<double> a = gaussian_matrix(p, p, seed);
    return SymmetricMatrix<double>::symmetrize(a * a.transpose() + double(p) * Matrix<double>::Identity(p, p));
}

/// Proximal gradient (ISTA) with backtracking for the weighted lasso.
inline Vector<double> ista_lasso(const structnet::lasso::WeightedLassoProblem<double>& pb, int iters = 200000)
{
    const Index d = pb.dim();
    Vector<double> b = Vector<double>::Zero(d);
    const double lip = 0.5 * pb.gram.operatorNorm();
    const double step = 1.0 / lip;
    for (int it = 0; it < iters; ++it) {
        const Vector<double> grad = 0.5 * pb.gram * b - pb.linear;
        Vector<double> next = b - step * grad;
        for (Index j = 0; j < d; ++j) next(j) = structnet::lasso::soft_threshold(next(j), step * pb.weights(j));
        const double change = (next - b).cwiseAbs().maxCoeff();
        b = next;
        if (change < 1e-15) break;
    }
    return b;
}

/**
 * Proximal gradient on min -log det K + tr(SK) + sum_ij P_ij |K_ij| with
 * backtracking that keeps K positive definite. Independent of the column
 * lasso machinery.
 */
inline Matrix<double> ista_glasso(const SymmetricMatrix<double>& s, const Matrix<double>& pen, int iters = 200000)
{
    const Index p = s.dim();
    auto f = [&](const Matrix<double>& k, bool& ok) {
        Eigen::LLT<Matrix<double>> llt(k);
        ok = llt.info() == Eigen::Success;
        if (!ok) return 0.0;
        const double ld = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        return -ld + (s.dense().array() * k.array()).sum();
    };
    Matrix<double> k = (s.dense() + Matrix<double>(pen.diagonal().asDiagonal()) + 1e-3 * Matrix<double>::Identity(p, p))
                           .inverse();
    double t = 1.0;
    for (int it = 0; it < iters; ++it) {
        bool ok;
        const double fk = f(k, ok);
        const Matrix<double> grad = s.dense() - k.inverse();
        Matrix<double> next;
        for (int bt = 0; bt < 60; ++bt) {
            next = k - t * grad;
            for (Index j = 0; j < p; ++j)
                for (Index i = 0; i < p; ++i) next(i, j) = structnet::lasso::soft_threshold(next(i, j), t * pen(i, j));
            next = (next + next.transpose()) / 2.0;
            bool ok2;
            const double fn = f(next, ok2);
            const Matrix<double> d = next - k;
            if (ok2 && fn <= fk + (grad.array() * d.array()).sum() + d.squaredNorm() / (2.0 * t)) break;
            t *= 0.5;
        }
        const double change = (next - k).cwiseAbs().maxCoeff();
        k = next;
        t *= 2.0;
        if (change < 1e-13) break;
    }
    return k;
}

inline LatentPosterior random_tau(Index p, Index q, std::uint64_t seed, double lo = 0.0)
{
    rng::Stream g(seed, "tau");
    Matrix<double> t(p, q);
    for (Index i = 0; i < p; ++i) {
        for (Index c = 0; c < q; ++c) t(i, c) = lo + g.uniform();
        t.row(i) /= t.row(i).sum();
    }
    return LatentPosterior(t);
}

/// Two-cluster tau with tau_i1 uniform in [eps, 1 - eps].
inline LatentPosterior interior_tau(Index p, double eps, rng::Stream& g)
{
    Matrix<double> t(p, 2);
    for (Index i = 0; i < p; ++i) {
        t(i, 0) = testing::uniform(g, eps, 1 - eps);
        t(i, 1) = 1 - t(i, 0);
    }
    return LatentPosterior(t);
}

inline SymmetricMatrix<double> random_k(Index p, double mag, std::uint64_t seed)
{
    rng::Stream g(seed, "k");
    Matrix<double> k = Matrix<double>::Identity(p, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < j; ++i) k(i, j) = k(j, i) = testing::uniform(g, -mag, mag);
    return SymmetricMatrix<double>(k);
}

inline double brute_lambda(const LatentPosterior& t, const SymmetricMatrix<double>& k, Index q, Index l)
{
    double num = 0, den = 0;
    for (Index i = 0; i < k.dim(); ++i)
        for (Index j = 0; j < k.dim(); ++j) {
            if (i == j) continue;
            num += t(i, q) * t(j, l) * std::abs(k(i, j));
            den += t(i, q) * t(j, l);
        }
    return num / den;
}

// t density coded separately from the library
inline double density(double x, double df)
{
    return std::tgamma((df + 1) / 2) / (std::sqrt(df * std::numbers::pi) * std::tgamma(df / 2))
           * std::pow(1 + x * x / df, -(df + 1) / 2);
}

// P(T > x) = 1/2 - int_0^x f, composite Simpson
inline double survival_by_quadrature(double x, double df)
{
    const int m = 20000;
    const double h = x / m;
    double acc = density(0, df) + density(x, df);
    for (int k = 1; k < m; ++k) acc += (k % 2 ? 4.0 : 2.0) * density(k * h, df);
    return 0.5 - acc * h / 3.0;
}

// Penalized pseudo-likelihood column problem with K_ii fixed at 1/S_ii:
//   min_b  b' S11 b + 2 K22 s12' b + K22 sum_j P_j |b_j|
// solved by plain proximal gradient; returns a = -b / K22.
inline Vector<double> pseudo_column(const SymmetricMatrix<double>& s, const Matrix<double>& pen, Index i)
{
    const auto idx = complement_indices(s.dim(), i);
    const Matrix<double> s11 = s.dense()(idx, idx);
    const Vector<double> s12 = s.dense()(idx, i);
    const Vector<double> w = pen(idx, i);
    const double k22 = 1.0 / s(i, i);
    const double step = 1.0 / (2.0 * s11.operatorNorm());
    Vector<double> b = Vector<double>::Zero(s12.size());
    for (int it = 0; it < 500000; ++it) {
        Vector<double> next = b - step * (2.0 * s11 * b + 2.0 * k22 * s12);
        for (Index j = 0; j < next.size(); ++j) next(j) = lasso::soft_threshold(next(j), step * k22 * w(j));
        const double change = (next - b).cwiseAbs().maxCoeff();
        b = next;
        if (change < 1e-16) break;
    }
    return -b / k22;
}

inline Matrix<double> pseudo_coef(const SymmetricMatrix<double>& s, const Matrix<double>& pen)
{
    const Index p = s.dim();
    Matrix<double> c = Matrix<double>::Zero(p, p);
    for (Index i = 0; i < p; ++i) {
        const auto idx = complement_indices(p, i);
        const Vector<double> a = pseudo_column(s, pen, i);
        for (std::size_t r = 0; r < idx.size(); ++r) c(i, idx[r]) = a(Index(r));
    }
    return c;
}

} // namespace testing
