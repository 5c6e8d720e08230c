#pragma once
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>
#include <Eigen/Dense>
#include <structnet/errors.hpp>

namespace structnet {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Largest |m - m^T| tolerated on construction, relative to max(1, max|m|).
inline constexpr double symmetry_tolerance = 1e-12;

/**
 * Dense symmetric matrix. Symmetry is established on construction: the input
 * must already be symmetric up to rounding and is replaced by (m + m^T)/2, so
 * that entries (i,j) and (j,i) are bit-identical afterwards.
 */
template <class ScalarT>
class SymmetricMatrix
{
public:
    using Scalar = ScalarT;
    using dense_t = Matrix<Scalar>;

    SymmetricMatrix() = default;

    explicit SymmetricMatrix(Index p)
        : m_(dense_t::Zero(p, p))
    {}

    template <class Derived>
    explicit SymmetricMatrix(const Eigen::MatrixBase<Derived>& m)
    {
        check_square_finite(m);
        const Scalar scale = std::max<Scalar>(Scalar(1), m.cwiseAbs().maxCoeff());
        const Scalar asym = (m - m.transpose()).cwiseAbs().maxCoeff();
        if (asym > Scalar(symmetry_tolerance) * scale) {
            throw DataError("matrix is not symmetric (max asymmetry "
                            + std::to_string(double(asym)) + ")");
        }
        m_ = (m + m.transpose()) / Scalar(2);
    }

    /// Averages m with its transpose without requiring near-symmetry.
    template <class Derived>
    static SymmetricMatrix symmetrize(const Eigen::MatrixBase<Derived>& m)
    {
        check_square_finite(m);
        SymmetricMatrix out;
        out.m_ = (m + m.transpose()) / Scalar(2);
        return out;
    }

    static SymmetricMatrix identity(Index p)
    {
        SymmetricMatrix out;
        out.m_ = dense_t::Identity(p, p);
        return out;
    }

    Index dim() const noexcept { return m_.rows(); }
    const dense_t& dense() const noexcept { return m_; }
    Scalar operator()(Index i, Index j) const { return m_(i, j); }

    /// Writes both (i,j) and (j,i).
    void set(Index i, Index j, Scalar v)
    {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    Vector<Scalar> diagonal() const { return m_.diagonal(); }

private:
    template <class Derived>
    static void check_square_finite(const Eigen::MatrixBase<Derived>& m)
    {
        if (m.rows() != m.cols()) {
            throw DimensionError("symmetric matrix must be square, got "
                                 + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        }
        if (!m.allFinite()) throw DataError("matrix contains non-finite entries");
    }

    dense_t m_;
};

/// Lower-triangular Cholesky factor L with L L^T = m.
template <class Scalar>
Matrix<Scalar> cholesky(const SymmetricMatrix<Scalar>& m)
{
    const Index p = m.dim();
    const auto& a = m.dense();
    Matrix<Scalar> l = Matrix<Scalar>::Zero(p, p);
    for (Index j = 0; j < p; ++j) {
        Scalar d = a(j, j);
        for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > Scalar(0)) || !std::isfinite(double(d))) {
            throw DefinitenessError("matrix is not positive definite (pivot "
                                    + std::to_string(j) + ")", j);
        }
        const Scalar ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (Index i = j + 1; i < p; ++i) {
            Scalar s = a(i, j);
            for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

template <class Scalar>
bool is_positive_definite(const SymmetricMatrix<Scalar>& m)
{
    try {
        (void)cholesky(m);
        return true;
    } catch (const DefinitenessError&) {
        return false;
    }
}

/// log det of a positive definite matrix.
template <class Scalar>
Scalar log_det(const SymmetricMatrix<Scalar>& m)
{
    const auto l = cholesky(m);
    return Scalar(2) * l.diagonal().array().log().sum();
}

/// Eigenvalues in increasing order.
template <class Scalar>
Vector<Scalar> symmetric_eigenvalues(const SymmetricMatrix<Scalar>& m)
{
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m.dense(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

template <class Scalar>
Scalar min_eigenvalue(const SymmetricMatrix<Scalar>& m)
{
    return symmetric_eigenvalues(m).minCoeff();
}

/// Symmetric PSD square root R with R R = m.
template <class Scalar>
SymmetricMatrix<Scalar> symmetric_sqrt(const SymmetricMatrix<Scalar>& m)
{
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m.dense());
    Vector<Scalar> ev = es.eigenvalues();
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < Scalar(-1e-10)) {
            throw DefinitenessError("negative eigenvalue " + std::to_string(double(ev(i)))
                                    + " in symmetric_sqrt", i);
        }
        ev(i) = std::sqrt(std::max(ev(i), Scalar(0)));
    }
    const auto& v = es.eigenvectors();
    return SymmetricMatrix<Scalar>::symmetrize(v * ev.asDiagonal() * v.transpose());
}

/// Indices 0..p-1 with `pivot` removed.
inline std::vector<Index> complement_indices(Index p, Index pivot)
{
    std::vector<Index> idx;
    idx.reserve(p > 0 ? std::size_t(p - 1) : 0);
    for (Index i = 0; i < p; ++i) {
        if (i != pivot) idx.push_back(i);
    }
    return idx;
}

/**
 * Partition of a symmetric matrix around one pivot: the pivot row/column is
 * moved last, giving [[sub11, vec12], [vec12^T, scalar22]].
 */
template <class Scalar>
struct BlockView
{
    Index pivot = 0;
    Matrix<Scalar> sub11;
    Vector<Scalar> vec12;
    Scalar scalar22 = 0;
};

template <class Scalar>
BlockView<Scalar> block_view(const SymmetricMatrix<Scalar>& m, Index pivot)
{
    const Index p = m.dim();
    if (pivot < 0 || pivot >= p) {
        throw DimensionError("pivot " + std::to_string(pivot) + " out of range for dimension "
                             + std::to_string(p));
    }
    const auto idx = complement_indices(p, pivot);
    BlockView<Scalar> out;
    out.pivot = pivot;
    out.sub11 = m.dense()(idx, idx);
    out.vec12 = m.dense()(idx, pivot);
    out.scalar22 = m(pivot, pivot);
    return out;
}

template <class Scalar>
SymmetricMatrix<Scalar> reassemble(const BlockView<Scalar>& b)
{
    const Index p = b.sub11.rows() + 1;
    const auto idx = complement_indices(p, b.pivot);
    Matrix<Scalar> m(p, p);
    m(idx, idx) = b.sub11;
    m(idx, b.pivot) = b.vec12;
    m(b.pivot, idx) = b.vec12.transpose();
    m(b.pivot, b.pivot) = b.scalar22;
    return SymmetricMatrix<Scalar>(m);
}

/// S = n^{-1} (X - mean)^T (X - mean), rows of X are samples.
template <class Derived>
SymmetricMatrix<typename Derived::Scalar> empirical_covariance(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    if (!x.allFinite()) throw DataError("data contains non-finite entries");
    if (x.rows() < 1) throw DataError("data has no rows");
    const Matrix<Scalar> centered = x.rowwise() - x.colwise().mean();
    const Matrix<Scalar> s = (centered.transpose() * centered) / Scalar(x.rows());
    return SymmetricMatrix<Scalar>::symmetrize(s);
}

} // namespace structnet
