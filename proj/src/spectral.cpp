#include <limits>
#include <Eigen/Eigenvalues>
#include <structnet/latent_em.hpp>
#include <structnet/rng.hpp>

namespace structnet::em {
namespace {

constexpr int kmeans_restarts = 20;
constexpr int kmeans_max_iter = 300;

struct KmeansFit
{
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

Index nearest(const Matrix<double>& centers, const Eigen::RowVectorXd& x, double& dist)
{
    Index best = 0;
    dist = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centers.rows(); ++c) {
        const double d = (centers.row(c) - x).squaredNorm();
        if (d < dist) {
            dist = d;
            best = c;
        }
    }
    return best;
}

KmeansFit kmeans_once(const Matrix<double>& y, Index q, rng::Stream& stream)
{
    const Index p = y.rows();
    Matrix<double> centers(q, y.cols());

    // k-means++ seeding
    centers.row(0) = y.row(Index(stream.below(std::uint64_t(p))));
    Vector<double> d2(p);
    for (Index c = 1; c < q; ++c) {
        for (Index i = 0; i < p; ++i) {
            double d;
            nearest(centers.topRows(c), y.row(i), d);
            d2(i) = d;
        }
        const Index pick = d2.sum() > 0 ? stream.categorical(d2) : Index(stream.below(std::uint64_t(p)));
        centers.row(c) = y.row(pick);
    }

    KmeansFit fit;
    fit.labels.assign(std::size_t(p), -1);
    for (int it = 0; it < kmeans_max_iter; ++it) {
        bool changed = false;
        for (Index i = 0; i < p; ++i) {
            double d;
            const int c = int(nearest(centers, y.row(i), d));
            if (c != fit.labels[std::size_t(i)]) {
                fit.labels[std::size_t(i)] = c;
                changed = true;
            }
        }
        if (!changed) break;
        Matrix<double> sums = Matrix<double>::Zero(q, y.cols());
        Vector<double> counts = Vector<double>::Zero(q);
        for (Index i = 0; i < p; ++i) {
            sums.row(fit.labels[std::size_t(i)]) += y.row(i);
            counts(fit.labels[std::size_t(i)]) += 1;
        }
        for (Index c = 0; c < q; ++c)
            if (counts(c) > 0) centers.row(c) = sums.row(c) / counts(c);
    }
    fit.inertia = 0;
    for (Index i = 0; i < p; ++i) fit.inertia += (y.row(i) - centers.row(fit.labels[std::size_t(i)])).squaredNorm();
    return fit;
}

} // namespace

LatentPosterior spectral_init(const SymmetricMatrix<double>& s, Index q, std::uint64_t seed)
{
    const Index p = s.dim();
    if (q < 1) throw DomainError("cluster count must be positive");
    if (q > p) throw DomainError("more clusters (" + std::to_string(q) + ") than variables (" + std::to_string(p) + ")");
    if (q == 1) return LatentPosterior(Matrix<double>::Ones(p, 1));

    Matrix<double> a = s.dense().cwiseAbs();
    a.diagonal().setZero();
    const Vector<double> deg = a.rowwise().sum();
    Vector<double> dinv(p);
    for (Index i = 0; i < p; ++i) dinv(i) = deg(i) > 0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
    const Matrix<double> m = dinv.asDiagonal() * a * dinv.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Matrix<double>> eig(m);
    if (eig.info() != Eigen::Success) throw ConvergenceError("eigendecomposition failed in spectral init", 0.0);
    Matrix<double> y = eig.eigenvectors().rightCols(q);
    for (Index i = 0; i < p; ++i) {
        const double nrm = y.row(i).norm();
        if (nrm > 0) y.row(i) /= nrm;
    }

    KmeansFit best;
    for (int r = 0; r < kmeans_restarts; ++r) {
        rng::Stream stream(seed + std::uint64_t(r), "kmeans");
        KmeansFit fit = kmeans_once(y, q, stream);
        if (fit.inertia < best.inertia) best = std::move(fit);
    }
    return LatentPosterior::from_labels(best.labels, q);
}

std::vector<Index> empty_clusters(const LatentPosterior& tau)
{
    std::vector<Index> out;
    const Vector<double> mass = tau.tau().colwise().sum();
    for (Index q = 0; q < mass.size(); ++q)
        if (mass(q) < 0.5) out.push_back(q);
    return out;
}

} // namespace structnet::em
