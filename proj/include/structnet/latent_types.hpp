#pragma once
#include <limits>
#include <vector>
#include <structnet/linalg.hpp>

namespace structnet {

/// Variational cluster memberships: p x Q, rows on the probability simplex.
class LatentPosterior
{
public:
    LatentPosterior() = default;
    /// Throws DataError unless every row sums to 1 (1e-10) with entries in [0,1].
    explicit LatentPosterior(Matrix<double> tau);

    /// Hard assignment from labels in 0..Q-1.
    static LatentPosterior from_labels(const std::vector<int>& labels, Index q);
    static LatentPosterior uniform(Index p, Index q);

    const Matrix<double>& tau() const noexcept { return tau_; }
    double operator()(Index i, Index q) const { return tau_(i, q); }
    Index nodes() const noexcept { return tau_.rows(); }
    Index clusters() const noexcept { return tau_.cols(); }

    /// argmax_q tau_iq for every node, ties to the lowest index.
    std::vector<int> hard_labels() const;

private:
    Matrix<double> tau_;
};

/// Cluster proportions, Laplace scales between clusters and the diagonal scale.
struct MixtureParams
{
    Vector<double> alpha;
    Matrix<double> lambda;
    /// +infinity means the diagonal of K is not penalized.
    double lambda0 = std::numeric_limits<double>::infinity();

    Index clusters() const noexcept { return alpha.size(); }

    /// Throws DataError / DomainError on malformed parameters.
    void validate() const;

    /// Affiliation scales: lambda_in on the diagonal, lambda_out elsewhere.
    static MixtureParams affiliation(Index q, double lambda_in, double lambda_out,
                                     double lambda0 = std::numeric_limits<double>::infinity());
};

} // namespace structnet
