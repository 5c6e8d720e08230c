#include <structnet/glasso.hpp>
#include <structnet/latent_types.hpp>

namespace structnet {

LatentPosterior::LatentPosterior(Matrix<double> tau)
    : tau_(std::move(tau))
{
    if (tau_.rows() < 1 || tau_.cols() < 1) throw DimensionError("tau must be at least 1x1");
    if (!tau_.allFinite()) throw DataError("tau has non-finite entries");
    for (Index i = 0; i < tau_.rows(); ++i) {
        if (tau_.row(i).minCoeff() < 0.0 || tau_.row(i).maxCoeff() > 1.0) {
            throw DataError("tau row " + std::to_string(i) + " has entries outside [0,1]");
        }
        const double sum = tau_.row(i).sum();
        if (std::abs(sum - 1.0) > 1e-10) {
            throw DataError("tau row " + std::to_string(i) + " sums to " + std::to_string(sum));
        }
    }
}

LatentPosterior LatentPosterior::from_labels(const std::vector<int>& labels, Index q)
{
    if (q < 1) throw DomainError("cluster count must be positive");
    Matrix<double> t = Matrix<double>::Zero(Index(labels.size()), q);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= q) {
            throw DataError("label " + std::to_string(labels[i]) + " at node " + std::to_string(i)
                            + " is outside 0.." + std::to_string(q - 1));
        }
        t(Index(i), labels[i]) = 1.0;
    }
    return LatentPosterior(std::move(t));
}

LatentPosterior LatentPosterior::uniform(Index p, Index q)
{
    if (p < 1 || q < 1) throw DomainError("uniform tau needs p, Q >= 1");
    return LatentPosterior(Matrix<double>::Constant(p, q, 1.0 / double(q)));
}

std::vector<int> LatentPosterior::hard_labels() const
{
    std::vector<int> out(std::size_t(tau_.rows()));
    for (Index i = 0; i < tau_.rows(); ++i) {
        Index best = 0;
        for (Index q = 1; q < tau_.cols(); ++q)
            if (tau_(i, q) > tau_(i, best)) best = q;
        out[std::size_t(i)] = int(best);
    }
    return out;
}

void MixtureParams::validate() const
{
    const Index q = alpha.size();
    if (q < 1) throw DimensionError("mixture has no clusters");
    if (lambda.rows() != q || lambda.cols() != q) throw DimensionError("lambda must be Q x Q");
    if (!alpha.allFinite() || alpha.minCoeff() < 0.0) throw DomainError("alpha must be nonnegative");
    if (std::abs(alpha.sum() - 1.0) > 1e-8) throw DomainError("alpha must sum to 1");
    if (!lambda.allFinite() || !(lambda.minCoeff() > 0.0)) throw DomainError("lambda must be positive and finite");
    if ((lambda - lambda.transpose()).cwiseAbs().maxCoeff() > 1e-12 * lambda.cwiseAbs().maxCoeff()) {
        throw DomainError("lambda must be symmetric");
    }
    if (!(lambda0 > 0.0)) throw DomainError("lambda0 must be positive (infinity disables it)");
}

MixtureParams MixtureParams::affiliation(Index q, double lambda_in, double lambda_out, double lambda0)
{
    if (q < 1) throw DomainError("cluster count must be positive");
    MixtureParams m;
    m.alpha = Vector<double>::Constant(q, 1.0 / double(q));
    m.lambda = Matrix<double>::Constant(q, q, lambda_out);
    m.lambda.diagonal().setConstant(lambda_in);
    m.lambda0 = lambda0;
    m.validate();
    return m;
}

PenaltyMatrix<double> build_penalty_matrix(const LatentPosterior& tau, const MixtureParams& params, Index n)
{
    params.validate();
    if (tau.clusters() != params.clusters()) {
        throw DimensionError("tau has " + std::to_string(tau.clusters()) + " clusters but parameters have "
                             + std::to_string(params.clusters()));
    }
    if (n < 1) throw DomainError("sample count must be positive");
    const Matrix<double>& t = tau.tau();
    const Matrix<double> inv = params.lambda.cwiseInverse();
    Matrix<double> m = (2.0 / double(n)) * (t * inv * t.transpose());
    const double diag = std::isinf(params.lambda0) ? 0.0 : 2.0 / (double(n) * params.lambda0);
    m.diagonal().setConstant(diag);
    PenaltyMatrix<double> pen(SymmetricMatrix<double>::symmetrize(m));
    pen.derived_from = PenaltyMatrix<double>::Provenance{t, params.lambda, params.lambda0, n};
    return pen;
}

} // namespace structnet
