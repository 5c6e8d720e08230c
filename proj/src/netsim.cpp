#include <fstream>
#include <structnet/io.hpp>
#include <structnet/netsim.hpp>
#include <structnet/rng.hpp>

namespace structnet::netsim {

void AffiliationSpec::validate() const
{
    if (p < 2) throw ConfigError("p must be at least 2");
    if (clusters < 1) throw ConfigError("Q must be at least 1");
    if (!(p_in >= 0 && p_in <= 1)) throw ConfigError("p_in must lie in [0, 1]");
    if (!(p_out >= 0 && p_out <= 1)) throw ConfigError("p_out must lie in [0, 1]");
    if (alpha.size() > 0) {
        if (alpha.size() != clusters) throw ConfigError("alpha must have Q entries");
        if (!alpha.allFinite() || alpha.minCoeff() < 0) throw ConfigError("alpha entries must be nonnegative");
        if (std::abs(alpha.sum() - 1.0) > 1e-10) throw ConfigError("alpha must sum to 1");
    }
}

Vector<double> AffiliationSpec::proportions() const
{
    if (alpha.size() > 0) return alpha;
    return Vector<double>::Constant(clusters, 1.0 / double(clusters));
}

Index GroundTruth::edge_count() const
{
    return Index(edges.count());
}

Mask GroundTruth::symmetric_edges() const
{
    Mask m = edges;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < j; ++i)
            if (edges(i, j)) m(j, i) = true;
    return m;
}

double expected_edge_count(const AffiliationSpec& spec)
{
    spec.validate();
    const double same = spec.proportions().squaredNorm();
    const double pairs = double(spec.p) * double(spec.p - 1) / 2.0;
    return pairs * (same * spec.p_in + (1.0 - same) * spec.p_out);
}

GroundTruth sample_structure(const AffiliationSpec& spec)
{
    spec.validate();
    const Index p = spec.p;
    const Vector<double> alpha = spec.proportions();
    rng::Stream labels(spec.seed, "labels");
    rng::Stream edges(spec.seed, "edges");
    rng::Stream signs(spec.seed, "signs");

    GroundTruth gt;
    gt.z.resize(std::size_t(p));
    for (auto& l : gt.z) l = int(labels.categorical(alpha));

    Matrix<double> k = Matrix<double>::Zero(p, p);
    gt.edges = Mask::Constant(p, p, false);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            const double prob = gt.z[std::size_t(i)] == gt.z[std::size_t(j)] ? spec.p_in : spec.p_out;
            if (!edges.bernoulli(prob)) continue;
            const double w = signs.bernoulli(0.5) ? -1.0 : 1.0;
            k(i, j) = k(j, i) = w;
            gt.edges(i, j) = true;
        }
    }
    for (Index i = 0; i < p; ++i) k(i, i) = k.row(i).cwiseAbs().sum() + 0.1;
    const Vector<double> d = k.diagonal().cwiseSqrt().cwiseInverse();
    k = d.asDiagonal() * k * d.asDiagonal();
    k.diagonal().setOnes();
    gt.k_true = SymmetricMatrix<double>::symmetrize(k);

    const Eigen::LLT<Matrix<double>> llt(gt.k_true.dense());
    if (llt.info() != Eigen::Success) throw DefinitenessError("simulated precision matrix is not positive definite");
    gt.sigma_true = SymmetricMatrix<double>::symmetrize(llt.solve(Matrix<double>::Identity(p, p)));
    return gt;
}

Dataset sample_data(const GroundTruth& gt, Index n, std::uint64_t seed)
{
    if (n < 2) throw ConfigError("n must be at least 2");
    const Index p = gt.sigma_true.dim();
    const Matrix<double> l = cholesky(gt.sigma_true);
    rng::Stream gauss(seed, "gaussian");
    Matrix<double> z(n, p);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < p; ++c) z(r, c) = gauss.normal();
    std::vector<std::string> names;
    for (Index c = 0; c < p; ++c) names.push_back("v" + std::to_string(c + 1));
    return Dataset(z * l.transpose(), names);
}

void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    io::write_matrix_csv((dir / "k_true.csv").string(), gt.k_true.dense());
    io::write_matrix_csv((dir / "sigma_true.csv").string(), gt.sigma_true.dense());
    io::write_labels_csv((dir / "labels.csv").string(), gt.z);
    std::ofstream out(dir / "edges.csv");
    if (!out) throw DataError("cannot write " + (dir / "edges.csv").string());
    out << "i,j\n";
    for (Index i = 0; i < gt.edges.rows(); ++i)
        for (Index j = i + 1; j < gt.edges.cols(); ++j)
            if (gt.edges(i, j)) out << i << ',' << j << '\n';
}

} // namespace structnet::netsim
