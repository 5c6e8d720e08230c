#include <cmath>
#include <fstream>
#include <numbers>
#include <structnet/neighborhood.hpp>

namespace structnet {

NeighborhoodResult mb_select(const SymmetricMatrix<double>& s, const PenaltyMatrix<double>& penalty,
                             const lasso::LassoSettings& settings)
{
    const Index p = s.dim();
    if (penalty.dim() != p) throw DimensionError("penalty and S dimensions disagree");
    const auto& sd = s.dense();
    const auto& pd = penalty.entries.dense();

    NeighborhoodResult r;
    r.coef = Matrix<double>::Zero(p, p);
    for (Index i = 0; i < p; ++i) {
        const auto idx = complement_indices(p, i);
        lasso::WeightedLassoProblem<double> pb{4.0 * sd(idx, idx), 2.0 * sd(idx, i), pd(idx, i)};
        const auto sol = lasso::solve_weighted_lasso(pb, std::optional<Vector<double>>{}, settings);
        for (std::size_t r2 = 0; r2 < idx.size(); ++r2) r.coef(i, idx[r2]) = sol.beta(Index(r2));
    }

    const double thr = zero_floor * r.coef.cwiseAbs().maxCoeff();
    r.adjacency_and = Mask::Constant(p, p, false);
    r.adjacency_or = Mask::Constant(p, p, false);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            const bool a = std::abs(r.coef(i, j)) > thr;
            const bool b = std::abs(r.coef(j, i)) > thr;
            r.adjacency_and(i, j) = r.adjacency_and(j, i) = a && b;
            r.adjacency_or(i, j) = r.adjacency_or(j, i) = a || b;
        }
    }
    return r;
}

NeighborhoodResult mb_select(const Dataset& data, const PenaltyMatrix<double>& penalty,
                             const lasso::LassoSettings& settings)
{
    return mb_select(empirical_covariance(data), penalty, settings);
}

double mb_max_penalty(const SymmetricMatrix<double>& s, Index n)
{
    return 2.0 * glasso::max_penalty(s, n);
}

double pseudo_log_likelihood(const SymmetricMatrix<double>& s, const Matrix<double>& k, Index n)
{
    const Index p = s.dim();
    if (k.rows() != p || k.cols() != p) throw DimensionError("S and K dimensions disagree");
    const auto& sd = s.dense();
    double acc = 0;
    for (Index i = 0; i < p; ++i) {
        const double kii = k(i, i);
        if (!(kii > 0)) throw DomainError("K_" + std::to_string(i) + std::to_string(i) + " must be positive");
        const auto idx = complement_indices(p, i);
        const Eigen::RowVectorXd krow = k(i, idx);
        const Eigen::RowVectorXd srow = sd(i, idx);
        const double quad = krow * sd(idx, idx) * krow.transpose();
        acc += std::log(kii) - kii * sd(i, i) - 2.0 * srow.dot(krow) - quad / kii;
    }
    return double(n) / 2.0 * acc - double(n) * double(p) / 2.0 * std::log(2.0 * std::numbers::pi);
}

PatternReport zero_pattern_compare(const Matrix<double>& a, const Matrix<double>& b, double floor)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("pattern shapes disagree");
    PatternReport rep;
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if (i == j) continue;
            ++rep.compared;
            if ((std::abs(a(i, j)) > floor) == (std::abs(b(i, j)) > floor)) ++rep.agreements;
            else rep.disagreements.emplace_back(i, j);
        }
    }
    return rep;
}

void write_neighborhood_edges(const NeighborhoodResult& r, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << "i,j,rule\n";
    const Index p = r.coef.rows();
    for (const auto& [mask, name] : {std::pair{&r.adjacency_and, "AND"}, std::pair{&r.adjacency_or, "OR"}})
        for (Index i = 0; i < p; ++i)
            for (Index j = i + 1; j < p; ++j)
                if ((*mask)(i, j)) out << i << ',' << j << ',' << name << '\n';
}

} // namespace structnet
