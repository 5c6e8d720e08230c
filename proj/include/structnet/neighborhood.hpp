#pragma once
#include <filesystem>
#include <utility>
#include <vector>
#include <structnet/dataset.hpp>
#include <structnet/glasso.hpp>

namespace structnet {

struct NeighborhoodResult
{
    /// Row i holds the regression coefficients of X_i on the other variables; zero diagonal.
    Matrix<double> coef;
    Mask adjacency_and;
    Mask adjacency_or;
};

/**
 * Neighborhood selection: for every node i,
 *
 *     min_a (1/n) ||X_i - X_{\i} a||^2 + sum_j P_ij |a_j|,
 *
 * i.e. a weighted lasso with gram 4 S_{\i\i}, linear 2 S_{\i i} and weights
 * from row i of the penalty (P = 2 rho / n as in the glasso). Every edge
 * vanishes once P_ij >= 2 |S_ij|.
 */
NeighborhoodResult mb_select(const SymmetricMatrix<double>& s, const PenaltyMatrix<double>& penalty,
                             const lasso::LassoSettings& settings = {1e-10, 100000});

NeighborhoodResult mb_select(const Dataset& data, const PenaltyMatrix<double>& penalty,
                             const lasso::LassoSettings& settings = {1e-10, 100000});

/// Smallest uniform ell_1 weight that empties the neighborhood graph: n max_{i!=j} |S_ij|.
double mb_max_penalty(const SymmetricMatrix<double>& s, Index n);

/**
 * (n/2) sum_i ( log K_ii - K_ii S_ii - 2 S_{i\i} K_{\i i} - K_{i\i} S_{\i\i} K_{\i i} / K_ii )
 * - (np/2) log 2 pi. K need not be symmetric.
 */
double pseudo_log_likelihood(const SymmetricMatrix<double>& s, const Matrix<double>& k, Index n);

struct PatternReport
{
    Index agreements = 0;
    Index compared = 0;
    std::vector<std::pair<Index, Index>> disagreements;

    bool identical() const noexcept { return disagreements.empty(); }
};

/// Compares the off-diagonal masks |a_ij| > floor and |b_ij| > floor.
PatternReport zero_pattern_compare(const Matrix<double>& a, const Matrix<double>& b, double floor);

/// CSV with header i,j,rule listing AND edges then OR edges, i < j.
void write_neighborhood_edges(const NeighborhoodResult& r, const std::filesystem::path& path);

} // namespace structnet
