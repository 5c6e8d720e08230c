#pragma once
#include <vector>
#include <structnet/linalg.hpp>

namespace structnet {

/// Tolerated probability of a false component merge, for a sample of n observations of p variables.
struct ErrorBudget
{
    double epsilon = 0.05;
    Index n = 0;
    Index p = 0;

    void validate() const;
};

/**
 * Largest Laplace scale lambda that still keeps spurious component merges
 * below epsilon:
 *
 *     lambda* = (2/n) sqrt(n - 2 + t^2) / (t sqrt(max_{i!=j} S_ii S_jj)),
 *     t = t_{n-2}(epsilon / (2 p^2)).
 *
 * The guarantee holds for every lambda <= lambda*, i.e. ell_1 weight 1/lambda
 * at least 1/lambda*.
 */
double lambda_floor(const ErrorBudget& budget, const SymmetricMatrix<double>& s);

/// Same bound with the max restricted to pairs labeled (q, l); absent pairs get lambda_floor.
Matrix<double> lambda_floor_classwise(const ErrorBudget& budget, const SymmetricMatrix<double>& s,
                                      const std::vector<int>& labels);

} // namespace structnet
