#include <cmath>
#include <structnet/penalty_select.hpp>
#include <structnet/student_t.hpp>

namespace structnet {
namespace {

double floor_from_max(const ErrorBudget& b, double max_prod)
{
    if (!(max_prod > 0)) throw CalibrationError("max S_ii S_jj must be positive (zero variance in S)");
    const double df = double(b.n - 2);
    const double u = b.epsilon / (2.0 * double(b.p) * double(b.p));
    const double t = stats::student_t_upper_quantile(u, df);
    return 2.0 / double(b.n) * std::sqrt(df + t * t) / (t * std::sqrt(max_prod));
}

void check_dims(const ErrorBudget& b, const SymmetricMatrix<double>& s)
{
    b.validate();
    if (s.dim() != b.p) {
        throw DimensionError("budget has p = " + std::to_string(b.p) + " but S is " + std::to_string(s.dim()) + "x"
                             + std::to_string(s.dim()));
    }
}

} // namespace

void ErrorBudget::validate() const
{
    if (!(epsilon > 0 && epsilon < 1)) throw DomainError("epsilon must lie in (0, 1)");
    if (n <= 2) throw DomainError("need n > 2 samples");
    if (p < 2) throw DomainError("need p >= 2 variables");
}

double lambda_floor(const ErrorBudget& budget, const SymmetricMatrix<double>& s)
{
    check_dims(budget, s);
    double m = 0;
    for (Index j = 0; j < s.dim(); ++j)
        for (Index i = 0; i < j; ++i) m = std::max(m, s(i, i) * s(j, j));
    return floor_from_max(budget, m);
}

Matrix<double> lambda_floor_classwise(const ErrorBudget& budget, const SymmetricMatrix<double>& s,
                                      const std::vector<int>& labels)
{
    check_dims(budget, s);
    if (Index(labels.size()) != s.dim()) throw DimensionError("one label per variable required");
    int q = 0;
    for (const int l : labels) {
        if (l < 0) throw DataError("labels must be nonnegative");
        q = std::max(q, l + 1);
    }
    const double global = lambda_floor(budget, s);
    Matrix<double> m = Matrix<double>::Zero(q, q);
    for (Index j = 0; j < s.dim(); ++j) {
        for (Index i = 0; i < j; ++i) {
            const int a = labels[std::size_t(i)], b = labels[std::size_t(j)];
            const double v = s(i, i) * s(j, j);
            m(a, b) = std::max(m(a, b), v);
            m(b, a) = m(a, b);
        }
    }
    Matrix<double> out(q, q);
    for (Index b = 0; b < q; ++b)
        for (Index a = 0; a < q; ++a) out(a, b) = m(a, b) > 0 ? floor_from_max(budget, m(a, b)) : global;
    return out;
}

} // namespace structnet
