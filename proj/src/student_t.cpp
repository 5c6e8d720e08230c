#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <structnet/errors.hpp>
#include <structnet/student_t.hpp>

namespace structnet::stats {
namespace {

constexpr double cf_tol = 1e-12;
constexpr int cf_max_iter = 10000;
constexpr double tiny = 1e-300;

// Continued fraction for I_x(a,b) (modified Lentz).
double beta_cf(double x, double a, double b)
{
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= cf_max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < cf_tol) return h;
    }
    throw ConvergenceError("incomplete beta continued fraction did not converge", 0.0);
}

double log_front(double x, double a, double b)
{
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
}

void check_df(double df)
{
    if (!(df > 0) || !std::isfinite(df)) throw DomainError("degrees of freedom must be positive");
}

} // namespace

double log_incomplete_beta(double x, double a, double b)
{
    if (!(a > 0) || !(b > 0)) throw DomainError("incomplete beta needs a, b > 0");
    if (!(x >= 0 && x <= 1)) throw DomainError("incomplete beta needs x in [0, 1]");
    if (x == 0) return -std::numeric_limits<double>::infinity();
    if (x == 1) return 0.0;
    if (x < (a + 1.0) / (a + b + 2.0)) return log_front(x, a, b) + std::log(beta_cf(x, a, b) / a);
    return std::log1p(-std::exp(log_front(x, a, b)) * beta_cf(1.0 - x, b, a) / b);
}

double incomplete_beta(double x, double a, double b)
{
    return std::exp(log_incomplete_beta(x, a, b));
}

double student_t_density(double x, double df)
{
    check_df(df);
    const double logc = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * std::numbers::pi);
    return std::exp(logc - (df + 1) / 2 * std::log1p(x * x / df));
}

double student_t_log_survival(double x, double df)
{
    check_df(df);
    if (std::isnan(x)) throw DomainError("t survival at NaN");
    if (x < 0) return std::log1p(-std::exp(student_t_log_survival(-x, df)));
    if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
    // P(T > x) = I_{df/(df+x^2)}(df/2, 1/2) / 2
    const double z = df / (df + x * x);
    return std::log(0.5) + log_incomplete_beta(z, df / 2, 0.5);
}

double student_t_survival(double x, double df)
{
    return std::exp(student_t_log_survival(x, df));
}

double student_t_upper_quantile(double u, double df)
{
    check_df(df);
    if (!(u > 0 && u < 1)) throw DomainError("quantile level must lie in (0, 1), got " + std::to_string(u));
    if (u == 0.5) return 0.0;
    if (u > 0.5) return -student_t_upper_quantile(1.0 - u, df);

    const double logu = std::log(u);
    double lo = 0.0, hi = 1.0;
    while (student_t_log_survival(hi, df) > logu) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw CalibrationError("t quantile bracket overflow");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_log_survival(mid, df) > logu) lo = mid;
        else hi = mid;
    }
    double t = 0.5 * (lo + hi);
    // Newton polish on log survival: d/dt log S = -f/S
    for (int it = 0; it < 5; ++it) {
        const double ls = student_t_log_survival(t, df);
        const double slope = -student_t_density(t, df) / std::exp(ls);
        if (!(slope < 0) || !std::isfinite(slope)) break;
        const double next = t - (ls - logu) / slope;
        if (!(next > lo && next < hi)) break;
        t = next;
    }
    return t;
}

} // namespace structnet::stats
