#pragma once

namespace structnet::stats {

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double x, double a, double b);

/// log I_x(a, b), accurate in the far lower tail.
double log_incomplete_beta(double x, double a, double b);

/// Density of Student's t with df degrees of freedom.
double student_t_density(double x, double df);

/// P(T > x) for T ~ t_df.
double student_t_survival(double x, double df);

/// log P(T > x); stays finite where the survival underflows.
double student_t_log_survival(double x, double df);

/// t with P(T > t) = u, for u in (0, 1).
double student_t_upper_quantile(double u, double df);

} // namespace structnet::stats
