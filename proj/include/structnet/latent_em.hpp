#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>
#include <structnet/dataset.hpp>
#include <structnet/glasso.hpp>
#include <structnet/latent_types.hpp>

namespace structnet::em {

struct EmConfig
{
    Index clusters = 2;
    /// Two Laplace scales only: lambda_in within clusters, lambda_out across.
    bool affiliation = true;
    /// lambda_in / lambda_out when the scales are fixed rather than estimated.
    double lambda_ratio = 1.2;
    /// Re-estimate alpha and lambda in the E-step (the M-step may still use an override).
    bool estimate_lambda = true;
    double em_tol = 1e-4;
    double fixedpoint_tol = 1e-6;
    int em_max_iter = 50;
    int fixedpoint_max_iter = 200;
    std::uint64_t seed = 1;
    /// 1/lambda0; unset selects the default policy (0 when S is PD).
    std::optional<double> inv_lambda0;
    GlassoSettings glasso;

    void validate() const;
};

struct EmResult
{
    PrecisionEstimate<double> estimate;
    LatentPosterior tau;
    /// Parameters of the last E-step.
    MixtureParams params;
    /// Scales used by the last M-step (equal to params.lambda without override).
    Matrix<double> mstep_lambda;
    std::vector<double> qhat_trace;
    int iterations = 0;
    int fixedpoint_fallbacks = 0;
    bool converged = false;
};

/**
 * Ng-Jordan-Weiss spectral clustering of the variables: affinity |S_ij| off
 * the diagonal, the top-Q eigenvectors of D^{-1/2} A D^{-1/2} with rows
 * normalized, then k-means with 20 seeded k-means++ restarts. Returns a hard
 * assignment; clusters may be empty (see empty_clusters).
 */
LatentPosterior spectral_init(const SymmetricMatrix<double>& s, Index q, std::uint64_t seed);

std::vector<Index> empty_clusters(const LatentPosterior& tau);

/// One application of the fixed-point map g, computed in log space.
LatentPosterior fixed_point_map(const SymmetricMatrix<double>& k, const MixtureParams& params,
                                const LatentPosterior& tau);

struct FixedPointResult
{
    LatentPosterior tau;
    int iterations = 0;
    /// false means the iteration budget ran out and tau is the starting value.
    bool converged = false;
};

/// Iterates tau <- g(tau) until max |delta tau| < cfg.fixedpoint_tol.
FixedPointResult estep_fixed_point(const SymmetricMatrix<double>& k, const MixtureParams& params,
                                   const LatentPosterior& tau0, const EmConfig& cfg);

/// alpha_q = (1/p) sum_i tau_iq.
Vector<double> update_alpha(const LatentPosterior& tau);

/**
 * lambda_ql = sum_{i!=j} tau_iq tau_jl |K_ij| / sum_{i!=j} tau_iq tau_jl.
 * Pairs (q,l) without weight get the mean off-diagonal |K_ij|.
 */
Matrix<double> update_lambda(const LatentPosterior& tau, const SymmetricMatrix<double>& k);

/// Affiliation form of update_lambda: pooled intra- and inter-cluster ratios.
Matrix<double> update_lambda_affiliation(const LatentPosterior& tau, const SymmetricMatrix<double>& k);

/// Floor applied to estimated scales before use.
inline constexpr double lambda_floor_value = 1e-6;

/// Variational lower bound J_tau(X, K) including the Gaussian constant.
double lower_bound_J(const LatentPosterior& tau, const SymmetricMatrix<double>& k, const MixtureParams& params,
                     const SymmetricMatrix<double>& s, Index n);

/// J minus the entropy of R_tau, the quantity monitored by the EM loop.
double expected_complete_loglik(const LatentPosterior& tau, const SymmetricMatrix<double>& k,
                                const MixtureParams& params, const SymmetricMatrix<double>& s, Index n);

/**
 * Alternates variational E-steps with penalized M-steps. `mstep_lambda`, when
 * given, replaces the scales in the M-step penalty; `known_tau` switches to
 * perfect mode (E-step skipped, tau held at the supplied assignment).
 */
EmResult run_em(const SymmetricMatrix<double>& s, Index n, const EmConfig& cfg,
                const std::optional<Matrix<double>>& mstep_lambda = std::nullopt,
                const std::optional<LatentPosterior>& known_tau = std::nullopt);

EmResult run_em(const Dataset& data, const EmConfig& cfg,
                const std::optional<Matrix<double>>& mstep_lambda = std::nullopt,
                const std::optional<LatentPosterior>& known_tau = std::nullopt);

/// Q x Q affiliation scale matrix.
Matrix<double> affiliation_lambda(Index q, double lambda_in, double lambda_out);

struct ContractionEntry
{
    Index i = 0;
    Index j = 0;
    double h_in = 0;
    double h_out = 0;
    bool pass = false;
};

struct ContractionReport
{
    bool pass = false;
    /// max |K_ij| < 1/(2e): necessary for any scale to pass.
    bool below_inv_2e = false;
    /// eps / (2 (p-1) (1 + eps)).
    double bound = 0;
    /// (1 + 1/eps) 2 (p-1) max_ij max(h_in, h_out).
    double lipschitz = 0;
    double max_h = 0;
    std::string reason;
    std::vector<ContractionEntry> entries;
};

/**
 * Sufficient condition for g to contract on the set of tau with entries in
 * [eps, 1-eps]: 0 < h_K(lambda) = |K_ij|/lambda + log 2 lambda < bound for
 * every off-diagonal entry and both affiliation scales.
 */
ContractionReport contraction_check(const SymmetricMatrix<double>& k, double lambda_in, double lambda_out,
                                    double eps);

/// max_i log( max_q(a_iq/b_iq) / min_q(a_iq/b_iq) ), entries floored at 1e-12.
double tau_distance(const LatentPosterior& a, const LatentPosterior& b);

} // namespace structnet::em
