#pragma once
#include <cstdint>
#include <filesystem>
#include <vector>
#include <structnet/dataset.hpp>
#include <structnet/glasso.hpp>

namespace structnet::netsim {

struct AffiliationSpec
{
    Index p = 0;
    Index clusters = 1;
    /// Cluster proportions; empty means uniform.
    Vector<double> alpha;
    double p_in = 0;
    double p_out = 0;
    std::uint64_t seed = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    Vector<double> proportions() const;
};

struct GroundTruth
{
    std::vector<int> z;
    SymmetricMatrix<double> k_true;
    SymmetricMatrix<double> sigma_true;
    /// Upper-triangular edge indicator (i < j).
    Mask edges;

    Index edge_count() const;
    /// Symmetric version of `edges`.
    Mask symmetric_edges() const;
};

/// C(p,2) (sum_q alpha_q^2 p_in + (1 - sum_q alpha_q^2) p_out).
double expected_edge_count(const AffiliationSpec& spec);

/**
 * Labels ~ Multinomial(alpha); pair i<j linked with probability p_in (same
 * label) or p_out; weights +-1 with fair signs; diagonal = row abs sum + 0.1;
 * finally K <- D^{-1/2} K D^{-1/2} for a unit diagonal.
 */
GroundTruth sample_structure(const AffiliationSpec& spec);

/// n draws from N(0, sigma_true), rows x = L z with L the Cholesky factor of sigma_true.
Dataset sample_data(const GroundTruth& gt, Index n, std::uint64_t seed);

/// k_true.csv, sigma_true.csv, labels.csv and edges.csv (header i,j) in `dir`.
void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& dir);

} // namespace structnet::netsim
