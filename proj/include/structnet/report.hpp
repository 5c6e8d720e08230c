#pragma once
#include <filesystem>
#include <json.hpp>
#include <structnet/glasso.hpp>
#include <structnet/latent_em.hpp>

namespace structnet::report {

/// Upper-triangle edges as CSV rows i,j,K_ij (header included).
void write_edge_list(const SymmetricMatrix<double>& k, const std::filesystem::path& path);

/// k_hat.csv, sigma_hat.csv and edges.csv in `dir`.
void write_precision(const PrecisionEstimate<double>& est, const std::filesystem::path& dir);

nlohmann::json em_result_json(const em::EmResult& res);

/// em_result.json, tau.csv (p x Q) and clusters.csv (node,label) in `dir`.
void write_em_result(const em::EmResult& res, const std::filesystem::path& dir);

} // namespace structnet::report
