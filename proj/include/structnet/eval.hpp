#pragma once
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>
#include <json.hpp>
#include <structnet/glasso.hpp>
#include <structnet/latent_em.hpp>
#include <structnet/netsim.hpp>

namespace structnet::eval {

/// Counts over the upper-triangle pairs i < j.
struct Confusion
{
    Index tp = 0;
    Index fp = 0;
    Index tn = 0;
    Index fn = 0;

    /// 1 when nothing is predicted.
    double precision() const noexcept { return tp + fp == 0 ? 1.0 : double(tp) / double(tp + fp); }
    /// 1 when there is nothing to find.
    double recall() const noexcept { return tp + fn == 0 ? 1.0 : double(tp) / double(tp + fn); }
    Index total() const noexcept { return tp + fp + tn + fn; }
};

Confusion confusion(const Mask& est, const Mask& truth);

struct PRPoint
{
    double penalty = 0;
    Confusion counts;
    double precision = 1;
    double recall = 0;
};

struct PRCurve
{
    std::vector<PRPoint> points;
    double aupr = 0;
    /// "penalty: message" for grid points whose solver failed.
    std::vector<std::string> skipped;
};

using Selector = std::function<Mask(double)>;

/**
 * Trapezoid area over recall-sorted points; duplicate recalls keep their best
 * precision. Without a recall-0 point the curve starts at (0, 1), the value an
 * empty selection would give.
 */
double aupr(const std::vector<PRPoint>& points);

/// Runs `select` at every grid value. Solver errors skip the point and are recorded.
PRCurve pr_sweep(const Mask& truth, const std::vector<double>& grid, const Selector& select);

/// `size` log-spaced values from top * min_ratio up to top * 1.01, increasing.
std::vector<double> penalty_grid(double top, Index size, double min_ratio);

struct Containment
{
    bool contained = true;
    /// A node k whose estimated component is not inside its true one, or -1.
    Index witness = -1;
};

/// True iff every connected component of `est` lies inside a component of `truth`.
Containment component_containment(const Mask& est, const Mask& truth);

/// CSV columns penalty,tp,fp,tn,fn,precision,recall.
void write_pr_curve_csv(const PRCurve& curve, const std::filesystem::path& path);

inline const std::vector<std::string>& known_methods()
{
    static const std::vector<std::string> m{"simone", "simone-perfect", "glasso", "mb-and", "mb-or", "invcor"};
    return m;
}

struct BenchConfig
{
    netsim::AffiliationSpec spec;
    Index n = 100;
    Index replicates = 1;
    std::vector<std::string> methods{"glasso", "simone", "simone-perfect"};
    Index grid_size = 12;
    double grid_min_ratio = 0.02;
    /// lambda_in / lambda_out for the SIMoNe sweeps.
    double lambda_ratio = 1.2;
    em::EmConfig em;
    std::uint64_t seed = 1;

    void validate() const;
};

struct MethodRun
{
    std::string method;
    Index replicate = 0;
    PRCurve curve;
};

struct MethodSummary
{
    std::vector<double> aupr;
    double mean = 0;
    double sd = 0;
};

struct BenchResult
{
    std::vector<MethodRun> runs;
    std::map<std::string, MethodSummary> summary;
};

/// PR curve of one method on one covariance, swept over its own log grid.
PRCurve method_curve(const std::string& method, const SymmetricMatrix<double>& s, Index n,
                     const netsim::GroundTruth& gt, const BenchConfig& cfg);

/// Replicates in order; replicate r uses structure and data seeds derived from (seed, r).
BenchResult run_benchmark(const BenchConfig& cfg);

nlohmann::json summary_json(const BenchResult& result, const BenchConfig& cfg);

} // namespace structnet::eval
