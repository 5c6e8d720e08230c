#include <fstream>
#include <structnet/io.hpp>
#include <structnet/report.hpp>

namespace structnet::report {
namespace {

nlohmann::json matrix_json(const Matrix<double>& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(std::size_t(m.cols()));
        for (Index j = 0; j < m.cols(); ++j) r[std::size_t(j)] = m(i, j);
        rows.push_back(r);
    }
    return rows;
}

} // namespace

void write_edge_list(const SymmetricMatrix<double>& k, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    const Mask m = edge_mask(k);
    out << "i,j,weight\n";
    for (Index i = 0; i < k.dim(); ++i)
        for (Index j = i + 1; j < k.dim(); ++j)
            if (m(i, j)) out << i << ',' << j << ',' << io::format_double(k(i, j)) << '\n';
}

void write_precision(const PrecisionEstimate<double>& est, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    io::write_matrix_csv((dir / "k_hat.csv").string(), est.k.dense());
    io::write_matrix_csv((dir / "sigma_hat.csv").string(), est.sigma.dense());
    write_edge_list(est.k, dir / "edges.csv");
}

nlohmann::json em_result_json(const em::EmResult& res)
{
    nlohmann::json j;
    j["alpha"] = std::vector<double>(res.params.alpha.data(), res.params.alpha.data() + res.params.alpha.size());
    j["lambda"] = matrix_json(res.params.lambda);
    j["mstep_lambda"] = matrix_json(res.mstep_lambda);
    // JSON has no infinity
    if (std::isinf(res.params.lambda0)) j["lambda0"] = nullptr;
    else j["lambda0"] = res.params.lambda0;
    j["qhat_trace"] = res.qhat_trace;
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    j["fixedpoint_fallbacks"] = res.fixedpoint_fallbacks;
    j["glasso_cycles"] = res.estimate.cycles;
    return j;
}

void write_em_result(const em::EmResult& res, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    io::write_text((dir / "em_result.json").string(), em_result_json(res).dump(2) + "\n");
    io::write_matrix_csv((dir / "tau.csv").string(), res.tau.tau());
    io::write_labels_csv((dir / "clusters.csv").string(), res.tau.hard_labels());
}

} // namespace structnet::report
