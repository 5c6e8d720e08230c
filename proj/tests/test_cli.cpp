#include <doctest.h>
#include <sys/wait.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <json.hpp>
#include <structnet/dataset.hpp>
#include <structnet/io.hpp>

namespace fs = std::filesystem;
using namespace structnet;

namespace {

struct Run
{
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch()
{
    static const fs::path root = [] {
        const fs::path r = fs::temp_directory_path() / ("structnet_cli_" + std::to_string(::getpid()));
        fs::remove_all(r);
        fs::create_directories(r);
        return r;
    }();
    return root;
}

Run cli(const std::string& args)
{
    static int counter = 0;
    const fs::path o = scratch() / ("stdout" + std::to_string(counter));
    const fs::path e = scratch() / ("stderr" + std::to_string(counter++));
    const std::string cmd = std::string(STRUCTNET_CLI) + " " + args + " >" + o.string() + " 2>" + e.string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

bool same_tree(const fs::path& a, const fs::path& b)
{
    std::vector<fs::path> fa, fb;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    if (fa != fb || fa.empty()) return false;
    for (const auto& f : fa) {
        if (f == "config.json") continue; // echoes the differing output path
        if (slurp(a / f) != slurp(b / f)) return false;
    }
    return true;
}

const fs::path& simulated()
{
    static const fs::path dir = [] {
        const fs::path d = scratch() / "sim";
        REQUIRE(cli("simulate --seed 5 --p 15 --n 80 --p-in 0.4 --p-out 0.02 -o " + d.string()).code == 0);
        return d;
    }();
    return dir;
}

} // namespace

TEST_CASE("version and usage")
{
    const auto v = cli("--version");
    CHECK(v.code == 0);
    CHECK(v.out.find("em_tol") != std::string::npos);
    CHECK(cli("").code == 2);
    CHECK(cli("simulate --no-such-flag 3").code == 2);
}

TEST_CASE("simulate")
{
    const fs::path d = simulated();
    for (const char* f : {"data.csv", "k_true.csv", "sigma_true.csv", "labels.csv", "edges.csv", "config.json"})
        CHECK(fs::exists(d / f));
    const auto data = read_dataset_csv((d / "data.csv").string());
    CHECK(data.n() == 80);
    CHECK(data.p() == 15);
    CHECK(io::read_matrix_csv((d / "k_true.csv").string()).rows() == 15);
    CHECK(io::read_labels_csv((d / "labels.csv").string()).size() == 15);

    const fs::path again = scratch() / "sim_again";
    REQUIRE(cli("simulate --seed 5 --p 15 --n 80 --p-in 0.4 --p-out 0.02 -o " + again.string()).code == 0);
    CHECK(same_tree(d, again));

    const auto other = cli("simulate --seed 6 --p 15 --n 80 -o " + (scratch() / "sim6").string());
    CHECK(other.code == 0);
    CHECK(slurp(scratch() / "sim6" / "data.csv") != slurp(d / "data.csv"));

    const auto bad = cli("simulate --seed 5 --p-in 1.5 -o " + (scratch() / "bad").string());
    CHECK(bad.code == 2);
    CHECK(bad.err.find("p_in") != std::string::npos);
    CHECK(cli("simulate -o " + (scratch() / "noseed").string()).code == 2);
}

TEST_CASE("config round trip")
{
    const fs::path d = simulated();
    const fs::path re = scratch() / "sim_from_config";
    REQUIRE(cli("simulate --config " + (d / "config.json").string() + " -o " + re.string()).code == 0);
    CHECK(same_tree(d, re));
    // flags win over the file
    const fs::path bigger = scratch() / "sim_override";
    REQUIRE(cli("simulate --config " + (d / "config.json").string() + " --n 90 -o " + bigger.string()).code == 0);
    CHECK(read_dataset_csv((bigger / "data.csv").string()).n() == 90);

    std::ofstream(scratch() / "unknown.json") << R"({"bogus": 1})";
    CHECK(cli("simulate --config " + (scratch() / "unknown.json").string()).code == 2);
}

TEST_CASE("infer")
{
    const std::string data = (simulated() / "data.csv").string();
    const fs::path g = scratch() / "glasso";
    REQUIRE(cli("infer -m glasso --seed 1 --penalty 1 -d " + data + " -o " + g.string()).code == 0);
    std::ifstream edges(g / "edges.csv");
    std::string header, first;
    std::getline(edges, header);
    CHECK(header == "i,j,weight");
    CHECK(std::getline(edges, first));

    const fs::path s = scratch() / "simone_q1";
    REQUIRE(cli("infer -m simone -Q 1 --seed 1 --penalty 1 -d " + data + " -o " + s.string()).code == 0);
    const auto kg = io::read_matrix_csv((g / "k_hat.csv").string());
    const auto ks = io::read_matrix_csv((s / "k_hat.csv").string());
    CHECK((kg - ks).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(fs::exists(s / "em_result.json"));

    CHECK(cli("infer -m simone-perfect --seed 1 -d " + data + " -o " + (scratch() / "p").string()).code == 2);
    CHECK(cli("infer -m simone-perfect --seed 1 -d " + data + " --labels " + (simulated() / "labels.csv").string()
              + " -o " + (scratch() / "p").string())
              .code
          == 0);
    CHECK(cli("infer -m nope --seed 1 -d " + data + " -o " + (scratch() / "n").string()).code == 2);
    CHECK(cli("infer -m glasso --seed 1 -d " + (scratch() / "missing.csv").string()).code == 2);

    std::ofstream(scratch() / "broken.csv") << "a,b\n1,2\n3,x\n";
    CHECK(cli("infer -m glasso --seed 1 -d " + (scratch() / "broken.csv").string() + " -o "
              + (scratch() / "b").string())
              .code
          == 1);

    const fs::path m1 = scratch() / "mb1", m2 = scratch() / "mb2";
    REQUIRE(cli("infer -m mb-and --seed 1 -d " + data + " -o " + m1.string()).code == 0);
    REQUIRE(cli("infer -m mb-and --seed 1 -d " + data + " -o " + m2.string()).code == 0);
    CHECK(same_tree(m1, m2));

    const fs::path e1 = scratch() / "em1", e2 = scratch() / "em2";
    REQUIRE(cli("infer -m simone --seed 3 -d " + data + " -o " + e1.string()).code == 0);
    REQUIRE(cli("infer -m simone --seed 3 -d " + data + " -o " + e2.string()).code == 0);
    CHECK(same_tree(e1, e2));
}

TEST_CASE("benchmark")
{
    const std::string args = "benchmark --seed 2 --p 12 --n 60 -r 2 --methods glasso simone --grid-size 3 -o ";
    const fs::path a = scratch() / "bench_a", b = scratch() / "bench_b";
    REQUIRE(cli(args + a.string()).code == 0);
    REQUIRE(cli(args + b.string()).code == 0);
    std::size_t curves = 0;
    for (const auto& e : fs::directory_iterator(a / "curves")) curves += e.is_regular_file();
    CHECK(curves == 4);
    CHECK(fs::exists(a / "summary.json"));
    CHECK(same_tree(a, b));
    const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(summary["methods"]["glasso"]["aupr"].size() == 2);
    CHECK(cli("benchmark --seed 2 --methods nope -o " + (scratch() / "bench_c").string()).code == 2);
}

TEST_CASE("select-penalty")
{
    const fs::path cov = scratch() / "identity.csv";
    io::write_matrix_csv(cov.string(), Matrix<double>::Identity(26, 26));
    const auto r = cli("select-penalty --covariance " + cov.string() + " --n 100 --epsilon 0.05");
    REQUIRE(r.code == 0);
    const auto rep = nlohmann::json::parse(r.out);
    CHECK(rep["lambda_floor"].get<double>() == doctest::Approx(0.0518516979064453).epsilon(1e-10));

    const auto half = nlohmann::json::parse(
        cli("select-penalty --covariance " + cov.string() + " --n 100 --multiplier 0.5").out);
    CHECK(half["suggested_lambda"].get<double>() == doctest::Approx(0.5 * rep["suggested_lambda"].get<double>()));

    CHECK(cli("select-penalty --covariance " + cov.string() + " --n 100 --epsilon 0").code == 2);
    CHECK(cli("select-penalty --n 100").code == 2);

    const auto withlabels = cli("select-penalty -d " + (simulated() / "data.csv").string() + " --labels "
                                + (simulated() / "labels.csv").string());
    REQUIRE(withlabels.code == 0);
    CHECK(nlohmann::json::parse(withlabels.out).contains("lambda_floor_classwise"));
}
