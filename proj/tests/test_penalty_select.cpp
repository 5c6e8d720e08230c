#include <doctest.h>
#include <numbers>
#include <structnet/penalty_select.hpp>
#include <structnet/student_t.hpp>
#include "support.hpp"

using namespace structnet;
using testing::survival_by_quadrature;

TEST_CASE("t survival examples")
{
    for (double df : {1.0, 4.0, 30.0}) CHECK(stats::student_t_survival(0.0, df) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(stats::student_t_survival(1.0, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(stats::student_t_survival(1.96, 200) - 0.025) < 2e-3);
    // reference values from an independent statistics library
    CHECK(stats::student_t_survival(1.96, 200) == doctest::Approx(0.025692420422906675).epsilon(1e-10));
    CHECK(stats::student_t_survival(3.3, 5) == doctest::Approx(0.010737750149998988).epsilon(1e-10));
}

TEST_CASE("t survival matches numerical integration")
{
    for (double df : {3.0, 5.0, 30.0}) {
        for (int k = -50; k <= 50; ++k) {
            const double x = 0.1 * k;
            CAPTURE(df);
            CAPTURE(x);
            CHECK(std::abs(stats::student_t_survival(x, df) - survival_by_quadrature(x, df)) < 1e-8);
        }
    }
}

TEST_CASE("t survival is decreasing")
{
    double prev = 1.0;
    for (int k = -100; k <= 100; ++k) {
        const double v = stats::student_t_survival(0.2 * k, 7);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("t quantile")
{
    CHECK(stats::student_t_upper_quantile(0.5, 9) == 0.0);
    CHECK(stats::student_t_upper_quantile(0.25, 1) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(stats::student_t_upper_quantile(1e-4, 7) == doctest::Approx(7.0634328281575165).epsilon(1e-10));
    for (double u : {1e-4, 0.01, 0.3, 0.7}) {
        for (double df : {1.0, 3.0, 98.0}) {
            const double t = stats::student_t_upper_quantile(u, df);
            CHECK(std::abs(stats::student_t_survival(t, df) - u) < 1e-10);
        }
    }
    // deep tail stays finite and consistent on the log scale
    const double t = stats::student_t_upper_quantile(1e-12, 10);
    CHECK(stats::student_t_log_survival(t, 10) == doctest::Approx(std::log(1e-12)).epsilon(1e-9));
    CHECK_THROWS_AS(stats::student_t_upper_quantile(0.0, 3), DomainError);
    CHECK_THROWS_AS(stats::student_t_upper_quantile(1.0, 3), DomainError);
}

TEST_CASE("lambda floor against an external reference")
{
    const ErrorBudget b{0.05, 100, 26};
    const double v = lambda_floor(b, SymmetricMatrix<double>::identity(26));
    // t = 4.138645440864814 and the floor from scipy's t.isf and the same displayed formula
    CHECK(v == doctest::Approx(0.0518516979064453).epsilon(1e-9));
}

TEST_CASE("lambda floor monotonicity and scaling")
{
    const auto id = SymmetricMatrix<double>::identity(10);
    // larger epsilon: smaller quantile, larger admissible scale
    double prev = 0;
    for (double eps : {0.001, 0.01, 0.05, 0.2, 0.5, 0.9}) {
        const double v = lambda_floor({eps, 60, 10}, id);
        CHECK(v > prev);
        prev = v;
    }
    prev = std::numeric_limits<double>::infinity();
    for (Index n : {10, 20, 50, 100, 500, 2000}) {
        const double v = lambda_floor({0.05, n, 10}, id);
        CHECK(v < prev);
        prev = v;
    }
    const auto s = testing::random_covariance(40, 10, 3);
    Matrix<double> scaled = s.dense();
    const double c = 4.0;
    // multiply every variance by c: D S D with D = sqrt(c) I
    scaled *= c;
    CHECK(lambda_floor({0.05, 40, 10}, SymmetricMatrix<double>(scaled))
          == doctest::Approx(lambda_floor({0.05, 40, 10}, s) / c).epsilon(1e-12));
}

TEST_CASE("lambda floor errors")
{
    CHECK_THROWS_AS(lambda_floor({0.0, 50, 3}, SymmetricMatrix<double>::identity(3)), DomainError);
    CHECK_THROWS_AS(lambda_floor({0.05, 2, 3}, SymmetricMatrix<double>::identity(3)), DomainError);
    CHECK_THROWS_AS(lambda_floor({0.05, 50, 3}, SymmetricMatrix<double>(3)), CalibrationError);
    CHECK_THROWS_AS(lambda_floor({0.05, 50, 4}, SymmetricMatrix<double>::identity(3)), DimensionError);
}

TEST_CASE("classwise floor")
{
    const auto s = testing::random_covariance(40, 6, 9);
    const ErrorBudget b{0.05, 40, 6};
    const double global = lambda_floor(b, s);
    const Matrix<double> one = lambda_floor_classwise(b, s, std::vector<int>(6, 0));
    CHECK(one.rows() == 1);
    CHECK(one(0, 0) == doctest::Approx(global).epsilon(1e-14));

    Matrix<double> d = Matrix<double>::Identity(4, 4);
    d.diagonal() << 1, 2, 10, 20;
    const std::vector<int> z{0, 0, 1, 1};
    const auto cw = lambda_floor_classwise({0.05, 40, 4}, SymmetricMatrix<double>(d), z);
    // brute force: the floor scales as (max over labeled pairs)^(-1/2); the global max is 10 * 20
    const double base = lambda_floor({0.05, 40, 4}, SymmetricMatrix<double>(d));
    auto expect = [&](double maxprod) { return base * std::sqrt(200.0 / maxprod); };
    CHECK(cw(0, 0) == doctest::Approx(expect(2.0)).epsilon(1e-12));
    CHECK(cw(1, 1) == doctest::Approx(expect(200.0)).epsilon(1e-12));
    CHECK(cw(0, 1) == doctest::Approx(expect(40.0)).epsilon(1e-12));
    CHECK(cw(0, 0) > cw(0, 1));
    CHECK(cw(0, 1) > cw(1, 1));

    // a class with a single node has no within-class pair
    const auto lone = lambda_floor_classwise(b, s, {0, 0, 0, 0, 0, 1});
    CHECK(lone(1, 1) == doctest::Approx(global).epsilon(1e-14));

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        structnet::rng::Stream g(seed, "labels");
        std::vector<int> lab(6);
        for (auto& l : lab) l = int(g.below(3));
        const auto m = lambda_floor_classwise(b, s, lab);
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}
