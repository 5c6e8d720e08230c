#include <doctest.h>
#include <structnet/lasso.hpp>
#include "support.hpp"

using namespace structnet;
using lasso::WeightedLassoProblem;

namespace {

WeightedLassoProblem<double> random_problem(Index d, double w, std::uint64_t seed)
{
    const auto g = testing::random_spd(d, seed);
    return {g.dense(), 2.0 * testing::gaussian_matrix(d, 1, seed + 1), Vector<double>::Constant(d, w)};
}

} // namespace

TEST_CASE("soft threshold")
{
    CHECK(lasso::soft_threshold(3.0, 1.0) == 2.0);
    CHECK(lasso::soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(lasso::soft_threshold(-3.0, 1.0) == -2.0);
}

TEST_CASE("one-dimensional problem")
{
    WeightedLassoProblem<double> pb{Matrix<double>::Constant(1, 1, 2.0), Vector<double>::Constant(1, 1.0),
                                    Vector<double>::Constant(1, 0.5)};
    const auto sol = lasso::solve_weighted_lasso(pb);
    CHECK(sol.beta(0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("large weights give the zero vector")
{
    auto pb = random_problem(5, 0, 3);
    pb.weights = pb.linear.cwiseAbs();
    const auto sol = lasso::solve_weighted_lasso(pb);
    CHECK(sol.beta.isZero(0.0));
}

TEST_CASE("matches a proximal-gradient oracle")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto pb = random_problem(4, 0.3, seed);
        const auto sol = lasso::solve_weighted_lasso(pb);
        const Vector<double> ref = testing::ista_lasso(pb);
        CHECK((sol.beta - ref).cwiseAbs().maxCoeff() < 1e-5);
        CHECK(sol.max_kkt_violation <= 1e-7);
    }
}

TEST_CASE("objective is non-increasing across sweeps")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto pb = random_problem(8, 0.2, seed);
        lasso::LassoSettings st;
        st.record_objective = true;
        const auto sol = lasso::solve_weighted_lasso(pb, std::nullopt, st);
        double prev = 0; // objective at beta = 0
        for (const double v : sol.objective_trace) {
            CHECK(v <= prev + 1e-14 * (1 + std::abs(prev)));
            prev = v;
        }
    }
}

TEST_CASE("solution is independent of the starting point")
{
    const auto pb = random_problem(6, 0.1, 42);
    const auto a = lasso::solve_weighted_lasso(pb);
    const Vector<double> init = testing::gaussian_matrix(6, 1, 9);
    const auto b = lasso::solve_weighted_lasso(pb, std::optional<Vector<double>>(init));
    CHECK((a.beta - b.beta).cwiseAbs().maxCoeff() < 10 * 1e-7);
}

TEST_CASE("homogeneity in linear term and weights")
{
    auto pb = random_problem(5, 0.25, 17);
    lasso::LassoSettings st{1e-12, 100000};
    const auto a = lasso::solve_weighted_lasso(pb, std::nullopt, st);
    pb.linear *= 3.0;
    pb.weights *= 3.0;
    const auto b = lasso::solve_weighted_lasso(pb, std::nullopt, st);
    CHECK((b.beta - 3.0 * a.beta).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("zero weights solve the normal equations")
{
    const auto pb = random_problem(6, 0.0, 5);
    const auto sol = lasso::solve_weighted_lasso(pb, std::nullopt, {1e-12, 100000});
    const Vector<double> ref = 2.0 * pb.gram.llt().solve(pb.linear);
    CHECK((sol.beta - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("input validation and non-convergence")
{
    auto pb = random_problem(3, 0.1, 1);
    pb.weights(1) = -1;
    CHECK_THROWS_AS(lasso::solve_weighted_lasso(pb), DomainError);
    pb = random_problem(3, 0.1, 1);
    pb.gram(2, 2) = 0;
    CHECK_THROWS_AS(lasso::solve_weighted_lasso(pb), DefinitenessError);
    pb = random_problem(30, 0.0, 2);
    CHECK_THROWS_AS(lasso::solve_weighted_lasso(pb, std::nullopt, {1e-14, 1}), ConvergenceError);
}
