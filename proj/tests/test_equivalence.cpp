#include <catch_amalgamated.hpp>

#include "support/problems.hpp"

using namespace pdsolve;
using testutil::TestProblem;

namespace {

// 10 seeded problems, dense A up to 30x40: eight quadratic pairs and two
// nonsmooth (group-norm) pairs.
std::vector<TestProblem> equivalence_suite() {
    std::vector<TestProblem> suite;
    const std::pair<std::size_t, std::size_t> sizes[] = {{5, 7},   {10, 8},  {12, 20}, {30, 40},
                                                         {20, 30}, {8, 8},   {16, 10}, {25, 35}};
    std::uint64_t seed = 1000;
    for (auto [m, n] : sizes) suite.push_back(testutil::make_quadratic_problem(seed++, m, n));
    suite.push_back(testutil::make_groupnorm_problem(seed++, 15, 40));  // dual dim 30
    suite.push_back(testutil::make_groupnorm_problem(seed++, 6, 9));
    return suite;
}

Trajectory run(const TestProblem& tp, Variant v, std::size_t iters,
               std::optional<Vec> v0 = std::nullopt, std::optional<Vec> u0 = std::nullopt) {
    PrimalDualState st = PrimalDualState::start(tp.x0, tp.y0);
    st.v = std::move(v0);
    st.u = std::move(u0);
    return run_trajectory(tp.problem, testutil::config_for(tp, v), std::move(st), iters);
}

}  // namespace

TEST_CASE("cp-yxx and ladmd-yvx generate the same sequence when v0 = -A^T y0") {
    for (const auto& tp : equivalence_suite()) {
        const auto a = run(tp, Variant::cp_yxx, 100);
        const auto b = run(tp, Variant::ladmd_yvx, 100,
                           scaled(tp.problem.A().adjoint_apply(tp.y0), -1.0));
        const auto report = compare_runs(a, b, 0, 0, 1e-10, tp.name);
        INFO(tp.name << " max gap " << report.max_gap);
        REQUIRE(report.max_gap <= 1e-10);
        REQUIRE_FALSE(report.first_divergence_iter.has_value());
    }
}

TEST_CASE("the yvx initial condition is necessary: perturbed v0 diverges at k=1") {
    const auto tp = testutil::make_quadratic_problem(77, 12, 10);
    const auto a = run(tp, Variant::cp_yxx, 50);
    Vec v0 = scaled(tp.problem.A().adjoint_apply(tp.y0), -1.0);
    v0[0] += 0.1;
    const auto b = run(tp, Variant::ladmd_yvx, 50, v0);
    const auto report = compare_runs(a, b, 0, 0, 1e-10, "necessity probe");
    REQUIRE(report.first_divergence_iter.has_value());
    CHECK(*report.first_divergence_iter == 1);
    CHECK(report.max_gap > 1e-10);
}

TEST_CASE("cp-xxy and ladmd-vxy generate the same sequence unconditionally") {
    for (const auto& tp : equivalence_suite()) {
        const auto a = run(tp, Variant::cp_xxy, 100);
        const auto b = run(tp, Variant::ladmd_vxy, 100);
        const auto report = compare_runs(a, b, 0, 0, 1e-10, tp.name);
        INFO(tp.name << " max gap " << report.max_gap);
        REQUIRE(report.max_gap <= 1e-10);
    }
}

TEST_CASE("cp-xyy and ladmp-xuy generate the same sequence when u0 = A x0") {
    for (const auto& tp : equivalence_suite()) {
        const auto a = run(tp, Variant::cp_xyy, 100);
        const auto b = run(tp, Variant::ladmp_xuy, 100, std::nullopt,
                           tp.problem.A().apply(tp.x0));
        const auto report = compare_runs(a, b, 0, 0, 1e-10, tp.name);
        INFO(tp.name << " max gap " << report.max_gap);
        REQUIRE(report.max_gap <= 1e-10);
    }
}

TEST_CASE("cp-yyx and ladmp-uyx generate the same sequence unconditionally") {
    for (const auto& tp : equivalence_suite()) {
        const auto a = run(tp, Variant::cp_yyx, 100);
        const auto b = run(tp, Variant::ladmp_uyx, 100);
        const auto report = compare_runs(a, b, 0, 0, 1e-10, tp.name);
        INFO(tp.name << " max gap " << report.max_gap);
        REQUIRE(report.max_gap <= 1e-10);
    }
}

TEST_CASE("cyclic reindexing: cp-yxx equals cp-xxy started after the first dual update") {
    for (const auto& tp : equivalence_suite()) {
        const auto a = run(tp, Variant::cp_yxx, 100);
        // y^1 of cp-yxx (xbar^0 = x^0)
        const Vec y1 = tp.problem.prox_g_star(
            tp.sigma, combine(1.0, tp.y0, tp.sigma, tp.problem.A().apply(tp.x0)));
        TestProblem shifted = tp;
        shifted.y0 = y1;
        const auto b = run(shifted, Variant::cp_xxy, 99);
        // b[k] = (x^k, y^{k+1}) of the cp-yxx run
        const auto report = compare_runs(a, b, 0, 1, 1e-10, tp.name);
        INFO(tp.name << " max gap " << report.max_gap);
        REQUIRE(report.max_gap <= 1e-10);
    }
}

TEST_CASE("cyclic reindexing: cp-xyy equals cp-yyx started after the first primal update") {
    for (const auto& tp : equivalence_suite()) {
        const auto a = run(tp, Variant::cp_xyy, 100);
        // x^1 of cp-xyy (ybar^0 = y^0)
        const Vec x1 = tp.problem.prox_f(
            tp.tau, combine(1.0, tp.x0, -tp.tau, tp.problem.A().adjoint_apply(tp.y0)));
        TestProblem shifted = tp;
        shifted.x0 = x1;
        const auto b = run(shifted, Variant::cp_yyx, 99);
        // b[k] = (x^{k+1}, y^k) of the cp-xyy run
        const auto report = compare_runs(a, b, 1, 0, 1e-10, tp.name);
        INFO(tp.name << " max gap " << report.max_gap);
        REQUIRE(report.max_gap <= 1e-10);
    }
}

TEST_CASE("compare_runs reports identical logs and rejects empty overlaps") {
    const auto tp = testutil::make_quadratic_problem(5, 4, 3);
    const auto a = run(tp, Variant::cp_yyx, 10);
    const auto report = compare_runs(a, a);
    CHECK(report.max_gap == 0.0);
    CHECK_FALSE(report.first_divergence_iter.has_value());
    CHECK(report.gap_curve.size() == a.size());

    REQUIRE_THROWS_AS(compare_runs(a, a, 20, 20), std::invalid_argument);
}
