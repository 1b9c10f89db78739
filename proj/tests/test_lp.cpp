#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace copodual;

namespace {

/// Feasible bounded random LP: rows generated around an interior point,
/// boxes keep the polytope bounded.
LinearProgram random_lp(int n, int rows, std::mt19937_64& rng, bool with_box = true) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> slack(0.05, 1.5);
    LinearProgram lp = LinearProgram::make(n);
    for (int j = 0; j < n; ++j) {
        lp.objective(j) = unif(rng);
        if (with_box) lp.set_box(j, -10.0, 10.0);
    }
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0(j) = 3.0 * unif(rng);
    for (int r = 0; r < rows; ++r) {
        Eigen::VectorXd g(n);
        for (int j = 0; j < n; ++j) g(j) = unif(rng);
        lp.add_ineq(g, g.dot(x0) - slack(rng));
    }
    return lp;
}

double kkt_stationarity(const LinearProgram& lp, const LpSolution& sol) {
    Eigen::VectorXd resid = lp.objective;
    for (size_t r = 0; r < lp.ineq.size(); ++r) {
        resid -= sol.ineq_duals(static_cast<Eigen::Index>(r)) * lp.ineq[r].coeffs;
    }
    for (size_t r = 0; r < lp.eq.size(); ++r) {
        resid -= sol.eq_duals(static_cast<Eigen::Index>(r)) * lp.eq[r].coeffs;
    }
    resid -= sol.lower_duals;
    resid += sol.upper_duals;
    return resid.cwiseAbs().maxCoeff();
}

double kkt_complementarity(const LinearProgram& lp, const LpSolution& sol) {
    double worst = 0.0;
    for (size_t r = 0; r < lp.ineq.size(); ++r) {
        const double s = lp.ineq[r].coeffs.dot(sol.y) - lp.ineq[r].rhs;
        worst = std::max(worst, std::abs(sol.ineq_duals(static_cast<Eigen::Index>(r)) * s));
    }
    return worst;
}

double feasibility_violation(const LinearProgram& lp, const LpSolution& sol) {
    double worst = 0.0;
    for (const auto& r : lp.ineq) worst = std::max(worst, r.rhs - r.coeffs.dot(sol.y));
    for (const auto& r : lp.eq) worst = std::max(worst, std::abs(r.coeffs.dot(sol.y) - r.rhs));
    for (int j = 0; j < lp.num_vars; ++j) {
        if (std::isfinite(lp.lower(j))) worst = std::max(worst, lp.lower(j) - sol.y(j));
        if (std::isfinite(lp.upper(j))) worst = std::max(worst, sol.y(j) - lp.upper(j));
    }
    return worst;
}

} // namespace

TEST_CASE("spec examples") {
    // min -y s.t. y <= 1 (as -y >= -1), y >= 0
    LinearProgram lp1 = LinearProgram::make(1);
    lp1.objective << -1.0;
    lp1.add_ineq(-Eigen::VectorXd::Ones(1), -1.0);
    lp1.add_ineq(Eigen::VectorXd::Ones(1), 0.0);
    const LpSolution s1 = solve_lp(lp1);
    REQUIRE(s1.status == LpStatus::optimal);
    CHECK(s1.y(0) == doctest::Approx(1.0));
    CHECK(s1.value == doctest::Approx(-1.0));
    CHECK(s1.ineq_duals(0) == doctest::Approx(1.0));
    CHECK(s1.ineq_duals(1) == doctest::Approx(0.0));

    // min 0 s.t. y = 5
    LinearProgram lp2 = LinearProgram::make(1);
    lp2.add_eq(Eigen::VectorXd::Ones(1), 5.0);
    const LpSolution s2 = solve_lp(lp2);
    REQUIRE(s2.status == LpStatus::optimal);
    CHECK(s2.y(0) == doctest::Approx(5.0));
    CHECK(s2.value == doctest::Approx(0.0));

    // min y s.t. y >= 1, y >= 2: only the binding row carries weight
    LinearProgram lp3 = LinearProgram::make(1);
    lp3.objective << 1.0;
    lp3.add_ineq(Eigen::VectorXd::Ones(1), 1.0);
    lp3.add_ineq(Eigen::VectorXd::Ones(1), 2.0);
    const LpSolution s3 = solve_lp(lp3);
    REQUIRE(s3.status == LpStatus::optimal);
    CHECK(s3.y(0) == doctest::Approx(2.0));
    CHECK(s3.ineq_duals(0) == doctest::Approx(0.0));
    CHECK(s3.ineq_duals(1) == doctest::Approx(1.0));
    CHECK(active_support(s3) == std::vector<int>{1});
}

TEST_CASE("active_support edge cases") {
    // no binding inequality at the optimum
    LinearProgram lp = LinearProgram::make(1);
    lp.objective << 0.0;
    lp.add_eq(Eigen::VectorXd::Ones(1), 3.0);
    lp.add_ineq(Eigen::VectorXd::Ones(1), 1.0);
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(active_support(s).empty());

    // degenerate pair y >= 0, 2y >= 0 under min y: exactly one positive dual
    LinearProgram lpd = LinearProgram::make(1);
    lpd.objective << 1.0;
    lpd.add_ineq(Eigen::VectorXd::Ones(1), 0.0);
    lpd.add_ineq(2.0 * Eigen::VectorXd::Ones(1), 0.0);
    const LpSolution sd = solve_lp(lpd);
    REQUIRE(sd.status == LpStatus::optimal);
    CHECK(active_support(sd).size() == 1);

    LpSolution bad;
    bad.status = LpStatus::infeasible;
    CHECK_THROWS_AS(active_support(bad), std::logic_error);
}

TEST_CASE("statuses") {
    LinearProgram unb = LinearProgram::make(1);
    unb.objective << -1.0;
    unb.add_ineq(Eigen::VectorXd::Ones(1), 0.0);
    CHECK(solve_lp(unb).status == LpStatus::unbounded);

    LinearProgram inf = LinearProgram::make(1);
    inf.add_ineq(Eigen::VectorXd::Ones(1), 2.0);
    inf.add_ineq(-Eigen::VectorXd::Ones(1), -1.0);
    CHECK(solve_lp(inf).status == LpStatus::infeasible);
}

TEST_CASE("box bounds and start_at_upper") {
    LinearProgram lp = LinearProgram::make(2);
    lp.objective << 1.0, 1.0;
    lp.set_box(0, -5.0, 5.0);
    lp.set_box(1, -5.0, 5.0);
    lp.add_ineq(Eigen::Vector2d(1.0, 2.0), 3.0);
    lp.start_at_upper.push_back(0);
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(feasibility_violation(lp, s) <= 1e-8);
    CHECK(kkt_stationarity(lp, s) <= 1e-7);
    // optimum -5 - 5 is cut by the row: x1 + 2 x2 >= 3 with both cheap
    CHECK(s.value == doctest::Approx(-5.0 + (3.0 + 5.0) / 2.0 - 5.0).epsilon(1e-9));
}

TEST_CASE("random LPs satisfy KKT and match brute force") {
    auto rng = testsup::make_rng(31);
    int solved = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 4);
        const int rows = n + static_cast<int>(rng() % 7);
        const LinearProgram lp = random_lp(n, rows, rng);
        const LpSolution sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        ++solved;
        CHECK(feasibility_violation(lp, sol) <= 1e-8);
        CHECK(kkt_stationarity(lp, sol) <= 1e-7);
        CHECK(kkt_complementarity(lp, sol) <= 1e-7 * (1.0 + std::abs(sol.value)));
        CHECK(static_cast<int>(active_support(sol).size()) <= lp.num_vars);

        const auto brute = testsup::brute_force_lp(lp);
        REQUIRE(brute.has_value());
        CHECK(sol.value == doctest::Approx(*brute).epsilon(1e-7));
    }
    CHECK(solved == 60);
}

TEST_CASE("strong duality identity on unboxed LPs") {
    auto rng = testsup::make_rng(32);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        // enclose with explicit rows instead of boxes so value = duals . rhs
        LinearProgram lp = random_lp(n, 2 + static_cast<int>(rng() % 6), rng, false);
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
            g(j) = 1.0;
            lp.add_ineq(g, -10.0);
            lp.add_ineq(-g, -10.0);
        }
        const LpSolution sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        double dual_value = 0.0;
        for (size_t r = 0; r < lp.ineq.size(); ++r) {
            dual_value += sol.ineq_duals(static_cast<Eigen::Index>(r)) * lp.ineq[r].rhs;
        }
        CHECK(std::abs(sol.value - dual_value) <= 1e-7 * (1.0 + std::abs(sol.value)));
        CHECK(kkt_stationarity(lp, sol) <= 1e-7);
    }
}

TEST_CASE("determinism") {
    auto rng1 = testsup::make_rng(33);
    auto rng2 = testsup::make_rng(33);
    const LinearProgram a = random_lp(5, 9, rng1);
    const LinearProgram b = random_lp(5, 9, rng2);
    const LpSolution sa = solve_lp(a);
    const LpSolution sb = solve_lp(b);
    CHECK(sa.iterations == sb.iterations);
    CHECK(sa.y == sb.y);
    CHECK(sa.ineq_duals == sb.ineq_duals);
}

TEST_CASE("equality rows receive duals") {
    LinearProgram lp = LinearProgram::make(2);
    lp.objective << 1.0, 2.0;
    lp.add_eq(Eigen::Vector2d(1.0, 1.0), 1.0);
    lp.add_ineq(Eigen::Vector2d(1.0, 0.0), 0.0);
    lp.add_ineq(Eigen::Vector2d(0.0, 1.0), 0.0);
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.y.isApprox(Eigen::Vector2d(1.0, 0.0)));
    CHECK(kkt_stationarity(lp, s) <= 1e-9);
    CHECK(s.eq_duals(0) == doctest::Approx(1.0));
}

TEST_CASE("malformed input throws") {
    LinearProgram lp = LinearProgram::make(2);
    CHECK_THROWS_AS(lp.add_ineq(Eigen::VectorXd::Ones(3), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lp.set_box(5, 0.0, 1.0), std::invalid_argument);
}
