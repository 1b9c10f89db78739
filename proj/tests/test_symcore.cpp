#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace copodual;

TEST_CASE("trace_inner basics") {
    const SymMatrix i2 = SymMatrix::identity(2);
    CHECK(trace_inner(i2, i2) == doctest::Approx(2.0));

    const SymMatrix z = SymMatrix::zero(3);
    auto rng = testsup::make_rng(1);
    const SymMatrix a = testsup::random_symmetric(3, rng);
    CHECK(trace_inner(a, z) == doctest::Approx(0.0));

    Eigen::MatrixXd m1(2, 2), m2(2, 2);
    m1 << 1, 2, 2, 3;
    m2 << 0, 1, 1, 0;
    CHECK(trace_inner(SymMatrix(m1), SymMatrix(m2)) == doctest::Approx(4.0));

    CHECK_THROWS_AS(trace_inner(i2, z), std::invalid_argument);
}

TEST_CASE("trace_inner is bilinear and symmetric") {
    auto rng = testsup::make_rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 4);
        const SymMatrix a = testsup::random_symmetric(p, rng);
        const SymMatrix b = testsup::random_symmetric(p, rng);
        const SymMatrix c = testsup::random_symmetric(p, rng);
        CHECK(trace_inner(a, b) == trace_inner(b, a));
        CHECK(trace_inner(a, b + c) ==
              doctest::Approx(trace_inner(a, b) + trace_inner(a, c)).epsilon(1e-12));
    }
}

TEST_CASE("quad_form examples") {
    CHECK(quad_form(SymMatrix::identity(2), Eigen::Vector2d(1, 0)) == doctest::Approx(1.0));

    Eigen::MatrixXd d(2, 2);
    d << 1, -2, -2, 1;
    CHECK(quad_form(SymMatrix(d), Eigen::Vector2d(0.5, 0.5)) == doctest::Approx(-0.5));

    const SymMatrix horn = load_matrix(testsup::fixture("horn_matrix.json"));
    CHECK(quad_form(horn, Eigen::VectorXd::Constant(5, 0.2)) == doctest::Approx(0.2));

    CHECK_THROWS_AS(quad_form(SymMatrix::identity(3), Eigen::Vector2d(1, 0)),
                    std::invalid_argument);
}

TEST_CASE("quad_form matches trace_inner against the rank-one gram") {
    auto rng = testsup::make_rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 4);
        const SymMatrix d = testsup::random_symmetric(p, rng);
        const SimplexPoint t = testsup::random_simplex_point(p, rng);
        const Eigen::MatrixXd outer = t.coords() * t.coords().transpose();
        CHECK(quad_form(d, t.coords()) ==
              doctest::Approx(trace_inner(d, SymMatrix::symmetrized(outer))).epsilon(1e-12));
    }
}

TEST_CASE("simplex grid enumeration") {
    const SimplexGrid g22 = simplex_grid(2, 2);
    REQUIRE(g22.points.size() == 3);
    CHECK(g22.points[0].coords().isApprox(Eigen::Vector2d(1, 0)));
    CHECK(g22.points[1].coords().isApprox(Eigen::Vector2d(0.5, 0.5)));
    CHECK(g22.points[2].coords().isApprox(Eigen::Vector2d(0, 1)));

    const SimplexGrid g31 = simplex_grid(3, 1);
    REQUIRE(g31.points.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(g31.points[static_cast<size_t>(k)].coords().isApprox(
            SimplexPoint::vertex(3, k).coords()));
    }

    CHECK(simplex_grid(3, 4).points.size() == 15);
    CHECK_THROWS(simplex_grid(6, 400));
}

TEST_CASE("grid point count equals the stars-and-bars formula") {
    auto binom = [](int a, int b) {
        std::int64_t r = 1;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    for (int p = 1; p <= 6; ++p) {
        for (int k = 1; k <= 12; ++k) {
            CHECK(simplex_grid_size(p, k) == binom(k + p - 1, p - 1));
            if (simplex_grid_size(p, k) < 100000) {
                CHECK(static_cast<std::int64_t>(simplex_grid(p, k).points.size()) ==
                      simplex_grid_size(p, k));
            }
        }
    }
}

TEST_CASE("every grid contains the simplex vertices") {
    for (int p = 2; p <= 4; ++p) {
        const SimplexGrid g = simplex_grid(p, 7);
        for (int v = 0; v < p; ++v) {
            bool found = false;
            for (const auto& pt : g.points) {
                if ((pt.coords() - SimplexPoint::vertex(p, v).coords()).norm() < 1e-14) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
        }
    }
}

TEST_CASE("max_eigenvalue") {
    CHECK(max_eigenvalue(SymMatrix::identity(3)) == doctest::Approx(1.0));
    Eigen::MatrixXd d = Eigen::Vector2d(2, 1).asDiagonal();
    CHECK(max_eigenvalue(SymMatrix(d)) == doctest::Approx(2.0));
    Eigen::MatrixXd f(2, 2);
    f << 0, 1, 1, 0;
    CHECK(max_eigenvalue(SymMatrix(f)) == doctest::Approx(1.0));
}

TEST_CASE("dist_to_hull closed forms") {
    const SimplexPoint e1 = SimplexPoint::vertex(2, 0);
    const SimplexPoint e2 = SimplexPoint::vertex(2, 1);
    std::vector<SimplexPoint> single{e1};
    CHECK(dist_to_hull(e1, single) == doctest::Approx(0.0));
    CHECK(dist_to_hull(e2, single) == doctest::Approx(std::sqrt(2.0)));

    std::vector<SimplexPoint> seg{e1, e2};
    CHECK(dist_to_hull(SimplexPoint(Eigen::Vector2d(0.5, 0.5)), seg) ==
          doctest::Approx(0.0).epsilon(1e-8));

    CHECK_THROWS_AS(dist_to_hull(e1, std::span<const SimplexPoint>{}),
                    std::invalid_argument);
}

TEST_CASE("dist_to_hull properties") {
    auto rng = testsup::make_rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 3);
        const int h = 1 + static_cast<int>(rng() % 5);
        std::vector<SimplexPoint> hull;
        for (int i = 0; i < h; ++i) hull.push_back(testsup::random_simplex_point(p, rng));

        // members of the hull are at distance zero
        const size_t pick = rng() % hull.size();
        CHECK(dist_to_hull(hull[pick], hull) <= 1e-8);

        // random convex combinations too
        Eigen::VectorXd w(h);
        for (int i = 0; i < h; ++i) w(i) = static_cast<double>(rng() % 1000 + 1);
        w /= w.sum();
        Eigen::VectorXd combo = Eigen::VectorXd::Zero(p);
        for (int i = 0; i < h; ++i) combo += w(i) * hull[static_cast<size_t>(i)].coords();
        CHECK(dist_to_hull(SimplexPoint(combo), hull) <= 1e-8);

        // nonnegative, and never increased by adding hull points
        const SimplexPoint t = testsup::random_simplex_point(p, rng);
        const double d1 = dist_to_hull(t, hull);
        CHECK(d1 >= 0.0);
        hull.push_back(testsup::random_simplex_point(p, rng));
        CHECK(dist_to_hull(t, hull) <= d1 + 1e-9);
    }
}

TEST_CASE("simplex point validation") {
    CHECK_THROWS_AS(SimplexPoint(Eigen::Vector2d(0.6, 0.6)), std::invalid_argument);
    CHECK_THROWS_AS(SimplexPoint(Eigen::Vector2d(1.5, -0.5)), std::invalid_argument);
    const SimplexPoint ok(Eigen::Vector2d(1.0 + 1e-12, -1e-12));
    CHECK(ok[1] == 0.0);
}

TEST_CASE("symmetric matrix construction") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 3, 4;
    CHECK_THROWS_AS(SymMatrix{bad}, std::invalid_argument);
    const SymMatrix fixed = SymMatrix::symmetrized(bad);
    CHECK(fixed(0, 1) == doctest::Approx(2.5));
}
