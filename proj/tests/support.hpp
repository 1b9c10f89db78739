#pragma once

#include "copodual/dam.hpp"
#include "copodual/lp.hpp"
#include "copodual/model.hpp"

#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace testsup {

using namespace copodual;

inline std::mt19937_64 make_rng(std::uint64_t salt = 0) {
    std::uint64_t seed = 0xC0F0DA1ULL;
    if (const char* env = std::getenv("COPODUAL_SEED")) {
        seed = std::strtoull(env, nullptr, 10);
    }
    return std::mt19937_64{seed ^ (salt * 0x9E3779B97F4A7C15ULL)};
}

inline std::string fixture(const std::string& name) {
    return std::string(COPODUAL_FIXTURE_DIR) + "/" + name;
}

inline SymMatrix random_symmetric(int p, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> unif(-scale, scale);
    Eigen::MatrixXd m(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) m(i, j) = unif(rng);
    }
    return SymMatrix::symmetrized(m);
}

inline SymMatrix random_psd(int p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd g(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) g(i, j) = unif(rng);
    }
    return SymMatrix::symmetrized(g * g.transpose());
}

inline SymMatrix random_nonneg_symmetric(int p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd m(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) m(i, j) = m(j, i) = unif(rng);
    }
    return SymMatrix::symmetrized(m);
}

inline SimplexPoint random_simplex_point(int p, std::mt19937_64& rng, int max_support = 0) {
    std::exponential_distribution<double> expo(1.0);
    std::uniform_int_distribution<int> supp_dist(1, p);
    const int nsupp = max_support > 0 ? std::min(max_support, p) : supp_dist(rng);
    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(p);
    double total = 0.0;
    for (int i = 0; i < nsupp; ++i) {
        const double e = expo(rng) + 1e-3;
        t(idx[static_cast<size_t>(i)]) = e;
        total += e;
    }
    t /= total;
    return SimplexPoint(t);
}

/// Valid DAM input: delta points kept a positive distance away from the
/// hull of the base points.
inline DataSet random_dataset(int p, int ndelta, int nbase, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> gdist(0.1, 2.0);
    std::uniform_real_distribution<double> ldist(0.0, 1.0);

    DataSet ds;
    for (int i = 0; i < nbase; ++i) {
        Eigen::VectorXd lambda(p);
        for (int k = 0; k < p; ++k) lambda(k) = ldist(rng);
        ds.base_items.push_back({random_simplex_point(p, rng), lambda, gdist(rng)});
    }
    std::vector<Eigen::VectorXd> hull;
    for (const auto& b : ds.base_items) hull.push_back(b.tau.coords());

    int made = 0;
    int guard = 0;
    while (made < ndelta && guard++ < 10000) {
        SimplexPoint tau = random_simplex_point(p, rng);
        if (!hull.empty() && dist_to_hull(tau.coords(), hull) < 0.05) continue;
        ds.delta_items.push_back({tau, gdist(rng)});
        ++made;
    }
    return ds;
}

/// Random program that is feasible (x_bar satisfies it through an entrywise
/// nonnegative constraint value) and bounded below (objective generated
/// from a completely positive combination of grid points). Optionally pins
/// diagonal zeros across all matrices so the chosen vertices are immobile.
inline Program random_bounded_program(int p, int n, std::mt19937_64& rng,
                                      const std::vector<int>& immobile_vertices = {}) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> wdist(0.2, 1.5);

    Program prog;
    prog.kind = ProgramKind::copositive;
    prog.p = p;
    prog.n = n;

    std::vector<Eigen::MatrixXd> amats;
    for (int j = 0; j <= n; ++j) {
        Eigen::MatrixXd m(p, p);
        for (int r = 0; r < p; ++r) {
            for (int c = 0; c < p; ++c) m(r, c) = unif(rng);
        }
        m = 0.5 * (m + m.transpose());
        amats.push_back(m);
    }

    // feasibility: A0 := N - sum x_bar_j A_j with N entrywise nonnegative
    Eigen::VectorXd xbar(n);
    for (int j = 0; j < n; ++j) xbar(j) = unif(rng);
    Eigen::MatrixXd nmat = random_nonneg_symmetric(p, rng).mat();
    amats[0] = nmat;
    for (int j = 1; j <= n; ++j) amats[0] -= xbar(j - 1) * amats[static_cast<size_t>(j)];

    // immobile vertices: zero the pinned diagonal entries in every matrix
    // (and their rows of N so feasibility survives)
    for (int v : immobile_vertices) {
        for (auto& m : amats) {
            m(v, v) = 0.0;
        }
    }

    for (auto& m : amats) prog.a.push_back(SymMatrix::symmetrized(m));

    // bounded objective: c_j = sum_i w_i tau_i^T A_j tau_i over a few
    // simplex points (the quadratic rows at those points floor c^T x)
    const int terms = 1 + static_cast<int>(rng() % 3);
    prog.c = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < terms; ++t) {
        const SimplexPoint tau = random_simplex_point(p, rng);
        const double w = wdist(rng);
        for (int j = 1; j <= n; ++j) {
            prog.c(j - 1) += w * quad_form(prog.a[static_cast<size_t>(j)], tau.coords());
        }
    }
    return prog;
}

/// Exhaustive vertex enumeration oracle for small LPs. Requires a bounded
/// feasible program; returns the optimal value.
inline std::optional<double> brute_force_lp(const LinearProgram& lp) {
    const int n = lp.num_vars;
    struct Cons {
        Eigen::VectorXd g;
        double b;
        bool eq;
    };
    std::vector<Cons> cons;
    for (const auto& r : lp.ineq) cons.push_back({r.coeffs, r.rhs, false});
    for (const auto& r : lp.eq) cons.push_back({r.coeffs, r.rhs, true});
    for (int v = 0; v < n; ++v) {
        if (std::isfinite(lp.lower(v))) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
            g(v) = 1.0;
            cons.push_back({g, lp.lower(v), false});
        }
        if (std::isfinite(lp.upper(v))) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
            g(v) = -1.0;
            cons.push_back({g, -lp.upper(v), false});
        }
    }
    const int m = static_cast<int>(cons.size());
    if (m < n) return std::nullopt;

    std::optional<double> best;
    std::vector<int> pick(static_cast<size_t>(n));
    // iterate over all n-subsets of the constraints
    std::vector<int> comb(static_cast<size_t>(n));
    std::iota(comb.begin(), comb.end(), 0);
    auto advance = [&]() -> bool {
        int i = n - 1;
        while (i >= 0 && comb[static_cast<size_t>(i)] == m - n + i) --i;
        if (i < 0) return false;
        ++comb[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
        return true;
    };
    do {
        Eigen::MatrixXd a(n, n);
        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) {
            a.row(i) = cons[static_cast<size_t>(comb[static_cast<size_t>(i)])].g.transpose();
            b(i) = cons[static_cast<size_t>(comb[static_cast<size_t>(i)])].b;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd y = lu.solve(b);
        bool feasible = true;
        for (const auto& c : cons) {
            const double v = c.g.dot(y);
            if (c.eq ? std::abs(v - c.b) > 1e-7 : v < c.b - 1e-7) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        const double val = lp.objective.dot(y);
        if (!best || val < *best) best = val;
    } while (advance());
    return best;
}

} // namespace testsup
