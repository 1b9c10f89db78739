#include "copodual/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace copodual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ColKind { structural, surplus, artificial };
enum class ColStatus { at_lower, at_upper, basic };

struct Column {
    ColKind kind;
    int var = -1;       // structural: original variable index
    double sign = 1.0;  // structural: y = shift + sign * z
    double shift = 0.0;
    double upper = kInf; // bound of the internal variable z (lower is 0)
    int row = -1;        // surplus/artificial: owning row
};

struct Tableau {
    Eigen::MatrixXd a;   // original standard form (rows flipped so b >= 0)
    Eigen::VectorXd b;
    Eigen::MatrixXd t;   // current B^-1 A
    Eigen::VectorXd xb;  // basic variable values
    Eigen::VectorXd r;   // reduced costs for the active phase
    Eigen::VectorXd cost;
    std::vector<Column> cols;
    std::vector<int> basis;        // column basic in each row
    std::vector<ColStatus> status; // per column
    std::vector<double> row_sign;  // +1 kept, -1 flipped
    int num_ineq = 0;
    int iterations = 0;
};

double col_value(const Tableau& tb, int j) {
    if (tb.status[static_cast<size_t>(j)] == ColStatus::at_upper) {
        return tb.cols[static_cast<size_t>(j)].upper;
    }
    return 0.0;
}

void full_reduced_costs(Tableau& tb) {
    Eigen::VectorXd cb(tb.basis.size());
    for (size_t i = 0; i < tb.basis.size(); ++i) cb(static_cast<Eigen::Index>(i)) = tb.cost(tb.basis[i]);
    tb.r = tb.cost - tb.t.transpose() * cb;
}

void pivot(Tableau& tb, int lr, int e) {
    const double piv = tb.t(lr, e);
    tb.t.row(lr) /= piv;
    for (Eigen::Index i = 0; i < tb.t.rows(); ++i) {
        if (i == lr) continue;
        const double f = tb.t(i, e);
        if (f != 0.0) tb.t.row(i) -= f * tb.t.row(lr);
    }
    const double fr = tb.r(e);
    if (fr != 0.0) tb.r -= fr * tb.t.row(lr).transpose();
    tb.basis[static_cast<size_t>(lr)] = e;
    tb.status[static_cast<size_t>(e)] = ColStatus::basic;
}

struct RatioHit {
    double t = kInf;
    int row = -1;           // -1: entering variable's own bound flip
    bool leaves_at_upper = false;
};

/// One simplex phase over the current tableau. `enterable` filters columns.
LpStatus run_phase(Tableau& tb, const LpOptions& opts, int max_iters,
                   const std::vector<bool>& enterable) {
    const double tol = opts.pivot_tol;
    const Eigen::Index ncols = tb.t.cols();
    int since_refresh = 0;

    while (true) {
        if (tb.iterations++ > max_iters) {
            throw std::runtime_error("solve_lp: iteration limit exceeded");
        }
        if (++since_refresh >= 64) {
            full_reduced_costs(tb);
            since_refresh = 0;
        }

        // entering column
        int e = -1;
        double best_score = tol;
        for (Eigen::Index j = 0; j < ncols; ++j) {
            if (!enterable[static_cast<size_t>(j)]) continue;
            const ColStatus st = tb.status[static_cast<size_t>(j)];
            double score = 0.0;
            if (st == ColStatus::at_lower) {
                score = -tb.r(j);
            } else if (st == ColStatus::at_upper) {
                score = tb.r(j);
            } else {
                continue;
            }
            if (score <= tol) continue;
            if (opts.rule == PivotRule::bland) {
                e = static_cast<int>(j);
                break;
            }
            if (score > best_score) {
                best_score = score;
                e = static_cast<int>(j);
            }
        }
        if (e < 0) return LpStatus::optimal;

        const double sigma = tb.status[static_cast<size_t>(e)] == ColStatus::at_lower ? 1.0 : -1.0;
        const Eigen::VectorXd d = tb.t.col(e);

        RatioHit hit;
        hit.t = tb.cols[static_cast<size_t>(e)].upper; // bound flip distance
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            const double delta = sigma * d(i);
            double ratio;
            bool upper_exit;
            if (delta > tol) {
                ratio = tb.xb(i) / delta;
                upper_exit = false;
            } else if (delta < -tol) {
                const double ub = tb.cols[static_cast<size_t>(tb.basis[static_cast<size_t>(i)])].upper;
                if (ub == kInf) continue;
                ratio = (ub - tb.xb(i)) / (-delta);
                upper_exit = true;
            } else {
                continue;
            }
            if (ratio < 0.0) ratio = 0.0;
            const bool tie = std::abs(ratio - hit.t) <= 1e-11;
            if ((!tie && ratio < hit.t) ||
                (tie && hit.row >= 0 &&
                 tb.basis[static_cast<size_t>(i)] < tb.basis[static_cast<size_t>(hit.row)])) {
                hit.t = ratio;
                hit.row = static_cast<int>(i);
                hit.leaves_at_upper = upper_exit;
            }
        }

        if (hit.t == kInf) return LpStatus::unbounded;

        if (hit.row < 0) {
            // entering variable runs to its other bound
            tb.xb -= sigma * hit.t * d;
            tb.status[static_cast<size_t>(e)] =
                sigma > 0.0 ? ColStatus::at_upper : ColStatus::at_lower;
            continue;
        }

        const int lv = tb.basis[static_cast<size_t>(hit.row)];
        const double enter_val = col_value(tb, e) + sigma * hit.t;
        tb.xb -= sigma * hit.t * d;
        tb.xb(hit.row) = enter_val;
        tb.status[static_cast<size_t>(lv)] =
            hit.leaves_at_upper ? ColStatus::at_upper : ColStatus::at_lower;
        pivot(tb, hit.row, e);
    }
}

} // namespace

LinearProgram LinearProgram::make(int num_vars) {
    LinearProgram lp;
    lp.num_vars = num_vars;
    lp.objective = Eigen::VectorXd::Zero(num_vars);
    lp.lower = Eigen::VectorXd::Constant(num_vars, -kInf);
    lp.upper = Eigen::VectorXd::Constant(num_vars, kInf);
    return lp;
}

void LinearProgram::add_ineq(Eigen::VectorXd coeffs, double rhs) {
    if (coeffs.size() != num_vars) throw std::invalid_argument("add_ineq: row length mismatch");
    ineq.push_back({std::move(coeffs), rhs});
}

void LinearProgram::add_eq(Eigen::VectorXd coeffs, double rhs) {
    if (coeffs.size() != num_vars) throw std::invalid_argument("add_eq: row length mismatch");
    eq.push_back({std::move(coeffs), rhs});
}

void LinearProgram::set_box(int var, double lo, double hi) {
    if (var < 0 || var >= num_vars) throw std::invalid_argument("set_box: bad variable index");
    if (lo > hi) throw std::invalid_argument("set_box: empty box");
    lower(var) = lo;
    upper(var) = hi;
}

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts) {
    if (lp.num_vars < 0 || lp.objective.size() != lp.num_vars ||
        lp.lower.size() != lp.num_vars || lp.upper.size() != lp.num_vars) {
        throw std::invalid_argument("solve_lp: malformed program");
    }
    for (const auto& row : lp.ineq) {
        if (row.coeffs.size() != lp.num_vars) throw std::invalid_argument("solve_lp: bad row length");
    }
    for (const auto& row : lp.eq) {
        if (row.coeffs.size() != lp.num_vars) throw std::invalid_argument("solve_lp: bad row length");
    }

    const int mi = static_cast<int>(lp.ineq.size());
    const int me = static_cast<int>(lp.eq.size());
    const int m = mi + me;

    LpSolution sol;
    sol.ineq_duals = Eigen::VectorXd::Zero(mi);
    sol.eq_duals = Eigen::VectorXd::Zero(me);
    sol.lower_duals = Eigen::VectorXd::Zero(lp.num_vars);
    sol.upper_duals = Eigen::VectorXd::Zero(lp.num_vars);
    sol.y = Eigen::VectorXd::Zero(lp.num_vars);

    if (m == 0 && lp.num_vars == 0) {
        sol.status = LpStatus::optimal;
        return sol;
    }

    // columns: structural (shifted / flipped / split), then surplus per ineq row
    std::vector<Column> cols;
    for (int v = 0; v < lp.num_vars; ++v) {
        const double lo = lp.lower(v);
        const double hi = lp.upper(v);
        if (lo > -kInf) {
            cols.push_back({ColKind::structural, v, 1.0, lo, hi - lo, -1});
        } else if (hi < kInf) {
            cols.push_back({ColKind::structural, v, -1.0, hi, kInf, -1});
        } else {
            cols.push_back({ColKind::structural, v, 1.0, 0.0, kInf, -1});
            cols.push_back({ColKind::structural, v, -1.0, 0.0, kInf, -1});
        }
    }
    const int n_struct = static_cast<int>(cols.size());
    for (int i = 0; i < mi; ++i) {
        cols.push_back({ColKind::surplus, -1, 1.0, 0.0, kInf, i});
    }

    Tableau tb;
    tb.cols = cols;
    tb.num_ineq = mi;
    tb.row_sign.assign(static_cast<size_t>(m), 1.0);
    tb.a = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(cols.size()));
    tb.b = Eigen::VectorXd::Zero(m);

    auto fill_row = [&](int r, const LpRow& row, bool is_ineq, int surplus_col) {
        double rhs = row.rhs;
        for (int j = 0; j < n_struct; ++j) {
            const Column& c = tb.cols[static_cast<size_t>(j)];
            tb.a(r, j) = c.sign * row.coeffs(c.var);
            rhs -= row.coeffs(c.var) * c.shift;
        }
        if (is_ineq) tb.a(r, surplus_col) = -1.0;
        if (rhs < 0.0) {
            tb.a.row(r) *= -1.0;
            rhs = -rhs;
            tb.row_sign[static_cast<size_t>(r)] = -1.0;
        }
        tb.b(r) = rhs;
    };
    for (int i = 0; i < mi; ++i) fill_row(i, lp.ineq[static_cast<size_t>(i)], true, n_struct + i);
    for (int i = 0; i < me; ++i) fill_row(mi + i, lp.eq[static_cast<size_t>(i)], false, -1);

    // initial nonbasic statuses; requested columns start at their upper bound
    tb.basis.assign(static_cast<size_t>(m), -1);
    tb.status.assign(cols.size(), ColStatus::at_lower);
    for (int v : lp.start_at_upper) {
        for (int j = 0; j < n_struct; ++j) {
            const Column& c = tb.cols[static_cast<size_t>(j)];
            if (c.var == v && c.sign > 0.0 && c.upper < kInf) {
                tb.status[static_cast<size_t>(j)] = ColStatus::at_upper;
            }
        }
    }
    Eigen::VectorXd rhs_init = tb.b;
    for (int j = 0; j < n_struct; ++j) {
        if (tb.status[static_cast<size_t>(j)] == ColStatus::at_upper) {
            rhs_init -= tb.a.col(j) * tb.cols[static_cast<size_t>(j)].upper;
        }
    }

    // basis: surplus where it comes out nonnegative, artificials elsewhere
    std::vector<int> artificial_rows;
    for (int i = 0; i < m; ++i) {
        if (i < mi) {
            const int sc = n_struct + i;
            const double cand = tb.a(i, sc) > 0.0 ? rhs_init(i) : -rhs_init(i);
            if (cand >= 0.0) {
                tb.basis[static_cast<size_t>(i)] = sc;
                continue;
            }
        }
        artificial_rows.push_back(i);
    }
    for (int r : artificial_rows) {
        Column art{ColKind::artificial, -1, 1.0, 0.0, kInf, r};
        tb.cols.push_back(art);
        const int j = static_cast<int>(tb.cols.size()) - 1;
        tb.a.conservativeResize(Eigen::NoChange, tb.a.cols() + 1);
        tb.a.col(tb.a.cols() - 1) = Eigen::VectorXd::Zero(m);
        tb.a(r, tb.a.cols() - 1) = rhs_init(r) >= 0.0 ? 1.0 : -1.0;
        tb.basis[static_cast<size_t>(r)] = j;
        tb.status.push_back(ColStatus::at_lower);
    }

    // initial tableau relative to the (diagonal) starting basis
    tb.t = tb.a;
    tb.xb = rhs_init;
    for (int i = 0; i < m; ++i) {
        const int bc = tb.basis[static_cast<size_t>(i)];
        tb.status[static_cast<size_t>(bc)] = ColStatus::basic;
        if (tb.a(i, bc) < 0.0) {
            tb.t.row(i) *= -1.0;
            tb.xb(i) = -rhs_init(i);
        }
    }

    const int ncols_total = static_cast<int>(tb.cols.size());
    const int max_iters = opts.max_iterations > 0
                              ? opts.max_iterations
                              : 50000 + 100 * (m + ncols_total);

    // phase 1: minimize the artificial total
    if (!artificial_rows.empty()) {
        tb.cost = Eigen::VectorXd::Zero(ncols_total);
        for (int j = 0; j < ncols_total; ++j) {
            if (tb.cols[static_cast<size_t>(j)].kind == ColKind::artificial) tb.cost(j) = 1.0;
        }
        full_reduced_costs(tb);
        std::vector<bool> enterable(static_cast<size_t>(ncols_total), true);
        const LpStatus st = run_phase(tb, opts, max_iters, enterable);
        if (st != LpStatus::optimal) throw std::runtime_error("solve_lp: phase 1 failure");
        double art_total = 0.0;
        for (int i = 0; i < m; ++i) {
            if (tb.cols[static_cast<size_t>(tb.basis[static_cast<size_t>(i)])].kind ==
                ColKind::artificial) {
                art_total += tb.xb(i);
            }
        }
        if (art_total > 1e-8 * std::max(1.0, tb.b.cwiseAbs().maxCoeff())) {
            sol.status = LpStatus::infeasible;
            sol.iterations = tb.iterations;
            return sol;
        }
        // drive basic artificials out where a pivot exists
        for (int i = 0; i < m; ++i) {
            const int bc = tb.basis[static_cast<size_t>(i)];
            if (tb.cols[static_cast<size_t>(bc)].kind != ColKind::artificial) continue;
            for (int j = 0; j < ncols_total; ++j) {
                if (tb.cols[static_cast<size_t>(j)].kind == ColKind::artificial) continue;
                if (tb.status[static_cast<size_t>(j)] == ColStatus::basic) continue;
                if (std::abs(tb.t(i, j)) > 1e-7) {
                    tb.status[static_cast<size_t>(bc)] = ColStatus::at_lower;
                    tb.xb(i) = col_value(tb, j);
                    pivot(tb, i, j);
                    break;
                }
            }
        }
    }

    // phase 2
    tb.cost = Eigen::VectorXd::Zero(ncols_total);
    for (int j = 0; j < n_struct; ++j) {
        const Column& c = tb.cols[static_cast<size_t>(j)];
        tb.cost(j) = c.sign * lp.objective(c.var);
    }
    std::vector<bool> enterable(static_cast<size_t>(ncols_total), true);
    for (int j = 0; j < ncols_total; ++j) {
        if (tb.cols[static_cast<size_t>(j)].kind == ColKind::artificial) {
            enterable[static_cast<size_t>(j)] = false;
            tb.cols[static_cast<size_t>(j)].upper = 0.0; // pins leftover basics at zero
        }
    }
    full_reduced_costs(tb);
    const LpStatus st = run_phase(tb, opts, max_iters, enterable);
    sol.iterations = tb.iterations;
    if (st == LpStatus::unbounded) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    // refactorize the optimal basis for clean primal values and duals
    Eigen::MatrixXd bmat(m, m);
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) {
        bmat.col(i) = tb.a.col(tb.basis[static_cast<size_t>(i)]);
        cb(i) = tb.cost(tb.basis[static_cast<size_t>(i)]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> blu(bmat);
    const Eigen::VectorXd pi = blu.transpose().solve(cb);

    Eigen::VectorXd rhs_eff = tb.b;
    for (int j = 0; j < ncols_total; ++j) {
        if (tb.status[static_cast<size_t>(j)] == ColStatus::at_upper) {
            rhs_eff -= tb.a.col(j) * tb.cols[static_cast<size_t>(j)].upper;
        }
    }
    const Eigen::VectorXd xb_exact = blu.solve(rhs_eff);

    Eigen::VectorXd zvals = Eigen::VectorXd::Zero(ncols_total);
    for (int j = 0; j < ncols_total; ++j) zvals(j) = col_value(tb, j);
    for (int i = 0; i < m; ++i) zvals(tb.basis[static_cast<size_t>(i)]) = xb_exact(i);

    for (int j = 0; j < n_struct; ++j) {
        const Column& c = tb.cols[static_cast<size_t>(j)];
        if (c.sign > 0.0 && c.shift == 0.0 && j + 1 < n_struct &&
            tb.cols[static_cast<size_t>(j + 1)].var == c.var) {
            continue; // handled when the minus column of the split pair is reached
        }
        if (c.sign < 0.0 && c.shift == 0.0 && j > 0 &&
            tb.cols[static_cast<size_t>(j - 1)].var == c.var &&
            tb.cols[static_cast<size_t>(j - 1)].sign > 0.0) {
            sol.y(c.var) = zvals(j - 1) - zvals(j);
        } else {
            sol.y(c.var) = c.shift + c.sign * zvals(j);
        }
    }
    sol.value = lp.objective.dot(sol.y);

    for (int i = 0; i < m; ++i) {
        const double d = tb.row_sign[static_cast<size_t>(i)] * pi(i);
        if (i < mi) {
            sol.ineq_duals(i) = std::max(0.0, d);
        } else {
            sol.eq_duals(i - mi) = d;
        }
    }

    // bound multipliers from fresh reduced costs
    for (int j = 0; j < n_struct; ++j) {
        const Column& c = tb.cols[static_cast<size_t>(j)];
        if (tb.status[static_cast<size_t>(j)] == ColStatus::basic) continue;
        const double rj = tb.cost(j) - pi.dot(tb.a.col(j));
        if (tb.status[static_cast<size_t>(j)] == ColStatus::at_lower) {
            if (c.sign > 0.0 && lp.lower(c.var) > -kInf) {
                sol.lower_duals(c.var) = std::max(0.0, rj);
            } else if (c.sign < 0.0 && c.shift != 0.0) {
                sol.upper_duals(c.var) = std::max(0.0, rj);
            }
        } else { // at_upper: only shifted boxed columns have finite uppers
            if (c.sign > 0.0 && lp.upper(c.var) < kInf) {
                sol.upper_duals(c.var) = std::max(0.0, -rj);
            }
        }
    }

    sol.status = LpStatus::optimal;
    return sol;
}

std::vector<int> active_support(const LpSolution& sol, double tol) {
    if (sol.status != LpStatus::optimal) {
        throw std::logic_error("active_support: solution not optimal");
    }
    std::vector<int> idx;
    for (Eigen::Index i = 0; i < sol.ineq_duals.size(); ++i) {
        if (sol.ineq_duals(i) > tol) idx.push_back(static_cast<int>(i));
    }
    return idx;
}

} // namespace copodual
