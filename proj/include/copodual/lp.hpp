#pragma once

#include <Eigen/Dense>

#include <vector>

namespace copodual {

struct LpRow {
    Eigen::VectorXd coeffs;
    double rhs = 0.0;
};

/// Dense LP:  min objective^T y  s.t.  ineq rows g^T y >= b, eq rows g^T y = b,
/// lower <= y <= upper (infinities allowed; variables default to free).
struct LinearProgram {
    int num_vars = 0;
    Eigen::VectorXd objective;
    std::vector<LpRow> ineq;
    std::vector<LpRow> eq;
    Eigen::VectorXd lower; ///< sized num_vars; -inf = unbounded below
    Eigen::VectorXd upper; ///< sized num_vars; +inf = unbounded above
    /// Boxed variables listed here start nonbasic at their upper bound,
    /// which can spare the artificial phase entirely.
    std::vector<int> start_at_upper;

    static LinearProgram make(int num_vars);
    void add_ineq(Eigen::VectorXd coeffs, double rhs);
    void add_eq(Eigen::VectorXd coeffs, double rhs);
    void set_box(int var, double lo, double hi);
};

enum class LpStatus { optimal, unbounded, infeasible };

enum class PivotRule { bland, dantzig };

struct LpOptions {
    double pivot_tol = 1e-10;
    PivotRule rule = PivotRule::bland;
    int max_iterations = 0; ///< 0 = automatic
};

/// Basic optimal solution with the associated basic dual multipliers.
/// Duals are recomputed from a fresh factorization of the optimal basis,
/// so KKT residuals do not accumulate tableau drift.
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Eigen::VectorXd y;
    double value = 0.0;
    Eigen::VectorXd ineq_duals;  ///< >= 0, one per inequality row
    Eigen::VectorXd eq_duals;    ///< one per equality row
    Eigen::VectorXd lower_duals; ///< >= 0, multiplier of y_j >= lo_j
    Eigen::VectorXd upper_duals; ///< >= 0, multiplier of y_j <= hi_j
    int iterations = 0;
};

/// Two-phase dense simplex with bounded variables and Bland's anti-cycling
/// rule (Dantzig selectable). Free variables are split internally; box
/// bounds are handled by bound shifting and the bounded ratio test, never
/// by extra rows, so the duals cover exactly the semantic constraints.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts = {});

/// Indices of inequality rows with multiplier > tol. At a basic optimum the
/// count never exceeds num_vars.
std::vector<int> active_support(const LpSolution& sol, double tol = 1e-9);

} // namespace copodual
