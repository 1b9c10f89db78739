#include "copodual/verify.hpp"

#include <cmath>

namespace copodual {

json DualityReport::to_json() const {
    json j;
    j["primal_value"] = primal_value;
    j["dual_value"] = dual_value;
    j["gap"] = gap;
    j["max_equality_residual"] = max_equality_residual;
    j["min_factor_entry"] = min_factor_entry;
    j["verdict"] = to_string(verdict);
    return j;
}

DualResiduals dual_feasible(const Program& prog, const ExtendedDualSolution& sol, double tol) {
    (void)tol;
    prog.validate();
    if (sol.p != prog.p) throw std::invalid_argument("dual_feasible: dimension mismatch");
    if (static_cast<int>(sol.v.size()) != sol.m0 || static_cast<int>(sol.l.size()) != sol.m0) {
        throw std::invalid_argument("dual_feasible: level factor count mismatch");
    }

    DualResiduals res;
    res.min_factor_entry = sol.min_factor_entry();

    for (int m = 1; m <= sol.m0; ++m) {
        const SymMatrix uw = SymMatrix::symmetrized(sol.um(m).mat() + sol.wm(m - 1));
        for (int j = 0; j <= prog.n; ++j) {
            const double r = trace_inner(uw, prog.a[static_cast<size_t>(j)]);
            res.max_equality_residual = std::max(res.max_equality_residual, std::abs(r));
        }
    }
    const SymMatrix uw_final = SymMatrix::symmetrized(sol.u().mat() + sol.wm(sol.m0));
    for (int j = 1; j <= prog.n; ++j) {
        const double r = trace_inner(uw_final, prog.a[static_cast<size_t>(j)]) - prog.c(j - 1);
        res.max_equality_residual = std::max(res.max_equality_residual, std::abs(r));
    }
    return res;
}

WeakDualityResult weak_duality_gap(const Program& prog, const Eigen::VectorXd& x,
                                   const ExtendedDualSolution& sol, const SimplexGrid& grid,
                                   double feas_tol) {
    const FeasibilityReport fr = feasibility_check(prog, x, grid, feas_tol);
    if (!fr.feasible) throw std::invalid_argument("weak_duality_gap: x is not feasible");
    const DualResiduals dr = dual_feasible(prog, sol);
    if (!dr.feasible(1e-6)) throw std::invalid_argument("weak_duality_gap: dual solution infeasible");

    const SymMatrix ax = constraint_matrix(prog, x);
    const SymMatrix uw = SymMatrix::symmetrized(sol.u().mat() + sol.wm(sol.m0));

    WeakDualityResult out;
    out.gap = prog.c.dot(x) + trace_inner(uw, prog.a[0]);

    // recompute c^T x through the factor decomposition as a consistency audit
    double s1 = 0.0;
    for (Eigen::Index i = 0; i < sol.final_v.cols(); ++i) {
        s1 += sol.final_v.col(i).dot(ax.mat() * sol.final_v.col(i));
    }
    double s2 = 0.0;
    if (sol.m0 >= 1) {
        const Eigen::MatrixXd& lm = sol.l.back();
        const Eigen::MatrixXd& vm = sol.v.back();
        for (Eigen::Index i = 0; i < lm.cols(); ++i) {
            s2 += lm.col(i).dot(ax.mat() * vm.col(i));
        }
    }
    const double via_factors = s1 + s2 - trace_inner(uw, prog.a[0]);
    out.decomposition_residual = std::abs(prog.c.dot(x) - via_factors);
    return out;
}

DualityReport strong_duality_report(const Program& prog, const Eigen::VectorXd& x0,
                                    const ExtendedDualSolution& sol) {
    DualityReport rep;
    rep.primal_value = prog.c.dot(x0);
    const SymMatrix uw = SymMatrix::symmetrized(sol.u().mat() + sol.wm(sol.m0));
    rep.dual_value = -trace_inner(uw, prog.a[0]);
    rep.gap = rep.primal_value - rep.dual_value;

    const DualResiduals dr = dual_feasible(prog, sol);
    rep.max_equality_residual = dr.max_equality_residual;
    rep.min_factor_entry = dr.min_factor_entry;

    if (!dr.feasible(1e-6)) {
        rep.verdict = DualityVerdict::infeasible_dual;
    } else if (std::abs(rep.gap) <= 1e-6 * (1.0 + std::abs(rep.primal_value))) {
        rep.verdict = DualityVerdict::strong_duality;
    } else {
        rep.verdict = DualityVerdict::weak_only;
    }
    return rep;
}

bool slater_probe(const Program& prog, const SimplexGrid& grid, const GenConfig& config) {
    IterationState empty_state;
    const RestrictionLp rp = restriction_problem(prog, empty_state, grid, config);
    const LpSolution sol = solve_lp(rp.lp);
    if (sol.status != LpStatus::optimal) return false;
    return sol.value < -config.mu_tol;
}

const char* to_string(DualityVerdict v) {
    switch (v) {
        case DualityVerdict::strong_duality: return "strong_duality";
        case DualityVerdict::weak_only: return "weak_only";
        case DualityVerdict::infeasible_dual: return "infeasible_dual";
    }
    return "unknown";
}

} // namespace copodual
