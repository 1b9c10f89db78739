#pragma once

#include "copodual/dualgen.hpp"

namespace copodual {

enum class DualityVerdict { strong_duality, weak_only, infeasible_dual };

struct DualityReport {
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;
    double max_equality_residual = 0.0;
    double min_factor_entry = 0.0;
    DualityVerdict verdict = DualityVerdict::infeasible_dual;

    json to_json() const;
};

struct DualResiduals {
    double max_equality_residual = 0.0;
    double min_factor_entry = 0.0;

    bool feasible(double tol) const {
        return max_equality_residual <= tol && min_factor_entry >= -1e-12;
    }
};

/// Checks every equality of the extended dual against the program and
/// revalidates the nonnegative-factor certificates.
DualResiduals dual_feasible(const Program& prog, const ExtendedDualSolution& sol,
                            double tol = 1e-7);

struct WeakDualityResult {
    double gap = 0.0; ///< c^T x + (U + W_m0) . A0, nonnegative by weak duality
    /// Residual of recomputing c^T x from the stored factor decomposition.
    double decomposition_residual = 0.0;
};

/// Requires x feasible and sol dual feasible; throws otherwise.
WeakDualityResult weak_duality_gap(const Program& prog, const Eigen::VectorXd& x,
                                   const ExtendedDualSolution& sol, const SimplexGrid& grid,
                                   double feas_tol = 1e-7);

DualityReport strong_duality_report(const Program& prog, const Eigen::VectorXd& x0,
                                    const ExtendedDualSolution& sol);

/// True iff the unrestricted discretized problem admits a strictly
/// negative optimum, equivalently (up to discretization) the normalized
/// immobile index set is empty.
bool slater_probe(const Program& prog, const SimplexGrid& grid, const GenConfig& config = {});

const char* to_string(DualityVerdict v);

} // namespace copodual
