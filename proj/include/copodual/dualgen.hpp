#pragma once

#include "copodual/dam.hpp"
#include "copodual/jsonutil.hpp"
#include "copodual/lp.hpp"
#include "copodual/model.hpp"

#include <vector>

namespace copodual {

/// Knobs of the dual construction. Epsilon values of 0 select the
/// documented defaults (4 grid cell diameters; 2^p - 1 level cap).
struct GenConfig {
    int grid_resolution = 16;
    int refine_rounds = 3;
    double mu_tol = 1e-7;      ///< threshold deciding "mu* < 0"
    double immobile_tol = 1e-6;
    double support_tol = 1e-9; ///< multiplier threshold for index extraction
    double eps_init = 0.0;     ///< 0 = 4 * grid cell diameter
    double eps_shrink = 0.5;
    int max_eps_retries = 6;
    double box_radius = 1e3; ///< feasible-region box for immobility probes
    double mu_box = 1e6;     ///< box on the auxiliary objective variable
    int max_levels = 0;      ///< 0 = 2^p - 1
    int threads = 1;

    double effective_eps_init(const SimplexGrid& grid) const;
    int effective_max_levels(int p) const;
};

/// State carried between iterations of the construction.
struct IterationState {
    struct Entry {
        SimplexPoint tau;
        double gamma;
        int level; ///< iteration that produced the index
    };
    int m = 0;                                 ///< iteration about to run
    std::vector<Entry> indices;                ///< current index set I_m
    int prev_count = 0;                        ///< |I_{m-1}|
    std::vector<Eigen::VectorXd> lambda_prev;  ///< accumulated multipliers on I_{m-1}
    std::vector<double> betas;                 ///< sqrt of gamma frozen when V_m was formed
    std::vector<Eigen::MatrixXd> v_levels;     ///< V_1 .. V_m
    std::vector<Eigen::MatrixXd> l_levels;     ///< L_1 .. L_{m-1}
    double epsilon = 0.0;                      ///< restriction radius of the last solve
    std::vector<std::vector<int>> level_reps;  ///< representative supports per level
};

/// Factorized solution of the extended dual: per level m a nonnegative pair
/// (V_m, L_m) realizing U_m = V_m V_m^T, W_m = L_m V_m^T, D_m = L_m L_m^T,
/// plus the final factor for U. W_0 is identically zero.
struct ExtendedDualSolution {
    int p = 0;
    int m0 = 0;
    std::vector<Eigen::MatrixXd> v; ///< V_1..V_m0, p x k(m)
    std::vector<Eigen::MatrixXd> l; ///< L_1..L_m0, p x k(m)
    Eigen::MatrixXd final_v;        ///< factor of U (may have zero columns)

    SymMatrix um(int m) const;       ///< V_m V_m^T, 1-based
    Eigen::MatrixXd wm(int m) const; ///< L_m V_m^T; wm(0) is the zero matrix
    SymMatrix dm(int m) const;       ///< L_m L_m^T
    SymMatrix u() const;             ///< final_v final_v^T
    double min_factor_entry() const;

    json to_json() const;
    static ExtendedDualSolution from_json(const json& j);
};

/// Discretized semi-infinite restriction problem at the state's level:
/// componentwise rows A(x) tau(i) >= 0 first, then one row per grid point
/// at distance >= epsilon from the hull of the current indices.
struct RestrictionLp {
    LinearProgram lp;
    std::vector<int> grid_rows; ///< grid point index per kept grid row
    int index_row_count = 0;    ///< componentwise rows precede grid rows
};

/// Thrown when the epsilon exclusion removes every grid point.
struct GridRestrictedEmpty : std::runtime_error {
    GridRestrictedEmpty() : std::runtime_error("restriction grid empty: epsilon too large") {}
};

/// Thrown when verification failures exhaust the epsilon schedule.
struct EpsilonScheduleExhausted : std::runtime_error {
    EpsilonScheduleExhausted()
        : std::runtime_error("epsilon schedule exhausted without a verified level") {}
};

RestrictionLp restriction_problem(const Program& prog, const IterationState& state,
                                  const SimplexGrid& grid, const GenConfig& config);

enum class IterateKind { continued, slater_detected, infeasible };

struct IterateResult {
    IterateKind kind = IterateKind::continued;
    Eigen::VectorXd slater_x;
    double slater_mu = 0.0;
};

/// One iteration: solve the restriction problem, stop on a strictly
/// negative optimum, otherwise extract multipliers, verify the new indices
/// immobile, run the data modification, and extend the level factors.
IterateResult iterate(const Program& prog, IterationState& state, const SimplexGrid& grid,
                      const GenConfig& config, json* level_trace = nullptr);

/// Certifies that tau is immobile by maximizing its quadratic form over a
/// discretized superset of the feasible region (box-bounded).
bool verify_immobile(const Program& prog, const SimplexPoint& tau, const SimplexGrid& grid,
                     const GenConfig& config);

struct FinalResult {
    LpStatus status = LpStatus::optimal;
    Eigen::VectorXd x0;
    double primal_value = 0.0;
    ExtendedDualSolution sol;
    double max_complementarity = 0.0; ///< residues of the final pairing
};

FinalResult final_step(const Program& prog, const IterationState& state, int m0,
                       const SimplexGrid& grid, const GenConfig& config);

enum class BuildStatus {
    ok,
    infeasible,
    unbounded,
    iteration_cap,
    eps_exhausted,
    support_repetition,
    gap_fail,
};

struct BuildResult {
    BuildStatus status = BuildStatus::ok;
    int m0 = 0;
    Eigen::VectorXd x0;
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;
    double x0_refined_min = 0.0; ///< feasibility of x0 on a doubled grid
    ExtendedDualSolution sol;
    json trace = json::array();
};

/// Drives iterations until the restricted problem admits a strictly
/// negative optimum, then assembles the extended dual solution from the
/// final multipliers. Termination is guarded by the distinct-support
/// argument (representative supports must never repeat, level count
/// capped at 2^p - 1).
BuildResult build_dual(const Program& prog, const GenConfig& config = {});

const char* to_string(BuildStatus s);

} // namespace copodual
