#pragma once

#include "copodual/jsonutil.hpp"
#include "copodual/model.hpp"

#include <random>
#include <vector>

namespace copodual {

/// Extended dual solution for a linear SDP, kept in factored form:
/// level matrices are U_m = V_m V_m^T, W_m = V_m L_m^T, D_m = L_m L_m^T
/// with factors of unrestricted sign.
struct EdSolution {
    struct Level {
        Eigen::MatrixXd v; ///< p x k(m)
        Eigen::MatrixXd l; ///< p x k(m)
    };
    int p = 0;
    int m0 = 0;
    std::vector<Level> levels;
    Eigen::MatrixXd u; ///< PSD, p x p

    SymMatrix um(int m) const;
    Eigen::MatrixXd wm(int m) const; ///< V_m L_m^T; wm(0) = 0
    SymMatrix dm(int m) const;

    json to_json() const;
    static EdSolution from_json(const json& j);
};

/// Ramana-style regularized dual data (identity lower-right blocks).
struct EdrSolution {
    struct Level {
        Eigen::MatrixXd u; ///< p x p
        Eigen::MatrixXd w; ///< p x p
    };
    int p = 0;
    int m0 = 0;
    std::vector<Level> levels;
    Eigen::MatrixXd u; ///< PSD
    Eigen::VectorXd rho; ///< scaling factors per level (1-based in rho(0..m0-1))

    json to_json() const;
    static EdrSolution from_json(const json& j);
};

struct SdpResiduals {
    double max_equality_residual = 0.0;
    double min_block_eig = 0.0; ///< worst Schur-complement / block eigenvalue
    double min_u_eig = 0.0;

    bool feasible(double eq_tol, double psd_tol) const {
        return max_equality_residual <= eq_tol && min_block_eig >= -psd_tol &&
               min_u_eig >= -psd_tol;
    }
};

/// Feasibility of an EdSolution for the SDP extended dual: equality rows
/// plus PSD of each assembled 2p x 2p block (automatic in factation form,
/// verified numerically anyway).
SdpResiduals ed_feasible(const Program& sdp, const EdSolution& ed, double tol = 1e-7);

/// Feasibility for the regularized form: equality rows, per-level Schur
/// complements U_m - W_m W_m^T, and U itself must be PSD.
SdpResiduals edr_feasible(const Program& sdp, const EdrSolution& edr, double tol = 1e-7);

/// Converts a feasible EdSolution into a feasible EdrSolution through the
/// backward scaling recursion; the dual objective is preserved exactly.
EdrSolution ed_to_edr(const Program& sdp, const EdSolution& ed);

/// Level matrices of the reverse embedding (identity lower-right blocks),
/// feasible for the unregularized form with the same objective.
struct EdMatrices {
    struct Level {
        SymMatrix u;
        Eigen::MatrixXd w;
        SymMatrix d;
    };
    std::vector<Level> levels;
    SymMatrix u;
};
EdMatrices edr_embed(const EdrSolution& edr);
SdpResiduals ed_matrices_feasible(const Program& sdp, const EdMatrices& em, double tol = 1e-7);

/// Verifies t^T Q t <= mu_max(Q) t^T t on random samples; a self-test of
/// the eigenvalue routine.
bool psd_bound_check(const SymMatrix& q, int sample_count, std::mt19937_64& rng);

/// Draws random level factors and a random PSD U, then reverse-engineers a
/// compatible SDP (projecting the constraint matrices onto the orthogonal
/// complement of the level equalities and defining c from the final row).
std::pair<Program, EdSolution> make_random_feasible_ed(int p, int n, int m0,
                                                       std::mt19937_64& rng);

} // namespace copodual
