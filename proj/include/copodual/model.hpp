#pragma once

#include "copodual/cones.hpp"
#include "copodual/symcore.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace copodual {

enum class ProgramKind { copositive, sdp };

/// Data of a linear conic program  min c^T x  s.t.  A0 + sum_i x_i A_i in K,
/// where K is the copositive cone or the PSD cone depending on `kind`.
struct Program {
    ProgramKind kind = ProgramKind::copositive;
    int p = 0;
    int n = 0;
    std::vector<SymMatrix> a; ///< A_0, A_1, ..., A_n (n+1 matrices)
    Eigen::VectorXd c;        ///< length n

    void validate() const;
};

struct FeasibilityReport {
    bool feasible = false;
    double min_value = 0.0;
    SimplexPoint witness = SimplexPoint::vertex(1, 0);
};

/// A0 + sum_i x_i A_i.
SymMatrix constraint_matrix(const Program& prog, const Eigen::VectorXd& x);

/// Minimizes t^T A(x) t over the grid (with refinement); feasible iff the
/// minimum is >= -tol.
FeasibilityReport feasibility_check(const Program& prog, const Eigen::VectorXd& x,
                                    const SimplexGrid& grid, double tol,
                                    int refine_rounds = 3);

/// Reads a program file (JSON; see README for the schema). Matrices that
/// are asymmetric beyond 1e-6 are rejected; smaller asymmetry is averaged
/// away with a warning on stderr when it exceeds 1e-9.
Program load_program(const std::filesystem::path& path);

/// Inverse of load_program up to floating-point formatting.
void save_program(const Program& prog, const std::filesystem::path& path);

/// Single-matrix fixture files ({"kind":"matrix","p":...,"entries":[[...]]}).
SymMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const SymMatrix& m, const std::filesystem::path& path);

} // namespace copodual
