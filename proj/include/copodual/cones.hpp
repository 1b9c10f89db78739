#pragma once

#include "copodual/symcore.hpp"

#include <vector>

namespace copodual {

enum class CopStatus { copositive, not_copositive, inconclusive };

/// Outcome of a grid-based copositivity test. `min_value` is the best
/// minimum of t^T D t found over the simplex, attained at `witness`.
struct CopositivityVerdict {
    CopStatus status = CopStatus::inconclusive;
    double min_value = 0.0;
    SimplexPoint witness = SimplexPoint::vertex(1, 0);
};

/// Completely positive certificate: a p x k factor B with nonnegative
/// entries. The matrix it certifies is gram() = B B^T.
class CpFactor {
public:
    CpFactor(int p, int k, Eigen::MatrixXd b);

    int p() const { return static_cast<int>(b_.rows()); }
    int width() const { return static_cast<int>(b_.cols()); }
    const Eigen::MatrixXd& factor() const { return b_; }

private:
    Eigen::MatrixXd b_;
};

struct MinQuadOptions {
    int best_points = 5; ///< grid candidates kept per refinement round
    int threads = 1;
};

struct MinQuadResult {
    double value = 0.0;
    SimplexPoint argmin = SimplexPoint::vertex(1, 0);
    /// Best value after the initial sweep and after each refinement round.
    std::vector<double> round_values;
};

/// Minimizes t^T D t over the grid, then refines around the best few points:
/// each round re-grids a shrinking sub-simplex centered at every candidate
/// and polishes the active face exactly. Monotone in the round count.
MinQuadResult min_quad_over_simplex(const SymMatrix& d, const SimplexGrid& grid,
                                    int refine_rounds, const MinQuadOptions& opts = {});

/// Grid oracle for membership of D in the copositive cone. Verdict is
/// `copositive` only when the refinement has stabilized (last two rounds
/// within tol/10); otherwise `inconclusive` unless a violation was found.
CopositivityVerdict is_copositive(const SymMatrix& d, double tol = 1e-7,
                                  int grid_resolution = 16, int refine_rounds = 3,
                                  const MinQuadOptions& opts = {});

/// True iff the minimal eigenvalue of Q is >= -tol.
bool is_psd(const SymMatrix& q, double tol);

/// B B^T: symmetric, entrywise nonnegative, PSD by construction.
SymMatrix cp_gram(const CpFactor& f);

/// Gram of the stacked factor [V; L]: the 2p x 2p block
/// [[V V^T, V L^T], [L V^T, L L^T]], completely positive by construction.
/// Both factors must be entrywise nonnegative and of identical shape.
SymMatrix cp_block(const Eigen::MatrixXd& v, const Eigen::MatrixXd& l);

} // namespace copodual
