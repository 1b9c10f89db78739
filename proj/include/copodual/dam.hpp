#pragma once

#include "copodual/symcore.hpp"

#include <optional>
#include <vector>

namespace copodual {

/// Working set of the data-modification procedure: fresh indices with
/// weights (delta part) and previously accumulated indices carrying a
/// nonnegative vector multiplier each (base part).
struct DataSet {
    struct DeltaItem {
        SimplexPoint tau;
        double gamma;
    };
    struct BaseItem {
        SimplexPoint tau;
        Eigen::VectorXd lambda; ///< nonnegative p-vector
        double gamma;
    };
    std::vector<DeltaItem> delta_items;
    std::vector<BaseItem> base_items;

    void validate() const;
};

/// Indices k with tau_k above the shared support threshold, ascending.
std::vector<int> support(const SimplexPoint& tau);

struct SeparationResult {
    bool holds = true;
    int s0 = -1; ///< delta index of the first violating pair
    int i0 = -1; ///< base index of the first violating pair
};

/// Checks the support-separation condition: every base support must reach
/// outside every delta support. A violation yields the lexicographically
/// first pair (s0, i0) with supp(i0) contained in supp(s0).
SeparationResult separation_holds(const DataSet& data);

/// Ratio step for a violating pair: min over the support of tau_i0 of
/// tau_k(s0)/tau_k(i0). Strictly inside (0, 1) for valid upstream data;
/// values at or above 1 - 1e-12 signal corrupted state and throw.
double compute_theta(const SimplexPoint& tau_s0, const SimplexPoint& tau_i0);

/// Applies the four replacements to (s0, i0) and leaves all other entries
/// untouched. Preserves the bilinear functional of bilinear_sum for every
/// symmetric matrix.
DataSet dam_step(const DataSet& data, int s0, int i0);

struct DamResult {
    DataSet data;
    int steps = 0;
    /// Modified delta points whose distance to the base hull dipped below
    /// 1e-9 (flagged, not failed).
    int hull_warnings = 0;
};

/// Repeats separation tests and replacement steps until the separation
/// condition holds. max_steps <= 0 selects |delta| * |base| * 2^p.
DamResult run_dam(const DataSet& data, int max_steps = 0);

/// The conserved functional: sum of gamma-weighted quadratic terms over all
/// indices plus the lambda bilinear terms over the base part.
double bilinear_sum(const DataSet& data, const SymMatrix& a);

} // namespace copodual
