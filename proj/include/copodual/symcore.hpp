#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace copodual {

/// Components at or below this threshold do not count as support of a
/// simplex point. Shared across modules so support sets stay consistent.
inline constexpr double kSupportEps = 1e-12;

/// Dense real symmetric matrix. Symmetry is checked at construction and
/// the stored entries are made exactly symmetric (upper triangle wins).
class SymMatrix {
public:
    explicit SymMatrix(Eigen::MatrixXd m, double asym_tol = 1e-9);

    static SymMatrix zero(int p);
    static SymMatrix identity(int p);
    /// Builds (M + M^T)/2 without an asymmetry check.
    static SymMatrix symmetrized(const Eigen::MatrixXd& m);

    int dim() const { return static_cast<int>(mat_.rows()); }
    double operator()(int i, int j) const { return mat_(i, j); }
    const Eigen::MatrixXd& mat() const { return mat_; }
    double frob_norm() const { return mat_.norm(); }

    SymMatrix operator+(const SymMatrix& o) const;
    SymMatrix operator-(const SymMatrix& o) const;
    SymMatrix scaled(double a) const;

private:
    Eigen::MatrixXd mat_;
};

/// Point of the standard simplex: nonnegative components summing to one.
/// The constructor clamps round-off negatives (>= -1e-9) to zero and
/// renormalizes the sum; anything worse is rejected.
class SimplexPoint {
public:
    explicit SimplexPoint(Eigen::VectorXd t);

    static SimplexPoint vertex(int p, int k);
    static SimplexPoint barycenter(int p);

    int dim() const { return static_cast<int>(t_.size()); }
    double operator[](int k) const { return t_(k); }
    const Eigen::VectorXd& coords() const { return t_; }

private:
    Eigen::VectorXd t_;
};

/// All points of the simplex whose components are multiples of 1/k,
/// enumerated in deterministic lexicographic order (first component
/// descending). Contains every simplex vertex.
struct SimplexGrid {
    int p = 0;
    int k = 0;
    std::vector<SimplexPoint> points;

    /// Diameter of one grid cell, sqrt(2)/k.
    double cell_diameter() const;
};

/// trace(AB) for symmetric A, B; equals the entrywise product sum.
double trace_inner(const SymMatrix& a, const SymMatrix& b);

/// t^T D t.
double quad_form(const SymMatrix& d, const Eigen::VectorXd& t);

/// Enumerates the resolution-k grid on the p-simplex. Throws when the
/// point count binomial(k+p-1, p-1) would exceed max_points.
SimplexGrid simplex_grid(int p, int k, std::int64_t max_points = 2'000'000);

/// Number of grid points for given (p, k), i.e. binomial(k+p-1, p-1).
std::int64_t simplex_grid_size(int p, int k);

double max_eigenvalue(const SymMatrix& q);
double min_eigenvalue(const SymMatrix& q);

/// Euclidean distance from t to conv(hull_points). Closed form for one or
/// two hull points; otherwise minimizes ||t - sum_i b_i tau(i)||^2 over the
/// weight simplex with an away-step conditional-gradient scheme (duality
/// gap stop tight enough for 1e-9 accurate distances).
double dist_to_hull(const SimplexPoint& t, std::span<const SimplexPoint> hull_points);
double dist_to_hull(const Eigen::VectorXd& t, const std::vector<Eigen::VectorXd>& hull_points);

} // namespace copodual
