#include "copodual/symcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace copodual {

SymMatrix::SymMatrix(Eigen::MatrixXd m, double asym_tol) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        throw std::invalid_argument("SymMatrix: square matrix with p >= 1 required");
    }
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (asym > asym_tol * scale) {
        throw std::invalid_argument("SymMatrix: input not symmetric");
    }
    mat_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(int p) { return SymMatrix(Eigen::MatrixXd::Zero(p, p)); }

SymMatrix SymMatrix::identity(int p) { return SymMatrix(Eigen::MatrixXd::Identity(p, p)); }

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        throw std::invalid_argument("SymMatrix: square matrix with p >= 1 required");
    }
    return SymMatrix(0.5 * (m + m.transpose()),
                     std::numeric_limits<double>::infinity());
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
    if (dim() != o.dim()) throw std::invalid_argument("SymMatrix: dimension mismatch");
    return SymMatrix(mat_ + o.mat_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
    if (dim() != o.dim()) throw std::invalid_argument("SymMatrix: dimension mismatch");
    return SymMatrix(mat_ - o.mat_);
}

SymMatrix SymMatrix::scaled(double a) const { return SymMatrix(a * mat_); }

SimplexPoint::SimplexPoint(Eigen::VectorXd t) : t_(std::move(t)) {
    if (t_.size() < 1) throw std::invalid_argument("SimplexPoint: empty vector");
    for (Eigen::Index k = 0; k < t_.size(); ++k) {
        if (t_(k) < 0.0) {
            if (t_(k) < -1e-9) throw std::invalid_argument("SimplexPoint: negative component");
            t_(k) = 0.0;
        }
    }
    const double s = t_.sum();
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("SimplexPoint: components must sum to 1");
    t_ /= s;
}

SimplexPoint SimplexPoint::vertex(int p, int k) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(p);
    t(k) = 1.0;
    return SimplexPoint(t);
}

SimplexPoint SimplexPoint::barycenter(int p) {
    return SimplexPoint(Eigen::VectorXd::Constant(p, 1.0 / p));
}

double SimplexGrid::cell_diameter() const { return std::sqrt(2.0) / k; }

double trace_inner(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("trace_inner: dimension mismatch");
    return a.mat().cwiseProduct(b.mat()).sum();
}

double quad_form(const SymMatrix& d, const Eigen::VectorXd& t) {
    if (d.dim() != t.size()) throw std::invalid_argument("quad_form: dimension mismatch");
    return t.dot(d.mat() * t);
}

std::int64_t simplex_grid_size(int p, int k) {
    // binomial(k+p-1, p-1), saturating at int64 max
    std::int64_t r = 1;
    for (int i = 1; i <= p - 1; ++i) {
        r = r * (k + i) / i; // exact: product of i consecutive integers divisible by i!
        if (r < 0) return std::numeric_limits<std::int64_t>::max();
    }
    return r;
}

namespace {

void enumerate_compositions(int p, int k, int pos, int remaining,
                            Eigen::VectorXd& work, std::vector<SimplexPoint>& out) {
    if (pos == p - 1) {
        work(pos) = static_cast<double>(remaining) / k;
        out.emplace_back(work);
        return;
    }
    for (int c = remaining; c >= 0; --c) {
        work(pos) = static_cast<double>(c) / k;
        enumerate_compositions(p, k, pos + 1, remaining - c, work, out);
    }
}

} // namespace

SimplexGrid simplex_grid(int p, int k, std::int64_t max_points) {
    if (p < 1 || k < 1) throw std::invalid_argument("simplex_grid: p >= 1 and k >= 1 required");
    if (simplex_grid_size(p, k) > max_points) {
        throw std::invalid_argument("simplex_grid: grid too fine (point count over cap)");
    }
    SimplexGrid g;
    g.p = p;
    g.k = k;
    g.points.reserve(static_cast<size_t>(simplex_grid_size(p, k)));
    Eigen::VectorXd work(p);
    enumerate_compositions(p, k, 0, k, work, g.points);
    return g;
}

double max_eigenvalue(const SymMatrix& q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.mat(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double min_eigenvalue(const SymMatrix& q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.mat(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

namespace {

double dist_point_segment(const Eigen::VectorXd& t, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b) {
    const Eigen::VectorXd ab = b - a;
    const double den = ab.squaredNorm();
    if (den <= 1e-30) return (t - a).norm();
    const double alpha = std::clamp((t - a).dot(ab) / den, 0.0, 1.0);
    return (t - (a + alpha * ab)).norm();
}

} // namespace

double dist_to_hull(const Eigen::VectorXd& t, const std::vector<Eigen::VectorXd>& hull) {
    if (hull.empty()) throw std::invalid_argument("dist_to_hull: empty hull");
    const auto h = hull.size();
    for (const auto& v : hull) {
        if (v.size() != t.size()) throw std::invalid_argument("dist_to_hull: dimension mismatch");
    }
    if (h == 1) return (t - hull[0]).norm();
    if (h == 2) return dist_point_segment(t, hull[0], hull[1]);

    // Away-step Frank-Wolfe on f(b) = 0.5 ||t - M b||^2 over the weight simplex.
    Eigen::MatrixXd m(t.size(), static_cast<Eigen::Index>(h));
    for (size_t i = 0; i < h; ++i) m.col(static_cast<Eigen::Index>(i)) = hull[i];

    // start at the nearest single hull point
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h));
    int best0 = 0;
    double bestd = (t - hull[0]).squaredNorm();
    for (size_t i = 1; i < h; ++i) {
        const double d = (t - hull[i]).squaredNorm();
        if (d < bestd) { bestd = d; best0 = static_cast<int>(i); }
    }
    beta(best0) = 1.0;

    Eigen::VectorXd x = m * beta;
    const int max_iters = 20000;
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd resid = x - t;       // gradient of f wrt x
        const Eigen::VectorXd g = m.transpose() * resid;

        int s = 0;
        g.minCoeff(&s);
        int a = -1;
        double ga = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < beta.size(); ++i) {
            if (beta(i) > 0.0 && g(i) > ga) { ga = g(i); a = static_cast<int>(i); }
        }
        const double gap = beta.dot(g) - g(s);
        if (gap <= 1e-18) break;

        // pick the steeper of FW and away directions
        const double fw_slope = g(s) - beta.dot(g);
        const double away_slope = beta.dot(g) - ga;
        bool away = (a >= 0) && (away_slope < fw_slope) && (beta(a) < 1.0 - 1e-15);

        Eigen::VectorXd dvec;
        double gamma_max;
        if (away) {
            dvec = m * beta - m.col(a);           // direction beta - e_a in x-space
            gamma_max = beta(a) / (1.0 - beta(a));
        } else {
            dvec = m.col(s) - x;
            gamma_max = 1.0;
        }
        const double dd = dvec.squaredNorm();
        if (dd <= 1e-30) break;
        double gamma = -resid.dot(dvec) / dd;
        gamma = std::clamp(gamma, 0.0, gamma_max);
        if (gamma <= 0.0) break;

        if (away) {
            beta *= (1.0 + gamma);
            beta(a) -= gamma;
            if (beta(a) < 1e-16) beta(a) = 0.0;
        } else {
            beta *= (1.0 - gamma);
            beta(s) += gamma;
        }
        x = m * beta;
    }
    return (x - t).norm();
}

double dist_to_hull(const SimplexPoint& t, std::span<const SimplexPoint> hull_points) {
    std::vector<Eigen::VectorXd> hv;
    hv.reserve(hull_points.size());
    for (const auto& q : hull_points) hv.push_back(q.coords());
    return dist_to_hull(t.coords(), hv);
}

} // namespace copodual
