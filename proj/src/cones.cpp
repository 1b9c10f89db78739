#include "copodual/cones.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

namespace copodual {

CpFactor::CpFactor(int p, int k, Eigen::MatrixXd b) : b_(std::move(b)) {
    if (p < 1 || k < 1 || b_.rows() != p || b_.cols() != k) {
        throw std::invalid_argument("CpFactor: shape mismatch");
    }
    if (b_.minCoeff() < 0.0) {
        throw std::invalid_argument("CpFactor: negative entry");
    }
}

namespace {

struct Candidate {
    double value;
    Eigen::VectorXd point;
};

std::vector<double> evaluate_points(const SymMatrix& d,
                                    const std::vector<SimplexPoint>& pts, int threads) {
    std::vector<double> vals(pts.size());
    auto eval_range = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) vals[i] = quad_form(d, pts[i].coords());
    };
    if (threads <= 1 || pts.size() < 4096) {
        eval_range(0, pts.size());
        return vals;
    }
    const size_t nchunk = static_cast<size_t>(threads);
    const size_t step = (pts.size() + nchunk - 1) / nchunk;
    std::vector<std::future<void>> futs;
    for (size_t c = 0; c < nchunk; ++c) {
        const size_t lo = c * step;
        const size_t hi = std::min(pts.size(), lo + step);
        if (lo >= hi) break;
        futs.push_back(std::async(std::launch::async, eval_range, lo, hi));
    }
    for (auto& f : futs) f.get();
    return vals;
}

/// Exact minimizer of the quadratic on the face spanned by the support of
/// `center`, accepted only when it stays inside the face and improves.
bool polish_face(const SymMatrix& d, const Eigen::VectorXd& center,
                 double& best_value, Eigen::VectorXd& best_point) {
    std::vector<int> supp;
    for (int k = 0; k < center.size(); ++k) {
        if (center(k) > kSupportEps) supp.push_back(k);
    }
    const int s = static_cast<int>(supp.size());
    if (s == 0) return false;

    // KKT system for min t^T D t on the affine slice e^T t = 1, t off-face = 0.
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) kkt(a, b) = 2.0 * d(supp[a], supp[b]);
        kkt(a, s) = 1.0;
        kkt(s, a) = 1.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
    rhs(s) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd sol = lu.solve(rhs);

    Eigen::VectorXd t = Eigen::VectorXd::Zero(center.size());
    for (int a = 0; a < s; ++a) {
        if (sol(a) < 0.0) return false; // critical point leaves the face
        t(supp[a]) = sol(a);
    }
    t /= t.sum();
    const double v = quad_form(d, t);
    if (v < best_value - 1e-15) {
        best_value = v;
        best_point = t;
        return true;
    }
    return false;
}

} // namespace

MinQuadResult min_quad_over_simplex(const SymMatrix& d, const SimplexGrid& grid,
                                    int refine_rounds, const MinQuadOptions& opts) {
    if (d.dim() != grid.p) throw std::invalid_argument("min_quad_over_simplex: dimension mismatch");
    if (refine_rounds < 0) throw std::invalid_argument("min_quad_over_simplex: refine_rounds >= 0");

    const int p = grid.p;
    const std::vector<double> vals = evaluate_points(d, grid.points, opts.threads);

    const int q = std::max(1, opts.best_points);
    std::vector<int> order(grid.points.size());
    std::iota(order.begin(), order.end(), 0);
    const int keep = std::min<int>(q, static_cast<int>(order.size()));
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](int a, int b) { return vals[a] < vals[b]; });

    std::vector<Candidate> cands;
    for (int i = 0; i < keep; ++i) {
        cands.push_back({vals[order[i]], grid.points[order[i]].coords()});
    }

    MinQuadResult res;
    res.value = cands.front().value;
    Eigen::VectorXd best_pt = cands.front().point;
    res.round_values.push_back(res.value);

    // local re-grid at modest resolution; the face polish supplies the
    // final digits once the right face is identified
    const int k_local = std::clamp(grid.k, 4, 12);
    const SimplexGrid local = simplex_grid(p, k_local);

    double h = 1.0 / grid.k; // shrink factor of the sub-simplex per round
    for (int round = 0; round < refine_rounds; ++round) {
        h *= 0.5;
        std::vector<Candidate> next;
        for (const auto& c : cands) {
            Candidate improved = c;
            for (const auto& u : local.points) {
                Eigen::VectorXd t = (1.0 - h) * c.point + h * u.coords();
                const double v = t.dot(d.mat() * t);
                if (v < improved.value) {
                    improved.value = v;
                    improved.point = t;
                }
            }
            polish_face(d, improved.point, improved.value, improved.point);
            next.push_back(improved);
            if (improved.value < res.value) {
                res.value = improved.value;
                best_pt = improved.point;
            }
        }
        cands = std::move(next);
        res.round_values.push_back(res.value);
    }

    res.argmin = SimplexPoint(best_pt);
    return res;
}

CopositivityVerdict is_copositive(const SymMatrix& d, double tol, int grid_resolution,
                                  int refine_rounds, const MinQuadOptions& opts) {
    if (tol <= 0.0) throw std::invalid_argument("is_copositive: tol > 0 required");
    const SimplexGrid grid = simplex_grid(d.dim(), grid_resolution);
    const MinQuadResult mq = min_quad_over_simplex(d, grid, refine_rounds, opts);

    CopositivityVerdict v;
    v.min_value = mq.value;
    v.witness = mq.argmin;
    if (mq.value < -tol) {
        v.status = CopStatus::not_copositive;
        return v;
    }
    const size_t n = mq.round_values.size();
    const bool stabilized =
        n >= 2 && std::abs(mq.round_values[n - 1] - mq.round_values[n - 2]) < tol / 10.0;
    v.status = stabilized ? CopStatus::copositive : CopStatus::inconclusive;
    return v;
}

bool is_psd(const SymMatrix& q, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("is_psd: tol > 0 required");
    return min_eigenvalue(q) >= -tol;
}

SymMatrix cp_gram(const CpFactor& f) {
    return SymMatrix::symmetrized(f.factor() * f.factor().transpose());
}

SymMatrix cp_block(const Eigen::MatrixXd& v, const Eigen::MatrixXd& l) {
    if (v.rows() != l.rows() || v.cols() != l.cols()) {
        throw std::invalid_argument("cp_block: V and L must have identical shape");
    }
    if (v.size() > 0 && (v.minCoeff() < 0.0 || l.minCoeff() < 0.0)) {
        throw std::invalid_argument("cp_block: negative entry in V or L");
    }
    const Eigen::Index p = v.rows();
    Eigen::MatrixXd stacked(2 * p, v.cols());
    stacked.topRows(p) = v;
    stacked.bottomRows(p) = l;
    return SymMatrix::symmetrized(stacked * stacked.transpose());
}

} // namespace copodual
