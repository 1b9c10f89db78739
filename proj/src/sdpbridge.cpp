#include "copodual/sdpbridge.hpp"

#include "copodual/cones.hpp"

#include <cmath>

namespace copodual {

SymMatrix EdSolution::um(int m) const {
    const auto& v = levels.at(static_cast<size_t>(m - 1)).v;
    return SymMatrix::symmetrized(v * v.transpose());
}

Eigen::MatrixXd EdSolution::wm(int m) const {
    if (m == 0) return Eigen::MatrixXd::Zero(p, p);
    const auto& lev = levels.at(static_cast<size_t>(m - 1));
    return lev.v * lev.l.transpose();
}

SymMatrix EdSolution::dm(int m) const {
    const auto& l = levels.at(static_cast<size_t>(m - 1)).l;
    return SymMatrix::symmetrized(l * l.transpose());
}

json EdSolution::to_json() const {
    json j;
    j["kind"] = "ed_solution";
    j["p"] = p;
    j["m0"] = m0;
    json levs = json::array();
    for (const auto& lev : levels) {
        json jl;
        jl["V"] = matrix_to_json(lev.v);
        jl["L"] = matrix_to_json(lev.l);
        levs.push_back(std::move(jl));
    }
    j["levels"] = std::move(levs);
    j["U"] = matrix_to_json(u);
    return j;
}

EdSolution EdSolution::from_json(const json& j) {
    EdSolution s;
    s.p = j.at("p").get<int>();
    s.m0 = j.at("m0").get<int>();
    for (const auto& jl : j.at("levels")) {
        const auto& vj = jl.at("V");
        const auto& lj = jl.at("L");
        const auto vcols = vj.front().is_array() ? vj.front().size() : vj.size() / s.p;
        const auto lcols = lj.front().is_array() ? lj.front().size() : lj.size() / s.p;
        s.levels.push_back({matrix_from_json(vj, s.p, static_cast<Eigen::Index>(vcols)),
                            matrix_from_json(lj, s.p, static_cast<Eigen::Index>(lcols))});
    }
    if (static_cast<int>(s.levels.size()) != s.m0) {
        throw std::runtime_error("ed_solution: level count mismatch");
    }
    s.u = matrix_from_json(j.at("U"), s.p, s.p);
    return s;
}

json EdrSolution::to_json() const {
    json j;
    j["kind"] = "edr_solution";
    j["p"] = p;
    j["m0"] = m0;
    j["rho"] = vector_to_json(rho);
    json levs = json::array();
    for (const auto& lev : levels) {
        json jl;
        jl["U"] = matrix_to_json(lev.u);
        jl["W"] = matrix_to_json(lev.w);
        levs.push_back(std::move(jl));
    }
    j["levels"] = std::move(levs);
    j["U"] = matrix_to_json(u);
    return j;
}

EdrSolution EdrSolution::from_json(const json& j) {
    EdrSolution s;
    s.p = j.at("p").get<int>();
    s.m0 = j.at("m0").get<int>();
    s.rho = vector_from_json(j.at("rho"));
    for (const auto& jl : j.at("levels")) {
        s.levels.push_back({matrix_from_json(jl.at("U"), s.p, s.p),
                            matrix_from_json(jl.at("W"), s.p, s.p)});
    }
    if (static_cast<int>(s.levels.size()) != s.m0) {
        throw std::runtime_error("edr_solution: level count mismatch");
    }
    s.u = matrix_from_json(j.at("U"), s.p, s.p);
    return s;
}

namespace {

double equality_residuals(const Program& sdp, const std::vector<Eigen::MatrixXd>& uw_levels,
                          const Eigen::MatrixXd& uw_final) {
    double worst = 0.0;
    for (const auto& uw : uw_levels) {
        const SymMatrix s = SymMatrix::symmetrized(uw);
        for (int j = 0; j <= sdp.n; ++j) {
            worst = std::max(worst, std::abs(trace_inner(s, sdp.a[static_cast<size_t>(j)])));
        }
    }
    const SymMatrix sf = SymMatrix::symmetrized(uw_final);
    for (int j = 1; j <= sdp.n; ++j) {
        worst = std::max(worst,
                         std::abs(trace_inner(sf, sdp.a[static_cast<size_t>(j)]) - sdp.c(j - 1)));
    }
    return worst;
}

} // namespace

SdpResiduals ed_feasible(const Program& sdp, const EdSolution& ed, double tol) {
    (void)tol;
    sdp.validate();
    if (ed.p != sdp.p) throw std::invalid_argument("ed_feasible: dimension mismatch");

    SdpResiduals res;
    std::vector<Eigen::MatrixXd> uw;
    for (int m = 1; m <= ed.m0; ++m) {
        uw.push_back(ed.um(m).mat() + ed.wm(m - 1));
        // assembled 2p x 2p block is a Gram matrix; verify PSD numerically
        Eigen::MatrixXd block(2 * ed.p, 2 * ed.p);
        block.topLeftCorner(ed.p, ed.p) = ed.um(m).mat();
        block.topRightCorner(ed.p, ed.p) = ed.wm(m);
        block.bottomLeftCorner(ed.p, ed.p) = ed.wm(m).transpose();
        block.bottomRightCorner(ed.p, ed.p) = ed.dm(m).mat();
        res.min_block_eig =
            std::min(res.min_block_eig, min_eigenvalue(SymMatrix::symmetrized(block)));
    }
    res.max_equality_residual =
        equality_residuals(sdp, uw, ed.u + ed.wm(ed.m0));
    res.min_u_eig = min_eigenvalue(SymMatrix::symmetrized(ed.u));
    return res;
}

SdpResiduals edr_feasible(const Program& sdp, const EdrSolution& edr, double tol) {
    (void)tol;
    sdp.validate();
    if (edr.p != sdp.p) throw std::invalid_argument("edr_feasible: dimension mismatch");

    SdpResiduals res;
    std::vector<Eigen::MatrixXd> uw;
    for (int m = 1; m <= edr.m0; ++m) {
        const auto& lev = edr.levels[static_cast<size_t>(m - 1)];
        const Eigen::MatrixXd wprev =
            m == 1 ? Eigen::MatrixXd::Zero(edr.p, edr.p) : edr.levels[static_cast<size_t>(m - 2)].w;
        uw.push_back(lev.u + wprev);
        // Schur complement form of the 2p x 2p condition with identity block
        const SymMatrix schur = SymMatrix::symmetrized(lev.u - lev.w * lev.w.transpose());
        res.min_block_eig = std::min(res.min_block_eig, min_eigenvalue(schur));
    }
    const Eigen::MatrixXd wlast =
        edr.m0 == 0 ? Eigen::MatrixXd::Zero(edr.p, edr.p) : edr.levels.back().w;
    res.max_equality_residual = equality_residuals(sdp, uw, edr.u + wlast);
    res.min_u_eig = min_eigenvalue(SymMatrix::symmetrized(edr.u));
    return res;
}

EdrSolution ed_to_edr(const Program& sdp, const EdSolution& ed) {
    const SdpResiduals in = ed_feasible(sdp, ed);
    if (!in.feasible(1e-6, 1e-8)) {
        throw std::invalid_argument("ed_to_edr: input solution infeasible");
    }

    EdrSolution out;
    out.p = ed.p;
    out.m0 = ed.m0;
    out.u = ed.u;
    out.rho = Eigen::VectorXd::Ones(std::max(1, ed.m0));
    if (ed.m0 == 0) return out;

    out.levels.resize(static_cast<size_t>(ed.m0));
    // top level keeps its W; rho cascades downward, squaring at each step
    const auto mu_max_ltl = [&](int m) {
        const Eigen::MatrixXd& l = ed.levels[static_cast<size_t>(m - 1)].l;
        if (l.cols() == 0) return 0.0;
        return max_eigenvalue(SymMatrix::symmetrized(l.transpose() * l));
    };

    Eigen::VectorXd rho(ed.m0 + 1);
    rho(ed.m0) = 1.0; // no scaling above the top level
    for (int m = ed.m0; m >= 1; --m) {
        rho(m - 1) = std::max(1.0, rho(m) * rho(m) * mu_max_ltl(m));
    }
    // rho(m-1) here is the paper's rho(m): scale U_m by it, W_{m-1} likewise
    for (int m = 1; m <= ed.m0; ++m) {
        auto& lev = out.levels[static_cast<size_t>(m - 1)];
        lev.u = rho(m - 1) * ed.um(m).mat();
        lev.w = (m == ed.m0) ? ed.wm(m) : rho(m) * ed.wm(m);
    }
    out.rho = rho.head(ed.m0);
    return out;
}

EdMatrices edr_embed(const EdrSolution& edr) {
    EdMatrices em{{}, SymMatrix::symmetrized(edr.u)};
    for (const auto& lev : edr.levels) {
        em.levels.push_back({SymMatrix::symmetrized(lev.u), lev.w,
                             SymMatrix::identity(edr.p)});
    }
    return em;
}

SdpResiduals ed_matrices_feasible(const Program& sdp, const EdMatrices& em, double tol) {
    (void)tol;
    sdp.validate();
    const int p = sdp.p;
    SdpResiduals res;
    std::vector<Eigen::MatrixXd> uw;
    for (size_t m = 0; m < em.levels.size(); ++m) {
        const Eigen::MatrixXd wprev =
            m == 0 ? Eigen::MatrixXd::Zero(p, p) : em.levels[m - 1].w;
        uw.push_back(em.levels[m].u.mat() + wprev);
        Eigen::MatrixXd block(2 * p, 2 * p);
        block.topLeftCorner(p, p) = em.levels[m].u.mat();
        block.topRightCorner(p, p) = em.levels[m].w;
        block.bottomLeftCorner(p, p) = em.levels[m].w.transpose();
        block.bottomRightCorner(p, p) = em.levels[m].d.mat();
        res.min_block_eig =
            std::min(res.min_block_eig, min_eigenvalue(SymMatrix::symmetrized(block)));
    }
    const Eigen::MatrixXd wlast =
        em.levels.empty() ? Eigen::MatrixXd::Zero(p, p) : em.levels.back().w;
    res.max_equality_residual = equality_residuals(sdp, uw, em.u.mat() + wlast);
    res.min_u_eig = min_eigenvalue(em.u);
    return res;
}

bool psd_bound_check(const SymMatrix& q, int sample_count, std::mt19937_64& rng) {
    const double mu = max_eigenvalue(q);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < sample_count; ++s) {
        Eigen::VectorXd t(q.dim());
        for (int k = 0; k < q.dim(); ++k) t(k) = gauss(rng);
        if (quad_form(q, t) > mu * t.squaredNorm() + 1e-9) return false;
    }
    return true;
}

std::pair<Program, EdSolution> make_random_feasible_ed(int p, int n, int m0,
                                                       std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> width(1, p);

    EdSolution ed;
    ed.p = p;
    ed.m0 = m0;
    for (int m = 1; m <= m0; ++m) {
        const int k = width(rng);
        Eigen::MatrixXd v(p, k), l(p, k);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < k; ++j) {
                v(i, j) = unif(rng);
                l(i, j) = unif(rng);
            }
        }
        ed.levels.push_back({v, l});
    }
    Eigen::MatrixXd g(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) g(i, j) = unif(rng);
    }
    ed.u = g * g.transpose();

    // orthonormal basis (trace inner product) of the level equality matrices
    std::vector<Eigen::MatrixXd> basis;
    for (int m = 1; m <= m0; ++m) {
        Eigen::MatrixXd s = ed.um(m).mat() + ed.wm(m - 1);
        s = 0.5 * (s + s.transpose());
        for (const auto& b : basis) s -= b.cwiseProduct(s).sum() * b;
        const double norm = s.norm();
        if (norm > 1e-10) basis.push_back(s / norm);
    }

    Program prog;
    prog.kind = ProgramKind::sdp;
    prog.p = p;
    prog.n = n;
    prog.c = Eigen::VectorXd::Zero(n);
    for (int j = 0; j <= n; ++j) {
        Eigen::MatrixXd aj(p, p);
        for (int r = 0; r < p; ++r) {
            for (int c2 = 0; c2 < p; ++c2) aj(r, c2) = unif(rng);
        }
        aj = 0.5 * (aj + aj.transpose());
        for (const auto& b : basis) aj -= b.cwiseProduct(aj).sum() * b;
        prog.a.push_back(SymMatrix::symmetrized(aj));
    }
    const SymMatrix uw = SymMatrix::symmetrized(ed.u + ed.wm(m0));
    for (int j = 1; j <= n; ++j) prog.c(j - 1) = trace_inner(uw, prog.a[static_cast<size_t>(j)]);
    return {prog, ed};
}

} // namespace copodual
