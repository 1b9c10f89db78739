#include "copodual/dualgen.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

namespace copodual {

double GenConfig::effective_eps_init(const SimplexGrid& grid) const {
    return eps_init > 0.0 ? eps_init : 4.0 * grid.cell_diameter();
}

int GenConfig::effective_max_levels(int p) const {
    const int cap = (p >= 31) ? std::numeric_limits<int>::max() : (1 << p) - 1;
    return max_levels > 0 ? std::min(max_levels, cap) : cap;
}

SymMatrix ExtendedDualSolution::um(int m) const {
    const auto& vm = v.at(static_cast<size_t>(m - 1));
    return SymMatrix::symmetrized(vm * vm.transpose());
}

Eigen::MatrixXd ExtendedDualSolution::wm(int m) const {
    if (m == 0) return Eigen::MatrixXd::Zero(p, p);
    const auto& lm = l.at(static_cast<size_t>(m - 1));
    const auto& vm = v.at(static_cast<size_t>(m - 1));
    return lm * vm.transpose();
}

SymMatrix ExtendedDualSolution::dm(int m) const {
    const auto& lm = l.at(static_cast<size_t>(m - 1));
    return SymMatrix::symmetrized(lm * lm.transpose());
}

SymMatrix ExtendedDualSolution::u() const {
    if (final_v.cols() == 0) return SymMatrix::zero(p);
    return SymMatrix::symmetrized(final_v * final_v.transpose());
}

double ExtendedDualSolution::min_factor_entry() const {
    double m = 0.0;
    for (const auto& vm : v) {
        if (vm.size() > 0) m = std::min(m, vm.minCoeff());
    }
    for (const auto& lm : l) {
        if (lm.size() > 0) m = std::min(m, lm.minCoeff());
    }
    if (final_v.size() > 0) m = std::min(m, final_v.minCoeff());
    return m;
}

json ExtendedDualSolution::to_json() const {
    json j;
    j["kind"] = "extended_dual";
    j["p"] = p;
    j["m0"] = m0;
    json levels = json::array();
    for (int m = 1; m <= m0; ++m) {
        json lev;
        lev["V"] = matrix_to_json(v[static_cast<size_t>(m - 1)]);
        lev["L"] = matrix_to_json(l[static_cast<size_t>(m - 1)]);
        levels.push_back(std::move(lev));
    }
    j["levels"] = std::move(levels);
    j["U_factor"] = matrix_to_json(final_v);
    return j;
}

ExtendedDualSolution ExtendedDualSolution::from_json(const json& j) {
    ExtendedDualSolution s;
    s.p = j.at("p").get<int>();
    s.m0 = j.at("m0").get<int>();
    for (const auto& lev : j.at("levels")) {
        const auto& vj = lev.at("V");
        const auto& lj = lev.at("L");
        const auto cols = vj.front().is_array() ? vj.front().size() : vj.size() / s.p;
        s.v.push_back(matrix_from_json(vj, s.p, static_cast<Eigen::Index>(cols)));
        const auto lcols = lj.front().is_array() ? lj.front().size() : lj.size() / s.p;
        s.l.push_back(matrix_from_json(lj, s.p, static_cast<Eigen::Index>(lcols)));
    }
    if (static_cast<int>(s.v.size()) != s.m0) {
        throw std::runtime_error("extended_dual: level count mismatch");
    }
    const auto& uj = j.at("U_factor");
    Eigen::Index ucols = 0;
    if (!uj.empty()) ucols = uj.front().is_array() ? static_cast<Eigen::Index>(uj.front().size())
                                                   : static_cast<Eigen::Index>(uj.size()) / s.p;
    s.final_v = ucols > 0 ? matrix_from_json(uj, s.p, ucols) : Eigen::MatrixXd(s.p, 0);
    return s;
}

RestrictionLp restriction_problem(const Program& prog, const IterationState& state,
                                  const SimplexGrid& grid, const GenConfig& config) {
    prog.validate();
    if (grid.p != prog.p) throw std::invalid_argument("restriction_problem: grid dimension mismatch");
    const int n = prog.n;
    const int p = prog.p;

    RestrictionLp rp;
    rp.lp = LinearProgram::make(n + 1); // variables (x, mu)
    rp.lp.objective = Eigen::VectorXd::Zero(n + 1);
    rp.lp.objective(n) = 1.0;
    rp.lp.set_box(n, -config.mu_box, config.mu_box);
    rp.lp.start_at_upper.push_back(n);

    // componentwise rows A(x) tau(i) >= 0 for the accumulated indices
    for (const auto& entry : state.indices) {
        const Eigen::VectorXd& tau = entry.tau.coords();
        std::vector<Eigen::VectorXd> atau(static_cast<size_t>(n + 1));
        for (int j = 0; j <= n; ++j) atau[static_cast<size_t>(j)] = prog.a[static_cast<size_t>(j)].mat() * tau;
        for (int k = 0; k < p; ++k) {
            Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
            for (int j = 1; j <= n; ++j) row(j - 1) = atau[static_cast<size_t>(j)](k);
            rp.lp.add_ineq(std::move(row), -atau[0](k));
        }
    }
    rp.index_row_count = static_cast<int>(rp.lp.ineq.size());

    // one row per grid point outside the epsilon neighborhood of the hull
    std::vector<Eigen::VectorXd> hull;
    hull.reserve(state.indices.size());
    for (const auto& e : state.indices) hull.push_back(e.tau.coords());

    for (size_t idx = 0; idx < grid.points.size(); ++idx) {
        const Eigen::VectorXd& t = grid.points[idx].coords();
        if (!hull.empty() && dist_to_hull(t, hull) < state.epsilon) continue;
        Eigen::VectorXd row(n + 1);
        for (int j = 1; j <= n; ++j) row(j - 1) = quad_form(prog.a[static_cast<size_t>(j)], t);
        row(n) = 1.0;
        rp.lp.add_ineq(std::move(row), -quad_form(prog.a[0], t));
        rp.grid_rows.push_back(static_cast<int>(idx));
    }
    if (rp.grid_rows.empty()) throw GridRestrictedEmpty{};
    return rp;
}

bool verify_immobile(const Program& prog, const SimplexPoint& tau, const SimplexGrid& grid,
                     const GenConfig& config) {
    const int n = prog.n;
    const double const_term = quad_form(prog.a[0], tau.coords());
    if (n == 0) return std::abs(const_term) <= config.immobile_tol;

    LinearProgram lp = LinearProgram::make(n);
    for (int j = 1; j <= n; ++j) {
        lp.objective(j - 1) = -quad_form(prog.a[static_cast<size_t>(j)], tau.coords());
        lp.set_box(j - 1, -config.box_radius, config.box_radius);
    }
    for (const auto& gp : grid.points) {
        const Eigen::VectorXd& t = gp.coords();
        Eigen::VectorXd row(n);
        for (int j = 1; j <= n; ++j) row(j - 1) = quad_form(prog.a[static_cast<size_t>(j)], t);
        lp.add_ineq(std::move(row), -quad_form(prog.a[0], t));
    }
    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::unbounded) {
        throw std::logic_error("verify_immobile: box-bounded probe reported unbounded");
    }
    if (sol.status == LpStatus::infeasible) return false; // discretized region empty
    const double max_value = -sol.value + const_term;
    return max_value <= config.immobile_tol;
}

namespace {

Eigen::VectorXd clamp_nonneg(Eigen::VectorXd v, const char* what) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (v(k) < 0.0) {
            if (v(k) < -1e-9) {
                std::cerr << "warning: clamping negative " << what << " multiplier " << v(k) << "\n";
            }
            v(k) = 0.0;
        }
    }
    return v;
}

double level_equality_residual(const Program& prog, const Eigen::MatrixXd& v_next,
                               const Eigen::MatrixXd* l_cur, const Eigen::MatrixXd* v_cur) {
    const SymMatrix u_next = SymMatrix::symmetrized(v_next * v_next.transpose());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(prog.p, prog.p);
    if (l_cur != nullptr && v_cur != nullptr) w = (*l_cur) * v_cur->transpose();
    const SymMatrix uw = SymMatrix::symmetrized(u_next.mat() + w);
    double worst = 0.0;
    for (int j = 0; j <= prog.n; ++j) {
        const double r = trace_inner(uw, prog.a[static_cast<size_t>(j)]);
        worst = std::max(worst, std::abs(r) / (1.0 + prog.a[static_cast<size_t>(j)].frob_norm()));
    }
    return worst;
}

} // namespace

IterateResult iterate(const Program& prog, IterationState& state, const SimplexGrid& grid,
                      const GenConfig& config, json* level_trace) {
    const int m = state.m;
    const int n = prog.n;
    const int p = prog.p;

    double eps = config.effective_eps_init(grid);
    SimplexGrid finer;                // only used for level-0 retries
    const SimplexGrid* g = &grid;

    for (int retry = 0; retry <= config.max_eps_retries; ++retry) {
        state.epsilon = eps;
        RestrictionLp rp;
        try {
            rp = restriction_problem(prog, state, *g, config);
        } catch (const GridRestrictedEmpty&) {
            eps *= config.eps_shrink;
            continue;
        }
        const LpSolution sol = solve_lp(rp.lp);
        if (sol.status == LpStatus::infeasible) return {IterateKind::infeasible, {}, 0.0};
        if (sol.status == LpStatus::unbounded) {
            throw std::logic_error("iterate: restriction problem unbounded despite mu box");
        }
        const double mu_star = sol.value;
        if (level_trace != nullptr) {
            (*level_trace)["m"] = m;
            (*level_trace)["mu_star"] = mu_star;
            (*level_trace)["epsilon"] = m == 0 ? 0.0 : eps;
            (*level_trace)["retries"] = retry;
        }
        if (mu_star < -config.mu_tol) {
            return {IterateKind::slater_detected, sol.y.head(n), mu_star};
        }
        if (mu_star > config.mu_tol) return {IterateKind::infeasible, {}, 0.0};

        // multiplier extraction over the grid rows
        std::vector<SimplexPoint> new_taus;
        std::vector<double> new_gammas;
        double gamma_sum = 0.0;
        for (size_t pos = 0; pos < rp.grid_rows.size(); ++pos) {
            const double dual = sol.ineq_duals(rp.index_row_count + static_cast<Eigen::Index>(pos));
            if (dual > config.support_tol) {
                new_taus.push_back(g->points[static_cast<size_t>(rp.grid_rows[pos])]);
                new_gammas.push_back(dual);
                gamma_sum += dual;
            }
        }
        if (new_taus.empty() || static_cast<int>(new_taus.size()) > n + 1) {
            throw std::runtime_error("iterate: extracted support size outside [1, n+1]");
        }
        for (double& gval : new_gammas) gval /= gamma_sum;

        std::vector<Eigen::VectorXd> lambda_hat(state.indices.size());
        for (size_t i = 0; i < state.indices.size(); ++i) {
            Eigen::VectorXd lh(p);
            for (int k = 0; k < p; ++k) {
                lh(k) = sol.ineq_duals(static_cast<Eigen::Index>(i) * p + k);
            }
            lambda_hat[i] = clamp_nonneg(std::move(lh), "lambda");
        }

        bool verified = true;
        for (const auto& tau : new_taus) {
            if (!verify_immobile(prog, tau, *g, config)) {
                verified = false;
                break;
            }
        }
        if (!verified) {
            if (m == 0) {
                // no epsilon at level 0: refine the grid for this solve instead
                finer = simplex_grid(p, g->k * 2);
                g = &finer;
            } else {
                eps *= config.eps_shrink;
            }
            continue;
        }

        // accepted: merge multipliers, run the data modification, extend factors
        const int old_count = static_cast<int>(state.indices.size());
        std::vector<Eigen::VectorXd> lambda_cur(static_cast<size_t>(old_count));
        for (int i = 0; i < old_count; ++i) {
            lambda_cur[static_cast<size_t>(i)] =
                (i < state.prev_count ? state.lambda_prev[static_cast<size_t>(i)]
                                      : Eigen::VectorXd::Zero(p)) +
                lambda_hat[static_cast<size_t>(i)];
        }

        int dam_steps = 0;
        int hull_warnings = 0;
        if (old_count > 0) {
            DataSet ds;
            for (size_t i = 0; i < new_taus.size(); ++i) {
                ds.delta_items.push_back({new_taus[i], new_gammas[i]});
            }
            for (int i = 0; i < old_count; ++i) {
                ds.base_items.push_back({state.indices[static_cast<size_t>(i)].tau,
                                         lambda_cur[static_cast<size_t>(i)],
                                         state.indices[static_cast<size_t>(i)].gamma});
            }
            const DamResult dr = run_dam(ds);
            dam_steps = dr.steps;
            hull_warnings = dr.hull_warnings;
            for (int i = 0; i < old_count; ++i) {
                state.indices[static_cast<size_t>(i)].gamma =
                    dr.data.base_items[static_cast<size_t>(i)].gamma;
                lambda_cur[static_cast<size_t>(i)] = dr.data.base_items[static_cast<size_t>(i)].lambda;
            }
            for (size_t i = 0; i < new_taus.size(); ++i) {
                new_taus[i] = dr.data.delta_items[i].tau;
                new_gammas[i] = dr.data.delta_items[i].gamma;
            }
        }

        // L_m from the merged multipliers and the betas frozen with V_m
        if (m >= 1) {
            Eigen::MatrixXd lm(p, old_count);
            for (int i = 0; i < old_count; ++i) {
                lm.col(i) = lambda_cur[static_cast<size_t>(i)] / state.betas[static_cast<size_t>(i)];
            }
            state.l_levels.push_back(std::move(lm));
        }

        for (size_t i = 0; i < new_taus.size(); ++i) {
            state.indices.push_back({new_taus[i], new_gammas[i], m});
        }
        state.prev_count = old_count;
        state.lambda_prev = std::move(lambda_cur);

        const int new_count = static_cast<int>(state.indices.size());
        state.betas.resize(static_cast<size_t>(new_count));
        Eigen::MatrixXd vm(p, new_count);
        for (int i = 0; i < new_count; ++i) {
            state.betas[static_cast<size_t>(i)] = std::sqrt(state.indices[static_cast<size_t>(i)].gamma);
            vm.col(i) = state.betas[static_cast<size_t>(i)] * state.indices[static_cast<size_t>(i)].tau.coords();
        }
        state.v_levels.push_back(std::move(vm));
        state.level_reps.push_back(support(new_taus.front()));

        if (level_trace != nullptr) {
            (*level_trace)["delta_count"] = static_cast<int>(new_taus.size());
            (*level_trace)["gamma_sum"] = gamma_sum;
            (*level_trace)["dam_steps"] = dam_steps;
            (*level_trace)["dam_hull_warnings"] = hull_warnings;
            const Eigen::MatrixXd* lcur = m >= 1 ? &state.l_levels.back() : nullptr;
            const Eigen::MatrixXd* vcur =
                m >= 1 ? &state.v_levels[static_cast<size_t>(m - 1)] : nullptr;
            (*level_trace)["eq_residual"] =
                level_equality_residual(prog, state.v_levels.back(), lcur, vcur);
        }

        state.m = m + 1;
        return {IterateKind::continued, {}, mu_star};
    }
    throw EpsilonScheduleExhausted{};
}

FinalResult final_step(const Program& prog, const IterationState& state, int m0,
                       const SimplexGrid& grid, const GenConfig& config) {
    const int n = prog.n;
    const int p = prog.p;

    LinearProgram lp = LinearProgram::make(n);
    lp.objective = prog.c;

    for (const auto& entry : state.indices) {
        const Eigen::VectorXd& tau = entry.tau.coords();
        for (int k = 0; k < p; ++k) {
            Eigen::VectorXd row(n);
            for (int j = 1; j <= n; ++j) row(j - 1) = (prog.a[static_cast<size_t>(j)].mat() * tau)(k);
            lp.add_ineq(std::move(row), -(prog.a[0].mat() * tau)(k));
        }
    }
    const int index_row_count = static_cast<int>(lp.ineq.size());

    std::vector<Eigen::VectorXd> hull;
    for (const auto& e : state.indices) hull.push_back(e.tau.coords());
    std::vector<int> grid_rows;
    for (size_t idx = 0; idx < grid.points.size(); ++idx) {
        const Eigen::VectorXd& t = grid.points[idx].coords();
        if (m0 >= 1 && !hull.empty() && dist_to_hull(t, hull) < state.epsilon) continue;
        Eigen::VectorXd row(n);
        for (int j = 1; j <= n; ++j) row(j - 1) = quad_form(prog.a[static_cast<size_t>(j)], t);
        lp.add_ineq(std::move(row), -quad_form(prog.a[0], t));
        grid_rows.push_back(static_cast<int>(idx));
    }

    FinalResult fr;
    const LpSolution sol = solve_lp(lp);
    fr.status = sol.status;
    if (sol.status != LpStatus::optimal) return fr;

    fr.x0 = sol.y;
    fr.primal_value = sol.value;

    std::vector<SimplexPoint> final_taus;
    std::vector<double> final_gammas;
    for (size_t pos = 0; pos < grid_rows.size(); ++pos) {
        const double dual = sol.ineq_duals(index_row_count + static_cast<Eigen::Index>(pos));
        if (dual > config.support_tol) {
            final_taus.push_back(grid.points[static_cast<size_t>(grid_rows[pos])]);
            final_gammas.push_back(dual);
        }
    }

    fr.sol.p = p;
    fr.sol.m0 = m0;
    fr.sol.v = state.v_levels;
    fr.sol.l = state.l_levels;
    fr.sol.final_v = Eigen::MatrixXd(p, static_cast<Eigen::Index>(final_taus.size()));
    for (size_t i = 0; i < final_taus.size(); ++i) {
        fr.sol.final_v.col(static_cast<Eigen::Index>(i)) =
            std::sqrt(final_gammas[i]) * final_taus[i].coords();
    }

    if (m0 >= 1) {
        const int count = static_cast<int>(state.indices.size());
        Eigen::MatrixXd lm(p, count);
        for (int i = 0; i < count; ++i) {
            Eigen::VectorXd lam(p);
            for (int k = 0; k < p; ++k) lam(k) = sol.ineq_duals(static_cast<Eigen::Index>(i) * p + k);
            lam = clamp_nonneg(std::move(lam), "final lambda");
            lm.col(i) = lam / state.betas[static_cast<size_t>(i)];
        }
        fr.sol.l.push_back(std::move(lm));
    }

    // complementarity residues of the final pairing
    const SymMatrix ax0 = constraint_matrix(prog, fr.x0);
    double worst = 0.0;
    for (size_t i = 0; i < final_taus.size(); ++i) {
        worst = std::max(worst, std::abs(final_gammas[i] * quad_form(ax0, final_taus[i].coords())));
    }
    if (m0 >= 1) {
        const Eigen::MatrixXd& lm = fr.sol.l.back();
        for (size_t i = 0; i < state.indices.size(); ++i) {
            const double r = (lm.col(static_cast<Eigen::Index>(i)) * state.betas[i])
                                 .dot(ax0.mat() * state.indices[i].tau.coords());
            worst = std::max(worst, std::abs(r));
        }
    }
    fr.max_complementarity = worst;
    return fr;
}

BuildResult build_dual(const Program& prog, const GenConfig& config) {
    prog.validate();
    const int p = prog.p;
    SimplexGrid grid = simplex_grid(p, config.grid_resolution);
    const int max_levels = config.effective_max_levels(p);

    BuildResult br;
    IterationState state;
    bool slater = false;

    while (true) {
        if (state.m > max_levels) {
            br.status = BuildStatus::iteration_cap;
            return br;
        }
        json lt;
        IterateResult ir;
        try {
            ir = iterate(prog, state, grid, config, &lt);
        } catch (const EpsilonScheduleExhausted&) {
            br.status = BuildStatus::eps_exhausted;
            return br;
        }
        br.trace.push_back(lt);
        if (ir.kind == IterateKind::infeasible) {
            br.status = BuildStatus::infeasible;
            return br;
        }
        if (ir.kind == IterateKind::slater_detected) {
            br.m0 = state.m;
            slater = true;
            break;
        }
        // distinct-support termination guard
        std::set<std::vector<int>> seen;
        for (const auto& rep : state.level_reps) {
            if (!seen.insert(rep).second) {
                br.status = BuildStatus::support_repetition;
                return br;
            }
        }
    }
    (void)slater;

    IterationState final_state = state; // epsilon may shrink on gap retries
    int final_grid_k = config.grid_resolution;
    for (int attempt = 0; attempt <= config.max_eps_retries; ++attempt) {
        const SimplexGrid fgrid = final_grid_k == grid.k ? grid : simplex_grid(p, final_grid_k);
        const FinalResult fr = final_step(prog, final_state, br.m0, fgrid, config);
        if (fr.status == LpStatus::unbounded) {
            br.status = BuildStatus::unbounded;
            return br;
        }
        if (fr.status == LpStatus::infeasible) {
            br.status = BuildStatus::infeasible;
            return br;
        }
        br.x0 = fr.x0;
        br.primal_value = fr.primal_value;
        br.sol = fr.sol;
        const SymMatrix uw = SymMatrix::symmetrized(fr.sol.u().mat() + fr.sol.wm(br.m0));
        br.dual_value = -trace_inner(uw, prog.a[0]);
        br.gap = br.primal_value - br.dual_value;

        const SimplexGrid refined = simplex_grid(p, std::min(2 * config.grid_resolution, 64));
        br.x0_refined_min = feasibility_check(prog, br.x0, refined, 1e-6, 2).min_value;

        json ft;
        ft["final"] = true;
        ft["epsilon"] = br.m0 >= 1 ? final_state.epsilon : 0.0;
        ft["grid_k"] = final_grid_k;
        ft["primal_value"] = br.primal_value;
        ft["dual_value"] = br.dual_value;
        ft["gap"] = br.gap;
        ft["x0_refined_min"] = br.x0_refined_min;
        ft["max_complementarity"] = fr.max_complementarity;
        br.trace.push_back(ft);

        const bool gap_ok = std::abs(br.gap) <= 1e-6 * (1.0 + std::abs(br.primal_value));
        const bool feas_ok = br.x0_refined_min >= -1e-6;
        if (gap_ok && feas_ok) {
            br.status = BuildStatus::ok;
            return br;
        }
        if (br.m0 >= 1) {
            final_state.epsilon *= config.eps_shrink;
        } else {
            final_grid_k = std::min(2 * final_grid_k, 128);
        }
    }
    br.status = BuildStatus::gap_fail;
    return br;
}

const char* to_string(BuildStatus s) {
    switch (s) {
        case BuildStatus::ok: return "ok";
        case BuildStatus::infeasible: return "infeasible";
        case BuildStatus::unbounded: return "unbounded";
        case BuildStatus::iteration_cap: return "iteration_cap";
        case BuildStatus::eps_exhausted: return "eps_exhausted";
        case BuildStatus::support_repetition: return "support_repetition";
        case BuildStatus::gap_fail: return "gap_fail";
    }
    return "unknown";
}

} // namespace copodual
