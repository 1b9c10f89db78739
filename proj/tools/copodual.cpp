#include "copodual/cones.hpp"
#include "copodual/dualgen.hpp"
#include "copodual/model.hpp"
#include "copodual/sdpbridge.hpp"
#include "copodual/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using copodual::json;

constexpr int kExitBadInput = 64;
constexpr int kExitInfeasible = 65;
constexpr int kExitGapFail = 66;
constexpr int kExitUnbounded = 67;

struct CommonFlags {
    int grid = 16;
    double tol = 1e-7;
    double eps_init = 0.0;
    int max_iters = 0;
    bool as_json = false;
    std::string out;
    int threads = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--grid", grid, "simplex grid resolution")->check(CLI::PositiveNumber);
        cmd->add_option("--tol", tol, "base tolerance")->check(CLI::PositiveNumber);
        cmd->add_option("--eps-init", eps_init, "initial restriction radius (0 = auto)");
        cmd->add_option("--max-iters", max_iters, "iteration/level cap (0 = auto)");
        cmd->add_flag("--json", as_json, "emit machine-readable JSON on stdout");
        cmd->add_option("--out", out, "write the JSON document to this path");
        cmd->add_option("--threads", threads, "parallel grid evaluation")->check(CLI::PositiveNumber);
    }

    copodual::GenConfig gen_config() const {
        copodual::GenConfig cfg;
        cfg.grid_resolution = grid;
        cfg.mu_tol = tol;
        cfg.eps_init = eps_init;
        cfg.max_levels = max_iters;
        cfg.threads = threads;
        return cfg;
    }
};

void emit(const json& doc, const CommonFlags& flags, const std::string& human) {
    if (!flags.out.empty()) {
        std::ofstream f(flags.out);
        if (!f) throw std::runtime_error("cannot write " + flags.out);
        f << doc.dump(2) << '\n';
    }
    if (flags.as_json) {
        std::cout << doc.dump(2) << '\n';
    } else {
        std::cout << human;
    }
}

std::string format_point(const Eigen::VectorXd& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) s += ", ";
        s += std::to_string(v(i));
    }
    return s + ")";
}

int cmd_check_cop(const std::string& path, const CommonFlags& flags) {
    const copodual::SymMatrix m = copodual::load_matrix(path);
    copodual::MinQuadOptions opts;
    opts.threads = flags.threads;
    const auto verdict = copodual::is_copositive(m, flags.tol, flags.grid, 3, opts);

    json doc;
    doc["status"] = verdict.status == copodual::CopStatus::copositive      ? "copositive"
                    : verdict.status == copodual::CopStatus::not_copositive ? "not_copositive"
                                                                             : "inconclusive";
    doc["min_value"] = verdict.min_value;
    doc["witness"] = copodual::vector_to_json(verdict.witness.coords());

    std::string human = "status: " + doc["status"].get<std::string>() +
                        "\nmin value: " + std::to_string(verdict.min_value) +
                        "\nwitness: " + format_point(verdict.witness.coords()) + "\n";
    emit(doc, flags, human);
    switch (verdict.status) {
        case copodual::CopStatus::copositive: return 0;
        case copodual::CopStatus::not_copositive: return 1;
        case copodual::CopStatus::inconclusive: return 2;
    }
    return 2;
}

int cmd_find_immobile(const std::string& path, const CommonFlags& flags) {
    const copodual::Program prog = copodual::load_program(path);
    const copodual::GenConfig cfg = flags.gen_config();
    const copodual::SimplexGrid grid = copodual::simplex_grid(prog.p, cfg.grid_resolution);

    copodual::IterationState state;
    const int cap = cfg.effective_max_levels(prog.p);
    bool infeasible = false;
    while (state.m <= cap) {
        const auto r = copodual::iterate(prog, state, grid, cfg);
        if (r.kind == copodual::IterateKind::infeasible) {
            infeasible = true;
            break;
        }
        if (r.kind == copodual::IterateKind::slater_detected) break;
    }
    if (infeasible) {
        std::cerr << "program infeasible\n";
        return kExitInfeasible;
    }

    const bool slater = copodual::slater_probe(prog, grid, cfg);
    json doc;
    json levels = json::array();
    std::string human;
    for (const auto& e : state.indices) {
        json item;
        item["level"] = e.level;
        item["tau"] = copodual::vector_to_json(e.tau.coords());
        levels.push_back(std::move(item));
        human += "level " + std::to_string(e.level) + ": tau = " +
                 format_point(e.tau.coords()) + "\n";
    }
    doc["immobile_indices"] = std::move(levels);
    doc["slater"] = slater;
    human += std::string("Slater: ") + (slater ? "true" : "false") + "\n";
    if (state.indices.empty()) human = "no immobile indices found\n" + human;
    emit(doc, flags, human);
    return 0;
}

int cmd_build_dual(const std::string& path, const CommonFlags& flags) {
    const copodual::Program prog = copodual::load_program(path);
    const copodual::GenConfig cfg = flags.gen_config();
    const copodual::BuildResult br = copodual::build_dual(prog, cfg);

    if (br.status == copodual::BuildStatus::infeasible) {
        std::cerr << "program infeasible\n";
        return kExitInfeasible;
    }
    if (br.status == copodual::BuildStatus::unbounded) {
        std::cerr << "program unbounded below\n";
        return kExitUnbounded;
    }
    if (br.status != copodual::BuildStatus::ok && br.status != copodual::BuildStatus::gap_fail) {
        std::cerr << "construction failed: " << copodual::to_string(br.status) << "\n";
        return kExitGapFail;
    }

    const copodual::DualityReport rep = copodual::strong_duality_report(prog, br.x0, br.sol);
    json doc = br.sol.to_json();
    doc["x0"] = copodual::vector_to_json(br.x0);
    doc["primal_value"] = br.primal_value;
    doc["report"] = rep.to_json();
    doc["trace"] = br.trace;

    std::string human = "m0: " + std::to_string(br.m0) +
                        "\nprimal value: " + std::to_string(rep.primal_value) +
                        "\ndual value: " + std::to_string(rep.dual_value) +
                        "\ngap: " + std::to_string(rep.gap) +
                        "\nverdict: " + copodual::to_string(rep.verdict) + "\n";
    emit(doc, flags, human);

    const bool ok = br.status == copodual::BuildStatus::ok &&
                    rep.verdict == copodual::DualityVerdict::strong_duality;
    return ok ? 0 : kExitGapFail;
}

int cmd_verify(const std::string& prog_path, const std::string& sol_path,
               const CommonFlags& flags) {
    const copodual::Program prog = copodual::load_program(prog_path);
    std::ifstream f(sol_path);
    if (!f) throw std::runtime_error("cannot open " + sol_path);
    json j;
    f >> j;
    const auto sol = copodual::ExtendedDualSolution::from_json(j);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(prog.n);
    if (j.contains("x0")) x0 = copodual::vector_from_json(j.at("x0"));

    const copodual::DualityReport rep = copodual::strong_duality_report(prog, x0, sol);
    json doc = rep.to_json();
    std::string human = std::string("verdict: ") + copodual::to_string(rep.verdict) +
                        "\ngap: " + std::to_string(rep.gap) +
                        "\nmax equality residual: " + std::to_string(rep.max_equality_residual) +
                        "\n";
    emit(doc, flags, human);
    switch (rep.verdict) {
        case copodual::DualityVerdict::strong_duality: return 0;
        case copodual::DualityVerdict::weak_only: return 1;
        case copodual::DualityVerdict::infeasible_dual: return 2;
    }
    return 2;
}

int cmd_sdp_convert(const std::string& prog_path, const std::string& ed_path,
                    const CommonFlags& flags) {
    const copodual::Program prog = copodual::load_program(prog_path);
    if (prog.kind != copodual::ProgramKind::sdp) {
        std::cerr << "sdp-convert expects a program with kind \"sdp\"\n";
        return kExitBadInput;
    }
    std::ifstream f(ed_path);
    if (!f) throw std::runtime_error("cannot open " + ed_path);
    json j;
    f >> j;
    const auto ed = copodual::EdSolution::from_json(j);

    const auto in_res = copodual::ed_feasible(prog, ed);
    if (in_res.max_equality_residual > 1e-6) {
        std::cerr << "ED solution violates the equality rows (residual "
                  << in_res.max_equality_residual << ")\n";
        return kExitInfeasible;
    }

    json doc;
    if (in_res.min_block_eig < -1e-8 || in_res.min_u_eig < -1e-8) {
        doc["input_min_block_eig"] = in_res.min_block_eig;
        doc["input_min_u_eig"] = in_res.min_u_eig;
        emit(doc, flags,
             "ED solution fails the PSD conditions (min block eig " +
                 std::to_string(in_res.min_block_eig) + ")\n");
        return 1;
    }

    const auto edr = copodual::ed_to_edr(prog, ed);
    const auto out_res = copodual::edr_feasible(prog, edr);

    const auto obj = [&](const Eigen::MatrixXd& u, const Eigen::MatrixXd& w) {
        return -copodual::trace_inner(copodual::SymMatrix::symmetrized(u + w), prog.a[0]);
    };
    const Eigen::MatrixXd w_ed = ed.wm(ed.m0);
    const Eigen::MatrixXd w_edr =
        edr.m0 == 0 ? Eigen::MatrixXd::Zero(edr.p, edr.p) : edr.levels.back().w;
    const double obj_ed = obj(ed.u, w_ed);
    const double obj_edr = obj(edr.u, w_edr);

    doc = edr.to_json();
    doc["objective_ed"] = obj_ed;
    doc["objective_edr"] = obj_edr;
    doc["max_equality_residual"] = out_res.max_equality_residual;
    doc["min_schur_eig"] = out_res.min_block_eig;

    std::string human = "objective (ED):  " + std::to_string(obj_ed) +
                        "\nobjective (EDR): " + std::to_string(obj_edr) +
                        "\nmax equality residual: " + std::to_string(out_res.max_equality_residual) +
                        "\nmin Schur eigenvalue: " + std::to_string(out_res.min_block_eig) + "\n";
    emit(doc, flags, human);
    return out_res.feasible(1e-6, 1e-8) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"copodual: linear copositive programming duality toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string input;
    std::string solution_path;
    std::string ed_path;

    auto* check = app.add_subcommand("check-cop", "test a symmetric matrix for copositivity");
    check->add_option("matrix", input, "matrix JSON file")->required();
    flags.attach(check);

    auto* find = app.add_subcommand("find-immobile", "detect normalized immobile indices");
    find->add_option("program", input, "program JSON file")->required();
    flags.attach(find);

    auto* build = app.add_subcommand("build-dual", "construct the extended dual solution");
    build->add_option("program", input, "program JSON file")->required();
    flags.attach(build);

    auto* verify = app.add_subcommand("verify", "verify a stored dual solution against a program");
    verify->add_option("program", input, "program JSON file")->required();
    verify->add_option("--solution", solution_path, "extended dual JSON file")->required();
    flags.attach(verify);

    auto* conv = app.add_subcommand("sdp-convert", "convert an SDP extended dual to regularized form");
    conv->add_option("program", input, "SDP program JSON file")->required();
    conv->add_option("--ed", ed_path, "ED solution JSON file")->required();
    flags.attach(conv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (check->parsed()) return cmd_check_cop(input, flags);
        if (find->parsed()) return cmd_find_immobile(input, flags);
        if (build->parsed()) return cmd_build_dual(input, flags);
        if (verify->parsed()) return cmd_verify(input, solution_path, flags);
        if (conv->parsed()) return cmd_sdp_convert(input, ed_path, flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
