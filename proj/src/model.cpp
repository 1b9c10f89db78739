#include "copodual/model.hpp"

#include "copodual/jsonutil.hpp"

#include <fstream>
#include <iostream>

namespace copodual {

void Program::validate() const {
    if (p < 1) throw std::invalid_argument("program: p >= 1 required");
    if (n < 0) throw std::invalid_argument("program: n >= 0 required");
    if (static_cast<int>(a.size()) != n + 1) {
        throw std::invalid_argument("program: expected n+1 constraint matrices");
    }
    if (c.size() != n) throw std::invalid_argument("program: objective length must equal n");
    for (const auto& m : a) {
        if (m.dim() != p) throw std::invalid_argument("program: matrix dimension mismatch");
    }
}

SymMatrix constraint_matrix(const Program& prog, const Eigen::VectorXd& x) {
    if (x.size() != prog.n) throw std::invalid_argument("constraint_matrix: x length must equal n");
    Eigen::MatrixXd m = prog.a[0].mat();
    for (int i = 0; i < prog.n; ++i) m += x(i) * prog.a[static_cast<size_t>(i + 1)].mat();
    return SymMatrix::symmetrized(m);
}

FeasibilityReport feasibility_check(const Program& prog, const Eigen::VectorXd& x,
                                    const SimplexGrid& grid, double tol, int refine_rounds) {
    const SymMatrix ax = constraint_matrix(prog, x);
    const MinQuadResult mq = min_quad_over_simplex(ax, grid, refine_rounds);
    FeasibilityReport rep;
    rep.min_value = mq.value;
    rep.witness = mq.argmin;
    rep.feasible = mq.value >= -tol;
    return rep;
}

namespace {

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    json j;
    in >> j;
    return j;
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SymMatrix checked_symmetric(const Eigen::MatrixXd& m, const std::string& name) {
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-6) {
        throw std::runtime_error(name + ": asymmetry " + std::to_string(asym) + " exceeds 1e-6");
    }
    if (asym > 1e-9) {
        std::cerr << "warning: " << name << " asymmetric by " << asym << ", symmetrizing\n";
    }
    return SymMatrix::symmetrized(m);
}

} // namespace

Program load_program(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    Program prog;
    const std::string kind = j.value("kind", "copositive");
    if (kind == "copositive") {
        prog.kind = ProgramKind::copositive;
    } else if (kind == "sdp") {
        prog.kind = ProgramKind::sdp;
    } else {
        throw std::runtime_error("program: unknown kind '" + kind + "'");
    }
    prog.p = j.at("p").get<int>();
    prog.n = j.at("n").get<int>();
    if (prog.p < 1 || prog.n < 0) throw std::runtime_error("program: bad dimensions");
    prog.c = vector_from_json(j.at("c"));
    if (prog.c.size() != prog.n) throw std::runtime_error("program: c length must equal n");
    const auto& ja = j.at("A");
    if (static_cast<int>(ja.size()) != prog.n + 1) {
        throw std::runtime_error("program: expected n+1 matrices in A");
    }
    for (int i = 0; i <= prog.n; ++i) {
        const Eigen::MatrixXd m = matrix_from_json(ja[static_cast<size_t>(i)], prog.p, prog.p);
        prog.a.push_back(checked_symmetric(m, "A[" + std::to_string(i) + "]"));
    }
    prog.validate();
    return prog;
}

void save_program(const Program& prog, const std::filesystem::path& path) {
    prog.validate();
    json j;
    j["kind"] = prog.kind == ProgramKind::copositive ? "copositive" : "sdp";
    j["p"] = prog.p;
    j["n"] = prog.n;
    j["c"] = vector_to_json(prog.c);
    json a = json::array();
    for (const auto& m : prog.a) a.push_back(matrix_to_json(m.mat()));
    j["A"] = std::move(a);
    write_json_file(j, path);
}

SymMatrix load_matrix(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    const int p = j.at("p").get<int>();
    if (p < 1) throw std::runtime_error("matrix file: p >= 1 required");
    const Eigen::MatrixXd m = matrix_from_json(j.at("entries"), p, p);
    return checked_symmetric(m, "entries");
}

void save_matrix(const SymMatrix& m, const std::filesystem::path& path) {
    json j;
    j["kind"] = "matrix";
    j["p"] = m.dim();
    j["entries"] = matrix_to_json(m.mat());
    write_json_file(j, path);
}

} // namespace copodual
