#include "copodual/dam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace copodual {

void DataSet::validate() const {
    int p = -1;
    auto check_point = [&](const SimplexPoint& t) {
        if (p < 0) p = t.dim();
        if (t.dim() != p) throw std::invalid_argument("DataSet: mixed dimensions");
    };
    for (const auto& d : delta_items) {
        check_point(d.tau);
        if (!(d.gamma > 0.0)) throw std::invalid_argument("DataSet: gamma must be positive");
    }
    for (const auto& b : base_items) {
        check_point(b.tau);
        if (!(b.gamma > 0.0)) throw std::invalid_argument("DataSet: gamma must be positive");
        if (b.lambda.size() != p) throw std::invalid_argument("DataSet: lambda dimension mismatch");
        if (b.lambda.minCoeff() < 0.0) throw std::invalid_argument("DataSet: lambda must be nonnegative");
    }
}

std::vector<int> support(const SimplexPoint& tau) {
    std::vector<int> s;
    for (int k = 0; k < tau.dim(); ++k) {
        if (tau[k] > kSupportEps) s.push_back(k);
    }
    return s;
}

namespace {

bool support_subset(const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace

SeparationResult separation_holds(const DataSet& data) {
    std::vector<std::vector<int>> base_supp;
    base_supp.reserve(data.base_items.size());
    for (const auto& b : data.base_items) base_supp.push_back(support(b.tau));

    for (size_t s = 0; s < data.delta_items.size(); ++s) {
        const std::vector<int> ds = support(data.delta_items[s].tau);
        for (size_t i = 0; i < data.base_items.size(); ++i) {
            if (support_subset(base_supp[i], ds)) {
                return {false, static_cast<int>(s), static_cast<int>(i)};
            }
        }
    }
    return {true, -1, -1};
}

double compute_theta(const SimplexPoint& tau_s0, const SimplexPoint& tau_i0) {
    if (tau_s0.dim() != tau_i0.dim()) throw std::invalid_argument("compute_theta: dimension mismatch");
    double theta = std::numeric_limits<double>::infinity();
    for (int k = 0; k < tau_i0.dim(); ++k) {
        if (tau_i0[k] <= kSupportEps) continue;
        if (tau_s0[k] <= kSupportEps) {
            throw std::invalid_argument("compute_theta: support of tau_i0 not inside support of tau_s0");
        }
        theta = std::min(theta, tau_s0[k] / tau_i0[k]);
    }
    if (!std::isfinite(theta) || theta <= 0.0) {
        throw std::invalid_argument("compute_theta: empty support");
    }
    if (theta >= 1.0 - 1e-12) {
        throw std::runtime_error("compute_theta: theta not below 1 (corrupted upstream state)");
    }
    return theta;
}

DataSet dam_step(const DataSet& data, int s0, int i0) {
    if (s0 < 0 || s0 >= static_cast<int>(data.delta_items.size()) || i0 < 0 ||
        i0 >= static_cast<int>(data.base_items.size())) {
        throw std::invalid_argument("dam_step: index out of range");
    }
    const auto& ds = data.delta_items[static_cast<size_t>(s0)];
    const auto& bi = data.base_items[static_cast<size_t>(i0)];
    if (!support_subset(support(bi.tau), support(ds.tau))) {
        throw std::invalid_argument("dam_step: pair does not violate the separation condition");
    }
    const double theta = compute_theta(ds.tau, bi.tau);

    Eigen::VectorXd tau_bar = (ds.tau.coords() - theta * bi.tau.coords()) / (1.0 - theta);
    // the ratio-minimizing component vanishes exactly
    for (int k = 0; k < tau_bar.size(); ++k) {
        if (bi.tau[k] > kSupportEps && std::abs(ds.tau[k] - theta * bi.tau[k]) < 1e-14) {
            tau_bar(k) = 0.0;
        }
    }
    DataSet out = data;
    auto& new_delta = out.delta_items[static_cast<size_t>(s0)];
    auto& new_base = out.base_items[static_cast<size_t>(i0)];
    new_delta.tau = SimplexPoint(tau_bar);
    new_base.lambda =
        bi.lambda + 2.0 * ds.gamma * theta * (1.0 - theta) * new_delta.tau.coords();
    new_base.gamma = bi.gamma + ds.gamma * theta * theta;
    new_delta.gamma = ds.gamma * (1.0 - theta) * (1.0 - theta);
    return out;
}

DamResult run_dam(const DataSet& data, int max_steps) {
    data.validate();
    DamResult res;
    res.data = data;
    if (max_steps <= 0) {
        const int p = data.delta_items.empty()
                          ? (data.base_items.empty() ? 1 : data.base_items[0].tau.dim())
                          : data.delta_items[0].tau.dim();
        const double cap = static_cast<double>(data.delta_items.size()) *
                           static_cast<double>(std::max<size_t>(1, data.base_items.size())) *
                           std::pow(2.0, p);
        max_steps = static_cast<int>(std::min(cap, 1e7)) + 1;
    }

    while (true) {
        const SeparationResult sep = separation_holds(res.data);
        if (sep.holds) return res;
        if (res.steps >= max_steps) {
            throw std::runtime_error("run_dam: step cap exceeded (nontermination defect)");
        }
        res.data = dam_step(res.data, sep.s0, sep.i0);
        ++res.steps;

        if (!res.data.base_items.empty()) {
            std::vector<Eigen::VectorXd> hull;
            hull.reserve(res.data.base_items.size());
            for (const auto& b : res.data.base_items) hull.push_back(b.tau.coords());
            const auto& moved = res.data.delta_items[static_cast<size_t>(sep.s0)].tau;
            if (dist_to_hull(moved.coords(), hull) <= 1e-9) ++res.hull_warnings;
        }
    }
}

double bilinear_sum(const DataSet& data, const SymMatrix& a) {
    double total = 0.0;
    for (const auto& d : data.delta_items) {
        total += d.gamma * quad_form(a, d.tau.coords());
    }
    for (const auto& b : data.base_items) {
        total += b.gamma * quad_form(a, b.tau.coords());
        total += b.lambda.dot(a.mat() * b.tau.coords());
    }
    return total;
}

} // namespace copodual
