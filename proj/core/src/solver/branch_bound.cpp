#include "capprice/solver/branch_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

namespace capprice::solver {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::FeasibleGap: return "feasible-bound-gap";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Limit: return "limit";
    }
    return "unknown";
}

namespace {

double set_violation(const Sos1Set& s, const std::vector<double>& x) {
    double sum = 0.0;
    double largest = 0.0;
    for (int j : s.members) {
        const double v = std::abs(x[static_cast<std::size_t>(j)]);
        sum += v;
        largest = std::max(largest, v);
    }
    return sum - largest;
}

struct OpenNode {
    double bound = -kInf;
    int depth = 0;
    int preference = 0;
    long id = 0;
    long parent = -1;
    std::vector<int> zero;
    std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
    // Best bound first; deeper nodes first on ties, then the preferred child.
    bool operator()(const OpenNode& a, const OpenNode& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        if (a.depth != b.depth) return a.depth < b.depth;
        if (a.preference != b.preference) return a.preference < b.preference;
        return a.id > b.id;
    }
};

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double relative_gap(double objective, double bound) {
    if (!std::isfinite(objective)) return kInf;
    return std::max(0.0, objective - bound) / std::max(1.0, std::abs(objective));
}

}  // namespace

int most_violated_sos1(const ModelIR& ir, const std::vector<double>& x, double tol) {
    int best = -1;
    double worst = tol;
    for (std::size_t k = 0; k < ir.sos1().size(); ++k) {
        const double v = set_violation(ir.sos1()[k], x);
        if (v > worst) {
            worst = v;
            best = static_cast<int>(k);
        }
    }
    return best;
}

SolveResult solve_lp_relaxation(const ModelIR& ir, const Fixings& fixings,
                                const BranchBoundOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const bool linear = ir.cones().empty() && ir.quads().empty();
    const ModelIR lin = linear ? ModelIR{} : polyhedralize(ir, options.polyhedral);
    const ModelIR& model = linear ? ir : lin;
    const LpProblem lp = LpProblem::from_linear_model(model);
    BoundedSimplex spx(lp, options.lp);
    std::vector<double> ub = lp.ub;
    for (int j : fixings.zero) ub[static_cast<std::size_t>(j)] = std::min(ub[static_cast<std::size_t>(j)], 0.0);
    const LpSolution sol = spx.solve(lp.lb, ub, nullptr);

    SolveResult out;
    out.nodes = 1;
    if (sol.status == LpStatus::Optimal) {
        out.status = SolveStatus::Optimal;
        out.x = sol.x;
        out.objective = sol.objective;
        out.bound = sol.objective;
        out.gap = 0.0;
    } else if (sol.status == LpStatus::Infeasible) {
        out.status = SolveStatus::Infeasible;
    } else {
        out.status = SolveStatus::Limit;
    }
    out.wall_seconds = elapsed(start);
    return out;
}

SolveResult branch_and_bound_sos1(const ModelIR& ir, const BranchBoundOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const bool linear = ir.cones().empty() && ir.quads().empty();
    const ModelIR lin = linear ? ModelIR{} : polyhedralize(ir, options.polyhedral);
    const ModelIR& model = linear ? ir : lin;
    const LpProblem lp = LpProblem::from_linear_model(model);
    BoundedSimplex spx(lp, options.lp);

    std::vector<double> incumbent;
    double incumbent_obj = kInf;
    auto cutoff = [&]() {
        if (!std::isfinite(incumbent_obj)) return kInf;
        return incumbent_obj - options.abs_gap - options.rel_gap * std::abs(incumbent_obj);
    };

    std::priority_queue<OpenNode, std::vector<OpenNode>, NodeOrder> open;
    long next_id = 0;
    open.push(OpenNode{-kInf, 0, 0, next_id++, -1, {}, nullptr});

    long nodes = 0;
    bool budget_hit = false;
    bool stopped_on_gap = false;
    bool lp_trouble = false;
    std::vector<double> ub_node;

    while (!open.empty()) {
        if (nodes >= options.node_limit || elapsed(start) >= options.time_limit_seconds) {
            budget_hit = true;
            break;
        }
        if (options.stop_gap > 0.0 && std::isfinite(incumbent_obj) &&
            relative_gap(incumbent_obj, open.top().bound) <= options.stop_gap) {
            stopped_on_gap = true;
            break;
        }
        OpenNode node = open.top();
        open.pop();

        NodeTrace trace{node.id, node.parent, node.depth, node.bound, kInf, false};
        if (node.bound >= cutoff()) {
            trace.pruned_by_bound = true;
            if (options.trace) options.trace(trace);
            continue;
        }

        ub_node = lp.ub;
        bool contradictory = false;
        for (int j : node.zero) {
            const auto u = static_cast<std::size_t>(j);
            if (lp.lb[u] > 0.0) contradictory = true;
            ub_node[u] = std::min(ub_node[u], 0.0);
        }
        ++nodes;
        if (contradictory) {
            if (options.trace) options.trace(trace);
            continue;
        }
        LpSolution sol = spx.solve(lp.lb, ub_node, node.basis.get());
        if (sol.status != LpStatus::Optimal) {
            if (sol.status != LpStatus::Infeasible) lp_trouble = true;
            if (options.trace) options.trace(trace);
            continue;
        }
        trace.bound = sol.objective;
        if (sol.objective >= cutoff()) {
            trace.pruned_by_bound = true;
            if (options.trace) options.trace(trace);
            continue;
        }
        if (options.trace) options.trace(trace);

        const int k = most_violated_sos1(model, sol.x, options.sos1_tol);
        if (k < 0) {
            incumbent = std::move(sol.x);
            incumbent_obj = sol.objective;
            continue;
        }

        const Sos1Set& set = model.sos1()[static_cast<std::size_t>(k)];
        const std::size_t half = (set.members.size() + 1) / 2;
        double left_mass = 0.0;
        double right_mass = 0.0;
        for (std::size_t p = 0; p < set.members.size(); ++p) {
            const double v = std::abs(sol.x[static_cast<std::size_t>(set.members[p])]);
            (p < half ? left_mass : right_mass) += v;
        }
        auto basis = std::make_shared<const Basis>(std::move(sol.basis));
        for (int side = 0; side < 2; ++side) {
            OpenNode child;
            child.bound = sol.objective;
            child.depth = node.depth + 1;
            child.id = next_id++;
            child.parent = node.id;
            child.zero = node.zero;
            const std::size_t begin = side == 0 ? 0 : half;
            const std::size_t end = side == 0 ? half : set.members.size();
            for (std::size_t p = begin; p < end; ++p) child.zero.push_back(set.members[p]);
            // Zeroing the lighter half disturbs the parent solution least.
            const double mass = side == 0 ? left_mass : right_mass;
            const double other = side == 0 ? right_mass : left_mass;
            child.preference = mass <= other ? 1 : 0;
            child.basis = basis;
            open.push(std::move(child));
        }
    }

    SolveResult out;
    out.nodes = nodes;
    double bound = incumbent_obj;
    if (!open.empty()) bound = std::min(bound, open.top().bound);
    out.bound = bound;

    if (!incumbent.empty() && options.polish) {
        std::vector<double> ub = lp.ub;
        for (const Sos1Set& s : model.sos1()) {
            int keep = s.members.front();
            for (int j : s.members)
                if (incumbent[static_cast<std::size_t>(j)] > incumbent[static_cast<std::size_t>(keep)]) keep = j;
            for (int j : s.members)
                if (j != keep) ub[static_cast<std::size_t>(j)] = std::min(ub[static_cast<std::size_t>(j)], 0.0);
        }
        LpSolution polished = spx.solve(lp.lb, ub, nullptr);
        if (polished.status == LpStatus::Optimal &&
            polished.objective <= incumbent_obj + options.abs_gap + options.rel_gap * std::abs(incumbent_obj) &&
            most_violated_sos1(model, polished.x, options.sos1_tol) < 0) {
            incumbent = std::move(polished.x);
            incumbent_obj = std::min(incumbent_obj, polished.objective);
        }
    }

    if (!incumbent.empty()) {
        out.x = std::move(incumbent);
        out.objective = incumbent_obj;
        out.bound = std::min(out.bound, incumbent_obj);
        out.gap = relative_gap(incumbent_obj, out.bound);
        if (budget_hit || lp_trouble) out.status = SolveStatus::Limit;
        else if (stopped_on_gap) out.status = SolveStatus::FeasibleGap;
        else out.status = SolveStatus::Optimal;
    } else {
        out.status = (budget_hit || lp_trouble) ? SolveStatus::Limit : SolveStatus::Infeasible;
    }
    out.wall_seconds = elapsed(start);
    return out;
}

}  // namespace capprice::solver
