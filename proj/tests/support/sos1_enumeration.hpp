#pragma once

// Exhaustive search over SOS1 dichotomies. A node is cut only when its LP is
// infeasible or when its LP optimum already satisfies every set (then it is
// the best point of the whole subtree). No bound-based pruning.

#include <cmath>
#include <limits>
#include <vector>

#include "capprice/solver/model_ir.hpp"
#include "capprice/solver/polyhedral.hpp"
#include "capprice/solver/simplex.hpp"

namespace capprice::testing {

struct EnumerationResult {
    double best = std::numeric_limits<double>::infinity();
    long leaves = 0;
    long lps = 0;
};

class Sos1Enumerator {
public:
    explicit Sos1Enumerator(const solver::ModelIR& ir, int cone_segments = 32)
        : model_(solver::polyhedralize(ir, cone_options(cone_segments))),
          lp_(solver::LpProblem::from_linear_model(model_)),
          simplex_(lp_) {}

    EnumerationResult run() {
        result_ = {};
        std::vector<double> ub = lp_.ub;
        visit(ub);
        return result_;
    }

private:
    static solver::PolyhedralOptions cone_options(int k) {
        solver::PolyhedralOptions o;
        o.cone_segments = k;
        return o;
    }

    void visit(std::vector<double>& ub) {
        ++result_.lps;
        const auto sol = simplex_.solve(lp_.lb, ub);
        if (sol.status != solver::LpStatus::Optimal) return;
        for (const auto& s : model_.sos1()) {
            const auto a = static_cast<std::size_t>(s.members[0]);
            const auto b = static_cast<std::size_t>(s.members[1]);
            if (std::min(std::abs(sol.x[a]), std::abs(sol.x[b])) <= 1e-9) continue;
            for (std::size_t side : {a, b}) {
                const double saved = ub[side];
                ub[side] = 0.0;
                visit(ub);
                ub[side] = saved;
            }
            return;
        }
        ++result_.leaves;
        result_.best = std::min(result_.best, sol.objective);
    }

    solver::ModelIR model_;
    solver::LpProblem lp_;
    solver::BoundedSimplex simplex_;
    EnumerationResult result_;
};

}  // namespace capprice::testing
