#pragma once

#include <functional>
#include <string>
#include <vector>

#include "capprice/solver/model_ir.hpp"
#include "capprice/solver/polyhedral.hpp"
#include "capprice/solver/simplex.hpp"

namespace capprice::solver {

enum class SolveStatus { Optimal, FeasibleGap, Infeasible, Limit };

const char* to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> x;
    double objective = kInf;
    double bound = -kInf;
    double gap = kInf;
    long nodes = 0;
    double wall_seconds = 0.0;

    bool has_solution() const { return !x.empty(); }
};

/// Bound changes applied on top of the model: listed variables are forced to zero.
struct Fixings {
    std::vector<int> zero;
};

struct NodeTrace {
    long id = 0;
    long parent = -1;
    int depth = 0;
    double parent_bound = -kInf;
    double bound = kInf;  // +inf when the node LP is infeasible
    bool pruned_by_bound = false;
};

struct BranchBoundOptions {
    long node_limit = 500000;
    double time_limit_seconds = 600.0;
    /// Nodes whose bound is within this much of the incumbent are pruned.
    double abs_gap = 1e-7;
    double rel_gap = 1e-7;
    /// Stop early once the certified relative gap drops to this value.
    double stop_gap = 0.0;
    /// Smaller SOS1 members above this count as violated.
    double sos1_tol = 1e-9;
    /// Re-solve the final incumbent with its SOS1 pattern fixed so inactive
    /// members are exactly zero.
    bool polish = true;
    SimplexOptions lp;
    PolyhedralOptions polyhedral;
    std::function<void(const NodeTrace&)> trace;
};

/// LP relaxation with all SOS1 conditions dropped except the fixings.
SolveResult solve_lp_relaxation(const ModelIR& ir, const Fixings& fixings = {},
                                const BranchBoundOptions& options = {});

/// Best-first branch-and-bound over SOS1 sets. Branches on the most violated
/// set, forcing one half of its members to zero in each child.
SolveResult branch_and_bound_sos1(const ModelIR& ir, const BranchBoundOptions& options = {});

/// Most violated SOS1 set at x, or -1 when all are satisfied within tol.
int most_violated_sos1(const ModelIR& ir, const std::vector<double>& x, double tol);

}  // namespace capprice::solver
