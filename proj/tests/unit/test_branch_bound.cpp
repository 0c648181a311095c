#include <gtest/gtest.h>

#include <random>

#include "capprice/solver/branch_bound.hpp"

using namespace capprice::solver;

TEST(LpRelaxation, OneVariable) {
    ModelIR ir;
    const int x = ir.add_var("x", 0.0, kInf, 1.0);
    ir.add_row("r", Sense::Ge, {{x, 1.0}}, 3.0);
    const SolveResult r = solve_lp_relaxation(ir);
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_NEAR(r.objective, 3.0, 1e-12);
}

TEST(LpRelaxation, ContradictoryFixingsAreInfeasible) {
    ModelIR ir;
    const int a = ir.add_var("a", 1.0, 5.0, 1.0);
    const int b = ir.add_var("b", 1.0, 5.0, 1.0);
    ir.add_sos1("pair", {a, b});
    EXPECT_EQ(solve_lp_relaxation(ir, Fixings{{a}}).status, SolveStatus::Infeasible);
    EXPECT_EQ(branch_and_bound_sos1(ir).status, SolveStatus::Infeasible);
}

TEST(BranchBound, SlackPairSemantics) {
    ModelIR ir;
    const int wp = ir.add_var("w+", 0.0, 10.0, 1.0);
    const int wm = ir.add_var("w-", 0.0, 10.0, 1.0);
    ir.add_row("ir", Sense::Eq, {{wp, 1.0}, {wm, -1.0}}, -1.0);
    ir.add_sos1("pair", {wp, wm});
    const SolveResult r = branch_and_bound_sos1(ir);
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_NEAR(r.x[static_cast<std::size_t>(wm)], 1.0, 1e-12);
    EXPECT_EQ(r.x[static_cast<std::size_t>(wp)], 0.0);
    EXPECT_GE(r.gap, 0.0);
}

TEST(BranchBound, SatisfiedRootNeedsOneNode) {
    ModelIR ir;
    const int a = ir.add_var("a", 0.0, 4.0, -1.0);
    const int b = ir.add_var("b", 0.0, 4.0, 1.0);
    ir.add_sos1("pair", {a, b});
    const SolveResult r = branch_and_bound_sos1(ir);
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_EQ(r.nodes, 1);
    EXPECT_NEAR(r.objective, -4.0, 1e-12);
}

namespace {

// Random complementarity-constrained LP: maximize weighted pairs under shared capacity.
ModelIR random_sos_model(std::mt19937_64& rng, int pairs) {
    std::uniform_real_distribution<double> u(0.5, 3.0);
    ModelIR ir;
    std::vector<Term> cap;
    for (int k = 0; k < pairs; ++k) {
        const int a = ir.add_var("a" + std::to_string(k), 0.0, u(rng), -u(rng));
        const int b = ir.add_var("b" + std::to_string(k), 0.0, u(rng), -u(rng));
        ir.add_sos1("p" + std::to_string(k), {a, b});
        cap.push_back({a, u(rng)});
        cap.push_back({b, u(rng)});
    }
    ir.add_row("cap", Sense::Le, cap, pairs * 1.5);
    return ir;
}

double enumerate_best(const ModelIR& ir) {
    const int pairs = static_cast<int>(ir.sos1().size());
    double best = kInf;
    for (long mask = 0; mask < (1L << pairs); ++mask) {
        Fixings f;
        for (int k = 0; k < pairs; ++k) f.zero.push_back(ir.sos1()[k].members[(mask >> k) & 1]);
        const SolveResult r = solve_lp_relaxation(ir, f);
        if (r.status == SolveStatus::Optimal) best = std::min(best, r.objective);
    }
    return best;
}

}  // namespace

TEST(BranchBound, MatchesEnumerationAndBoundsAreMonotone) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ModelIR ir = random_sos_model(rng, 6);
        std::vector<NodeTrace> traces;
        BranchBoundOptions opt;
        opt.trace = [&](const NodeTrace& t) { traces.push_back(t); };
        const SolveResult r = branch_and_bound_sos1(ir, opt);
        ASSERT_EQ(r.status, SolveStatus::Optimal);
        EXPECT_NEAR(r.objective, enumerate_best(ir), 1e-6);
        EXPECT_LE(ir.max_sos1_violation(r.x), 1e-8);
        EXPECT_LE(ir.max_linear_violation(r.x), 1e-8);
        for (const NodeTrace& t : traces) {
            if (t.pruned_by_bound) continue;
            // Best-first pops the global lower bound; it never passes the optimum.
            EXPECT_LE(t.parent_bound, r.objective + 1e-7 * (1.0 + std::abs(r.objective)));
            if (t.bound == kInf) continue;
            EXPECT_GE(t.bound, t.parent_bound - 1e-9);
        }
    }
}

TEST(BranchBound, NodeLimitReportsLimit) {
    std::mt19937_64 rng(3);
    const ModelIR ir = random_sos_model(rng, 10);
    BranchBoundOptions opt;
    opt.node_limit = 2;
    const SolveResult r = branch_and_bound_sos1(ir, opt);
    EXPECT_EQ(r.status, SolveStatus::Limit);
    EXPECT_EQ(r.nodes, 2);
}
