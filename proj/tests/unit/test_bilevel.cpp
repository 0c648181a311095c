#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "builders.hpp"
#include "capprice/bilevel/pricing.hpp"
#include "capprice/common/error.hpp"
#include "capprice/scenario/baselines.hpp"
#include "sos1_enumeration.hpp"

using namespace capprice;
using namespace capprice::bilevel;
using capprice::testing::add_battery;
using capprice::testing::flat_instance;
using capprice::testing::two_member;

namespace {

model::Instance single_node(int horizon) {
    model::Instance inst = flat_instance(1, horizon);
    inst.network.nodes.resize(1);
    inst.prosumers[0].node = 0;
    model::finalize(inst.network, inst.prosumers);
    return inst;
}

}  // namespace

TEST(Assembly, DimensionAuditForOneBatteryFreeMember) {
    const auto inst = single_node(1);
    const Assembly a = assemble_single_level(inst, {1.0});
    // Prices, cap and its epigraph; 28 block columns; 7 feeder; penalty;
    // two slacks and two aggregates.
    EXPECT_EQ(a.ir.num_vars(), 3 + 28 + 7 + 1 + 2 + 2);
    EXPECT_EQ(a.ir.num_rows(), 1 + 8 + 8 + 5 + 1 + 1 + 1 + 2);
    EXPECT_EQ(a.ir.sos1().size(), 12u + 1u);
    EXPECT_EQ(a.ir.quads().size(), 1u);
    EXPECT_EQ(a.ir.cones().size(), 0u);
}

TEST(Assembly, PairCountScalesWithMembersAndPeriods) {
    const auto inst = two_member(3);
    const Assembly a = assemble_single_level(inst, {0.0, 0.0});
    EXPECT_EQ(a.ir.sos1().size(), 12u * 3u * 2u + 1u);
    EXPECT_EQ(a.ir.cones().size(), 2u * 3u);
    EXPECT_THROW(assemble_single_level(inst, {0.0}), std::invalid_argument);
}

TEST(Assembly, FullDiscountRemovesInternalTariff) {
    auto inst = two_member(2);
    inst.contract.beta.assign(2, 1.0);
    const Assembly a = assemble_single_level(inst, {0.0, 0.0});
    for (const auto& b : a.blocks)
        for (int j : b.primal[dispatch::PPlus]) EXPECT_EQ(a.ir.var(j).cost, 0.0);
    inst.contract.beta.assign(2, 0.5);
    const Assembly half = assemble_single_level(inst, {0.0, 0.0});
    EXPECT_NEAR(half.ir.var(half.blocks[0].primal[dispatch::PPlus][0]).cost, 0.15, 1e-15);
}

TEST(Assembly, ZeroPenaltyIgnoresTheCap) {
    auto inst = two_member(2);
    inst.contract.alpha_dso.assign(2, 0.0);
    inst.contract.p_cap_kw.assign(2, 0.0);
    const Assembly a = assemble_single_level(inst, scenario::compute_c_ext(inst));
    for (int j : a.p_pen) EXPECT_EQ(a.ir.var(j).cost, 0.0);
    int penalty_rows = 0;
    for (const auto& r : a.ir.rows()) penalty_rows += r.tag == "upper.penalty";
    EXPECT_EQ(penalty_rows, 2);
    const auto out = extract_outcome(inst, a, solver::branch_and_bound_sos1(a.ir, native_options(inst.config)));
    ASSERT_TRUE(out.has_solution());
    EXPECT_GT(out.state.p_im[0] + out.state.p_im[1], 1.0);
}

TEST(Pricing, EconomicIdentitiesHoldAtTheSolution) {
    const auto inst = two_member(4);
    const auto c_ext = scenario::compute_c_ext(inst);
    const auto out = solve_pricing(inst, c_ext);
    ASSERT_TRUE(out.has_solution());
    EXPECT_LE(out.solve.gap, inst.config.gap_tol);
    const auto& s = out.settlement;
    double paid = 0.0;
    for (std::size_t i = 0; i < s.ids.size(); ++i) {
        EXPECT_EQ(s.payment[i] - s.c_ext[i] - s.w_plus[i] + s.w_minus[i], 0.0);
        paid += s.payment[i];
    }
    double shed = 0.0;
    for (const auto& d : out.dispatch) shed += std::accumulate(d.shed().begin(), d.shed().end(), 0.0);
    const double without_shed = out.community_cost - inst.contract.alpha_shed * shed;
    EXPECT_NEAR(paid, without_shed, 1e-6 * (1.0 + std::abs(out.community_cost)));
    EXPECT_LE(std::min(s.v_plus, s.v_minus), 1e-8);
    for (const auto& row : out.prices.x)
        for (double x : row) {
            EXPECT_GE(x, -1e-12);
            EXPECT_LE(x, inst.contract.alpha_shed);
            EXPECT_LE(x, out.prices.x_max + 1e-9);
        }
}

TEST(Pricing, EachMemberRespondsOptimallyToItsPrices) {
    const auto inst = two_member(4);
    const auto out = solve_pricing(inst, scenario::compute_c_ext(inst));
    ASSERT_TRUE(out.has_solution());
    for (std::size_t i = 0; i < out.dispatch.size(); ++i) {
        const auto best = dispatch::solve_member(inst.prosumers[i], out.prices.x[i], inst.contract.alpha_shed);
        EXPECT_NEAR(out.dispatch[i].objective, best.dispatch.objective, 1e-6 * (1.0 + std::abs(best.dispatch.objective)));
    }
}

TEST(Pricing, CommunityNeverCostsMoreThanActingAlone) {
    const auto inst = two_member(4);
    const auto unc = scenario::baseline_uncoordinated(inst);
    const auto out = solve_pricing(inst, scenario::compute_c_ext(inst, unc));
    ASSERT_TRUE(out.has_solution());
    EXPECT_LE(out.community_cost, unc.community.total_cost + 1e-6);
}

TEST(Pricing, BranchAndBoundMatchesDichotomyEnumeration) {
    for (int T : {1, 2, 3}) {
        const auto inst = two_member(T);
        const Assembly a = assemble_single_level(inst, scenario::compute_c_ext(inst));
        auto opt = native_options(inst.config);
        opt.stop_gap = 0.0;
        const auto r = solver::branch_and_bound_sos1(a.ir, opt);
        ASSERT_EQ(r.status, solver::SolveStatus::Optimal);
        capprice::testing::Sos1Enumerator oracle(a.ir, inst.config.cone_segments);
        const auto e = oracle.run();
        EXPECT_NEAR(r.objective, e.best, 1e-6) << "T=" << T << " leaves " << e.leaves;
    }
}

TEST(Regularizer, ZeroWeightAddsNothingToTheObjective) {
    auto inst = two_member(2);
    const auto c_ext = scenario::compute_c_ext(inst);
    const Assembly plain = assemble_single_level(inst, c_ext);
    inst.config.mode = model::DistributionMode::Equal;
    inst.config.gamma = 0.0;
    const Assembly eq = assemble_single_level(inst, c_ext);
    EXPECT_EQ(eq.ir.quads().size(), plain.ir.quads().size());
    for (int j = 0; j < plain.ir.num_vars(); ++j) EXPECT_EQ(eq.ir.var(j).cost, plain.ir.var(j).cost);
    for (int j = plain.ir.num_vars(); j < eq.ir.num_vars(); ++j) EXPECT_EQ(eq.ir.var(j).cost, 0.0);
    inst.config.mode = model::DistributionMode::Proportional;
    EXPECT_EQ(assemble_single_level(inst, c_ext).ir.num_vars(), plain.ir.num_vars());
}

TEST(Regularizer, ProportionalPenaltyVanishesOnShares) {
    auto inst = two_member(1);
    inst.config.mode = model::DistributionMode::Proportional;
    inst.config.gamma = 1.0;
    Assembly a = assemble_single_level(inst, {0.0, 0.0});
    a.ir = solver::ModelIR{};
    const int wm0 = a.ir.add_var("wm0", 1, 1), wm1 = a.ir.add_var("wm1", 3, 3);
    const int wp0 = a.ir.add_var("wp0", 0, 0), wp1 = a.ir.add_var("wp1", 0, 0);
    a.w_minus = {wm0, wm1};
    a.w_plus = {wp0, wp1};
    a.slack_box = {10, 10};
    add_proportional_regularizer(a, 1.0, {1.0, 3.0});
    ASSERT_EQ(a.ir.quads().size(), 4u);
    std::vector<double> x(static_cast<std::size_t>(a.ir.num_vars()), 0.0);
    x[0] = 1;
    x[1] = 3;
    for (const auto& q : a.ir.quads()) {
        double arg = q.constant;
        for (const auto& t : q.terms) arg += t.coef * x[static_cast<std::size_t>(t.var)];
        EXPECT_NEAR(arg, 0.0, 1e-15) << q.name;
    }
    EXPECT_THROW(add_proportional_regularizer(a, 1.0, {0.0, 0.0}), std::invalid_argument);
}

TEST(Regularizer, EqualSharesForIdenticalMembers) {
    auto inst = flat_instance(2, 3);
    for (auto& m : inst.prosumers) add_battery(m, 2.0, 2.0);
    inst.prices.spot = {0.5, 1.0, 2.0};
    inst.contract.y_im = {0.3, 0.3, 0.3};
    inst.contract.alpha_dso = {10.0, 10.0, 10.0};
    inst = scenario::apply_scenario(inst, 1.0, 0.6);
    inst.config.mode = model::DistributionMode::Equal;
    inst.config.gamma = 1e-3;
    const auto out = solve_pricing(inst, scenario::compute_c_ext(inst));
    ASSERT_TRUE(out.has_solution());
    EXPECT_NEAR(out.settlement.w_minus[0], out.settlement.w_minus[1], 1e-5);
    EXPECT_GT(out.settlement.v_minus, 0.0);
}

TEST(Pricing, ExternalBackendWithoutCommandFails) {
    auto inst = two_member(1);
    inst.config.backend = model::Backend::External;
    EXPECT_THROW(solve_pricing(inst, scenario::compute_c_ext(inst)), SolverError);
}
