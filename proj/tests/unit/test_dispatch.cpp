#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "capprice/common/error.hpp"
#include "capprice/dispatch/kkt.hpp"
#include "capprice/dispatch/lower_level.hpp"
#include "capprice/solver/branch_bound.hpp"
#include "dispatch_oracle.hpp"

using namespace capprice;
using namespace capprice::dispatch;

namespace {

model::ProsumerAssets flat_member(std::vector<double> demand) {
    model::ProsumerAssets a;
    a.pv_kw.assign(demand.size(), 0.0);
    a.demand_kw = std::move(demand);
    return a;
}

}  // namespace

TEST(LowerLp, InflexibleMemberBuysDemand) {
    const auto a = flat_member({1.0, 1.0});
    const LowerResult r = solve_member(a, {2.0, 2.0}, 75.0);
    EXPECT_NEAR(r.dispatch.objective, 4.0, 1e-12);
    EXPECT_NEAR(r.dispatch.p_plus()[0], 1.0, 1e-12);
    EXPECT_NEAR(r.dispatch.p_plus()[1], 1.0, 1e-12);
    EXPECT_EQ(r.dispatch.shed()[0], 0.0);
}

TEST(LowerLp, BatteryShiftsToCheapHour) {
    auto a = flat_member({1.0, 1.0});
    a.p_bat_kw = 1.0;
    a.e_bat_kwh = 1.0;
    const std::vector<double> price{1.0, 3.0};
    const LowerResult r = solve_member(a, price, 75.0);
    EXPECT_NEAR(r.dispatch.objective, 2.0, 1e-12);
    EXPECT_NEAR(r.dispatch.p_plus()[0], 2.0, 1e-12);
    EXPECT_NEAR(r.dispatch.p_plus()[1], 0.0, 1e-12);
    EXPECT_NEAR(r.dispatch.energy()[0], 1.0, 1e-12);
    EXPECT_NEAR(r.dispatch.energy()[1], 0.0, 1e-12);
    // Enumerating battery actions on the half-unit grid gives the same minimum.
    EXPECT_NEAR(capprice::testing::dispatch_oracle(a, price, 75.0, 0.5), 2.0, 1e-12);
    const double pay = payment_identity(a, r.duals, r.dispatch.shed(), 75.0);
    EXPECT_NEAR(pay, 2.0, 1e-9);
}

TEST(LowerLp, DimensionsAndZeroedAssets) {
    model::ProsumerAssets a;
    a.demand_kw.assign(24, 1.0);
    a.pv_kw.assign(24, 0.5);
    a.p_bat_kw = 2.0;
    a.e_bat_kwh = 5.0;
    a.sigma = 0.3;
    const LowerLp lp = build_lower_lp(a, std::vector<double>(24, 1.0), 75.0);
    EXPECT_EQ(lp.ir.num_vars(), 8 * 24);
    EXPECT_EQ(lp.ir.num_rows(), 4 * 24);  // balance, storage, two reactive links

    auto z = flat_member({1.0, 2.0});
    z.sigma = 0.0;
    const LowerResult r = solve_member(z, {1.0, 1.0}, 75.0);
    for (int t = 0; t < 2; ++t) {
        EXPECT_NEAR(r.dispatch.p_plus()[t], z.demand_kw[t], 1e-12);
        EXPECT_EQ(r.dispatch.q_plus()[t], 0.0);
        EXPECT_EQ(r.dispatch.q_minus()[t], 0.0);
        EXPECT_EQ(r.dispatch.p_ch()[t], 0.0);
    }
}

TEST(LowerLp, ReactiveFollowsActive) {
    auto a = flat_member({2.0});
    a.sigma = 0.25;
    const LowerResult r = solve_member(a, {1.0}, 75.0);
    EXPECT_NEAR(r.dispatch.q_plus()[0], 0.5, 1e-12);
}

TEST(LowerLp, ShedTieHasUniqueCost) {
    const auto a = flat_member({1.0, 2.0});
    const LowerResult r = solve_member(a, {75.0, 1.0}, 75.0);
    EXPECT_NEAR(r.dispatch.objective, 75.0 + 2.0, 1e-9);
}

TEST(PaymentIdentity, ZeroMemberPaysNothing) {
    const auto a = flat_member({0.0, 0.0});
    const LowerResult r = solve_member(a, {3.0, 4.0}, 75.0);
    EXPECT_NEAR(payment_identity(a, r.duals, r.dispatch.shed(), 75.0), 0.0, 1e-12);
}

TEST(PaymentIdentity, FullShedNetsToZeroTrade) {
    const auto a = flat_member({1.0, 2.0});
    const LowerResult r = solve_member(a, {80.0, 90.0}, 75.0);
    EXPECT_NEAR(r.dispatch.shed()[0], 1.0, 1e-12);
    EXPECT_NEAR(r.dispatch.shed()[1], 2.0, 1e-12);
    EXPECT_NEAR(r.dispatch.p_plus()[0] - r.dispatch.p_minus()[0], 0.0, 1e-12);
    EXPECT_NEAR(payment_identity(a, r.duals, r.dispatch.shed(), 75.0), 0.0, 1e-9);
}

TEST(PaymentIdentity, StaleDualsRejected) {
    auto a = flat_member({1.0, 1.0});
    const LowerResult r = solve_member(a, {2.0, 2.0}, 75.0);
    DualSolution bad = r.duals;
    bad.mu[11][0] = -1.0;
    EXPECT_THROW(payment_identity(a, bad, r.dispatch.shed(), 75.0), StaleDualsError);
    bad = r.duals;
    bad.mu[7][0] = 5.0;
    EXPECT_THROW(payment_identity(a, bad, {1.0, 0.0}, 75.0), StaleDualsError);
}

TEST(LowerLp, RandomStrongDualityAndIdentity) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const auto m = capprice::testing::random_member(rng);
        const LowerResult r = solve_member(m.assets, m.price, m.alpha_shed);
        double shed_cost = 0.0, trade = 0.0;
        for (std::size_t t = 0; t < m.price.size(); ++t) {
            shed_cost += m.alpha_shed * r.dispatch.shed()[t];
            trade += m.price[t] * (r.dispatch.p_plus()[t] - r.dispatch.p_minus()[t]);
        }
        const double primal = r.dispatch.objective;
        EXPECT_NEAR(primal, r.dual_objective, 1e-6 * (1.0 + std::abs(primal))) << "trial " << trial;
        const double pay = payment_identity(m.assets, r.duals, r.dispatch.shed(), m.alpha_shed);
        EXPECT_NEAR(trade, pay, 1e-6 * (1.0 + std::abs(pay))) << "trial " << trial;
        EXPECT_NEAR(primal, trade + shed_cost, 1e-9 * (1.0 + std::abs(primal)));
    }
}

TEST(LowerLp, MonotoneInPriceWithoutAssets) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        model::ProsumerAssets a = flat_member({u(rng), u(rng), u(rng), u(rng)});
        std::vector<double> price{u(rng), u(rng), u(rng), u(rng)};
        const double base = solve_member(a, price, 4.0).dispatch.objective;
        for (std::size_t t = 0; t < price.size(); ++t) {
            auto p = price;
            p[t] += 0.3;
            EXPECT_GE(solve_member(a, p, 4.0).dispatch.objective, base - 1e-12);
        }
    }
}

TEST(Kkt, PairCountAndStationarityRowsForBatteryFreeMember) {
    solver::ModelIR ir;
    const int T = 5;
    std::vector<int> price;
    for (int t = 0; t < T; ++t) price.push_back(ir.add_var("x" + std::to_string(t), 0.0, 75.0));
    const auto a = flat_member({1, 1, 1, 1, 1});
    const KktBlock k = emit_kkt(ir, a, price, 75.0, "m0.", default_kkt_bounds(a, 75.0, 75.0));
    EXPECT_EQ(k.pairs.size(), 12u * T);
    int stationarity = 0;
    for (const auto& r : ir.rows()) stationarity += r.tag == "kkt.stationarity";
    EXPECT_EQ(stationarity, 8 * T);
    for (int t = 0; t < T; ++t) {
        EXPECT_EQ(ir.var(k.primal[PCh][static_cast<std::size_t>(t)]).ub, 0.0);
        EXPECT_EQ(ir.var(k.primal[Energy][static_cast<std::size_t>(t)]).ub, 0.0);
    }
}

TEST(Kkt, LpSolutionSatisfiesEmittedBlock) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = capprice::testing::random_member(rng);
        solver::ModelIR ir;
        std::vector<int> price;
        for (std::size_t t = 0; t < m.price.size(); ++t)
            price.push_back(ir.add_var("x" + std::to_string(t), m.price[t], m.price[t]));
        const KktBlock k = emit_kkt(ir, m.assets, price, m.alpha_shed, "m.",
                                    default_kkt_bounds(m.assets, m.alpha_shed, 10.0));
        const LowerResult r = solve_member(m.assets, m.price, m.alpha_shed);
        std::vector<double> x(static_cast<std::size_t>(ir.num_vars()), 0.0);
        for (std::size_t t = 0; t < m.price.size(); ++t) x[static_cast<std::size_t>(price[t])] = m.price[t];
        fill_kkt_point(k, m.assets, r.dispatch, r.duals, x);
        EXPECT_LE(ir.max_linear_violation(x), 1e-7) << "trial " << trial;
        for (const auto& [mu, v] : k.pairs)
            EXPECT_LE(std::min(x[static_cast<std::size_t>(mu)], x[static_cast<std::size_t>(v)]), 1e-7)
                << ir.var(mu).name << " trial " << trial;
    }
}

TEST(Kkt, AnyKktPointAttainsLpOptimum) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const auto m = capprice::testing::random_member(rng, 3);
        solver::ModelIR ir;
        std::vector<int> price;
        for (std::size_t t = 0; t < m.price.size(); ++t)
            price.push_back(ir.add_var("x" + std::to_string(t), m.price[t], m.price[t]));
        const KktBlock k = emit_kkt(ir, m.assets, price, m.alpha_shed, "m.",
                                    default_kkt_bounds(m.assets, m.alpha_shed, 10.0));
        for (std::size_t p = 0; p < k.pairs.size(); ++p)
            ir.add_sos1("c" + std::to_string(p), {k.pairs[p].first, k.pairs[p].second});
        // Steer the search toward an arbitrary KKT point.
        std::uniform_real_distribution<double> w(-1.0, 1.0);
        for (int j = 0; j < ir.num_vars(); ++j) ir.var(j).cost = w(rng);
        const solver::SolveResult s = solver::branch_and_bound_sos1(ir);
        ASSERT_TRUE(s.has_solution()) << "trial " << trial;
        double cost = 0.0;
        for (std::size_t t = 0; t < m.price.size(); ++t) {
            const auto at = [&](int f) { return s.x[static_cast<std::size_t>(k.primal[static_cast<std::size_t>(f)][t])]; };
            cost += m.price[t] * (at(PPlus) - at(PMinus)) + m.alpha_shed * at(Shed);
        }
        const double lp = solve_member(m.assets, m.price, m.alpha_shed).dispatch.objective;
        EXPECT_NEAR(cost, lp, 1e-6 * (1.0 + std::abs(lp))) << "trial " << trial;
    }
}

TEST(LowerLp, MatchesDiscretizedOracle) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = capprice::testing::random_member(rng);
        const double lp = solve_member(m.assets, m.price, m.alpha_shed).dispatch.objective;
        const double oracle = capprice::testing::dispatch_oracle(m.assets, m.price, m.alpha_shed, 0.125);
        EXPECT_GE(oracle, lp - 1e-9);
        EXPECT_NEAR(oracle, lp, 1e-4 * (1.0 + std::abs(lp))) << "trial " << trial;
    }
}
