#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "builders.hpp"
#include "capprice/scenario/baselines.hpp"

using namespace capprice;
using namespace capprice::scenario;
using capprice::testing::add_battery;
using capprice::testing::flat_instance;

TEST(CapacityCurve, WorkedExamples) {
    const std::vector<double> spot{1, 2, 3};
    const std::vector<double> residual{4, 4, 4};
    EXPECT_EQ(gen_capacity_curve(spot, residual, 1.0), (std::vector<double>{8, 4, 0}));
    EXPECT_EQ(gen_capacity_curve(spot, residual, 0.5), (std::vector<double>{6, 4, 2}));
    EXPECT_EQ(gen_capacity_curve({5, 1, 9, 2}, {3, 1, -2, 6}, 0.0), (std::vector<double>(4, 2.5)));
}

TEST(CapacityCurve, RejectsBadInputs) {
    EXPECT_THROW(gen_capacity_curve({2, 2, 2}, {1, 1, 1}, 0.5), std::invalid_argument);
    EXPECT_NO_THROW(gen_capacity_curve({2, 2, 2}, {1, 1, 1}, 0.0));
    EXPECT_THROW(gen_capacity_curve({1, 2}, {1, 1, 1}, 0.5), std::invalid_argument);
    EXPECT_THROW(gen_capacity_curve({1, 2}, {1, 1}, 1.5), std::invalid_argument);
}

TEST(CapacityCurve, AnchorsAndAffinity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> price(0.1, 4.0);
    std::uniform_real_distribution<double> load(-1.0, 6.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int T = 2 + trial % 23;
        std::vector<double> spot, residual;
        for (int t = 0; t < T; ++t) {
            spot.push_back(price(rng));
            residual.push_back(load(rng));
        }
        double base = 0.0;
        for (double r : residual) base += std::max(0.0, r);
        base /= T;
        const auto full = gen_capacity_curve(spot, residual, 1.0);
        const auto none = gen_capacity_curve(spot, residual, 0.0);
        const auto hi = std::max_element(spot.begin(), spot.end()) - spot.begin();
        const auto lo = std::min_element(spot.begin(), spot.end()) - spot.begin();
        EXPECT_NEAR(full[static_cast<std::size_t>(hi)], 0.0, 1e-12);
        EXPECT_NEAR(full[static_cast<std::size_t>(lo)], 2.0 * base, 1e-12);
        EXPECT_NEAR(*std::min_element(full.begin(), full.end()), 0.0, 1e-12);
        EXPECT_NEAR(*std::max_element(full.begin(), full.end()), 2.0 * base, 1e-12);
        for (double c : none) EXPECT_NEAR(c, base, 1e-12);
        for (double v : {0.25, 0.5, 0.8}) {
            const auto mid = gen_capacity_curve(spot, residual, v);
            for (int t = 0; t < T; ++t) {
                const auto ts = static_cast<std::size_t>(t);
                EXPECT_NEAR(mid[ts], (1 - v) * none[ts] + v * full[ts], 1e-12);
            }
        }
    }
}

TEST(NoDr, EmptyCommunityCostsNothing) {
    auto inst = flat_instance(2, 4, 0.0);
    const auto r = baseline_no_dr(inst);
    for (int t = 0; t < 4; ++t) EXPECT_EQ(r.import_kw[static_cast<std::size_t>(t)], 0.0);
    EXPECT_EQ(r.total_cost, 0.0);
}

TEST(NoDr, PenaltyExactlyWhereResidualExceedsCap) {
    auto inst = flat_instance(2, 4);
    inst.contract.p_cap_kw = {3, 3, 1.5, 1};
    inst.contract.alpha_dso = {20, 20, 20, 20};
    const auto r = baseline_no_dr(inst);
    EXPECT_EQ(r.penalty_kw, (std::vector<double>{0, 0, 0.5, 1}));
    // 2 kW at price 1 each hour plus penalty 20 * 1.5.
    EXPECT_NEAR(r.total_cost, 8.0 + 30.0, 1e-12);
}

TEST(NoDr, SurplusHourExportsWithoutPenalty) {
    auto inst = flat_instance(1, 2);
    inst.prosumers[0].pv_kw = {3.0, 0.0};
    inst.contract.p_cap_kw = {0.0, 5.0};
    inst.contract.y_ex = {0.1, 0.1};
    const auto r = baseline_no_dr(inst);
    EXPECT_NEAR(r.export_kw[0], 2.0, 1e-12);
    EXPECT_EQ(r.import_kw[0], 0.0);
    EXPECT_EQ(r.penalty_kw[0], 0.0);
    EXPECT_NEAR(r.cost_dkk[0], -2.0 * 0.9, 1e-12);
}

TEST(Uncoordinated, FlatMemberMatchesNoDr) {
    auto inst = flat_instance(1, 6, 1.5);
    inst.contract.y_im.assign(6, 0.3);
    const auto u = baseline_uncoordinated(inst);
    const auto n = baseline_no_dr(inst);
    for (int t = 0; t < 6; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        EXPECT_NEAR(u.community.import_kw[ts], n.import_kw[ts], 1e-9);
        EXPECT_NEAR(u.community.cost_dkk[ts], n.cost_dkk[ts], 1e-9);
    }
}

TEST(Uncoordinated, BatteriesChargeTogetherInTheCheapHour) {
    auto inst = flat_instance(2, 6);
    add_battery(inst.prosumers[0], 2.0, 4.0);
    add_battery(inst.prosumers[1], 1.0, 2.0, 0.9, 1.0);
    inst.prices.spot = {3, 3, 3, 0.5, 3, 3};
    const auto u = baseline_uncoordinated(inst);
    for (const auto& d : u.dispatch) EXPECT_GT(d.p_ch()[3], 0.0);
    const auto& imp = u.community.import_kw;
    EXPECT_EQ(std::max_element(imp.begin(), imp.end()) - imp.begin(), 3);
}

TEST(Uncoordinated, ProRataCurtailment) {
    auto inst = flat_instance(2, 1);
    inst.prosumers[0].demand_kw = {4.0};
    inst.prosumers[1].demand_kw = {2.0};
    inst.network.p_grid_kw = 5.0;  // aggregate 6 = 1.2 x limit
    const auto u = baseline_uncoordinated(inst);
    EXPECT_NEAR(u.curtailed_kw[0][0], 4.0 / 6.0, 1e-12);
    EXPECT_NEAR(u.curtailed_kw[1][0], 2.0 / 6.0, 1e-12);
    EXPECT_NEAR(u.community.import_kw[0], 5.0, 1e-12);
    EXPECT_NEAR(u.community.shed_kw[0], 1.0, 1e-12);
    EXPECT_NEAR(u.shed_cost[0], 75.0 * 4.0 / 6.0, 1e-9);
}

TEST(Uncoordinated, CurtailmentConservesEnergy) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> load(0.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = flat_instance(3, 4);
        for (auto& a : inst.prosumers)
            for (auto& d : a.demand_kw) d = load(rng);
        inst.prosumers[1].pv_kw = {load(rng), 0, load(rng), 0};
        inst.network.p_grid_kw = 3.0;
        const auto u = baseline_uncoordinated(inst);
        for (std::size_t t = 0; t < 4; ++t) {
            double net = 0.0;
            double cut = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                net += u.dispatch[i].p_plus()[t] - u.dispatch[i].p_minus()[t];
                cut += u.curtailed_kw[i][t];
            }
            EXPECT_NEAR(cut, std::max(0.0, net - 3.0), 1e-12);
            EXPECT_LE(u.community.import_kw[t], 3.0 + 1e-12);
        }
    }
}

TEST(ExternalCost, InflexibleMemberOverADay) {
    auto inst = flat_instance(1, 24);
    inst.prices.spot.assign(24, 1.6);
    inst.contract.y_im.assign(24, 0.4);
    EXPECT_NEAR(compute_c_ext(inst)[0], 48.0, 1e-9);
}

TEST(ExternalCost, PenaltyFreeRunEqualsStandaloneCost) {
    auto inst = flat_instance(2, 5);
    add_battery(inst.prosumers[0], 1.0, 2.0);
    inst.prices.spot = {1, 3, 0.5, 2, 1};
    inst.contract.y_im = {0.2, 0.2, 0.2, 0.4, 0.4};
    inst.contract.y_ex.assign(5, 0.05);
    const auto c_ext = compute_c_ext(inst);
    for (std::size_t i = 0; i < 2; ++i) {
        std::vector<double> buy, sell;
        for (std::size_t t = 0; t < 5; ++t) {
            buy.push_back(inst.prices.spot[t] + inst.contract.y_im[t]);
            sell.push_back(inst.prices.spot[t] - inst.contract.y_ex[t]);
        }
        const double own = dispatch::solve_member(inst.prosumers[i], buy, 75.0, sell).dispatch.objective;
        EXPECT_NEAR(c_ext[i], own, 1e-9);
    }
}

TEST(ExternalCost, PenaltySharedByDemand) {
    auto inst = flat_instance(2, 2);
    inst.prosumers[0].demand_kw = {1.0, 1.0};
    inst.prosumers[1].demand_kw = {3.0, 3.0};
    inst.contract.p_cap_kw = {2.0, 4.0};
    inst.contract.alpha_dso = {10.0, 10.0};
    const auto c = compute_c_ext(inst);
    // Penalty 2 kW x 10 in hour 1, split 1:3.
    EXPECT_NEAR(c[0], 2.0 + 5.0, 1e-9);
    EXPECT_NEAR(c[1], 6.0 + 15.0, 1e-9);
    const auto u = baseline_uncoordinated(inst);
    EXPECT_NEAR(c[0] + c[1], u.community.total_cost, 1e-9);
}

TEST(ExternalCost, ZeroSharesRejected) {
    auto inst = flat_instance(2, 2, 0.0);
    EXPECT_THROW(compute_c_ext(inst), std::invalid_argument);
}
