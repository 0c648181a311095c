// One PASS/FAIL line per acceptance criterion. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "builders.hpp"
#include "capprice/bilevel/assembly.hpp"
#include "capprice/harness/run.hpp"
#include "capprice/scenario/baselines.hpp"
#include "desk.hpp"
#include "dispatch_oracle.hpp"
#include "sos1_enumeration.hpp"
#include "temp_dir.hpp"

using namespace capprice;

namespace {

using solver::kInf;

constexpr int kRandomMembers = 200;
constexpr double kOracleStep = 0.125;
constexpr double kOracleRelTol = 1e-4;
constexpr double kOracleSeconds = 10.0;
constexpr double kPaymentRelTol = 1e-6;
constexpr double kEnumerationTol = 1e-6;
constexpr double kBranchBoundSeconds = 120.0;
constexpr double kBudgetRelTol = 1e-6;
constexpr double kExclusivityTol = 1e-8;
constexpr double kCapTol = 1e-6;
constexpr double kSweepSeconds = 1800.0;
constexpr double kRegularizerWeight = 1e-6;
constexpr double kCostIncreaseLimit = 0.05;
constexpr double kFlowRoundingTol = 1e-9;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string fix(double v, int d = 2) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", d, v);
    return buf;
}

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
    std::printf("criterion %2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void guarded(int id, const std::string& title, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, title, false, std::string("exception: ") + e.what());
    }
}

struct MemberCase {
    testing::RandomMember member;
    dispatch::LowerResult result;
};

std::vector<MemberCase> random_members() {
    std::mt19937_64 rng(2024);
    std::vector<MemberCase> out;
    for (int k = 0; k < kRandomMembers; ++k) {
        MemberCase c;
        c.member = testing::random_member(rng, 6);
        out.push_back(std::move(c));
    }
    return out;
}

void criterion_oracle(std::vector<MemberCase>& cases) {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int below = 0;
    for (auto& c : cases) {
        const auto& m = c.member;
        c.result = dispatch::solve_member(m.assets, m.price, m.alpha_shed);
        const double lp = c.result.dispatch.objective;
        const double coarse = testing::dispatch_oracle(m.assets, m.price, m.alpha_shed, kOracleStep);
        const double fine = testing::dispatch_oracle(m.assets, m.price, m.alpha_shed, kOracleStep / 2);
        // The oracle searches a subset of the feasible set, so it can never beat the LP.
        if (coarse < lp - 1e-9 || fine < lp - 1e-9) ++below;
        worst = std::max(worst, std::abs(std::min(coarse, fine) - lp) / std::max(1.0, std::abs(lp)));
    }
    const double elapsed = seconds_since(start);
    report(1, "lower-level oracle equivalence", worst <= kOracleRelTol && below == 0 && elapsed < kOracleSeconds,
           std::to_string(cases.size()) + " members, max rel err " + sci(worst) + ", oracle below LP " +
               std::to_string(below) + ", " + fix(elapsed) + " s (limits " + sci(kOracleRelTol) + ", " +
               fix(kOracleSeconds, 0) + " s)");
}

void criterion_payment(const std::vector<MemberCase>& cases) {
    double worst = 0.0;
    for (const auto& c : cases) {
        const auto& m = c.member;
        const auto& d = c.result.dispatch;
        double payment = 0.0;
        for (std::size_t t = 0; t < m.price.size(); ++t) payment += m.price[t] * (d.p_plus()[t] - d.p_minus()[t]);
        const double identity = dispatch::payment_identity(m.assets, c.result.duals, d.shed(), m.alpha_shed);
        worst = std::max(worst, std::abs(payment - identity) / (1.0 + std::abs(payment)));
    }
    report(2, "strong-duality payment identity", worst <= kPaymentRelTol,
           std::to_string(cases.size()) + " members, max scaled residual " + sci(worst) + " (limit " +
               sci(kPaymentRelTol) + ")");
}

model::Instance one_member(int horizon) {
    model::Instance inst = testing::flat_instance(1, horizon);
    testing::add_battery(inst.prosumers[0], 1.0, 1.5, 0.9, 0.95);
    std::vector<double> spot{0.4, 2.0, 0.8, 2.6};
    spot.resize(static_cast<std::size_t>(horizon), 1.0);
    inst.prices.spot = spot;
    inst.contract.y_im.assign(static_cast<std::size_t>(horizon), 0.2);
    inst.contract.y_ex.assign(static_cast<std::size_t>(horizon), 0.05);
    return scenario::apply_scenario(inst, 1.0, 0.6);
}

std::vector<bilevel::PricingOutcome> criterion_enumeration() {
    std::vector<std::pair<std::string, model::Instance>> cases;
    for (int T = 1; T <= 4; ++T) cases.emplace_back("2 members T=" + std::to_string(T), testing::two_member(T));
    cases.emplace_back("1 member T=4", one_member(4));
    double worst_gap = 0.0;
    double slowest = 0.0;
    bool all_optimal = true;
    std::string detail;
    std::vector<bilevel::PricingOutcome> accepted;
    for (const auto& [name, inst] : cases) {
        const auto c_ext = scenario::compute_c_ext(inst);
        const bilevel::Assembly a = bilevel::assemble_single_level(inst, c_ext);
        auto opt = bilevel::native_options(inst.config);
        opt.stop_gap = 0.0;
        const auto r = solver::branch_and_bound_sos1(a.ir, opt);
        all_optimal = all_optimal && r.status == solver::SolveStatus::Optimal;
        testing::Sos1Enumerator oracle(a.ir, inst.config.cone_segments);
        const auto e = oracle.run();
        const double diff = std::abs(r.objective - e.best);
        worst_gap = std::max(worst_gap, diff);
        slowest = std::max(slowest, r.wall_seconds);
        detail += name + " diff " + sci(diff) + " (" + std::to_string(r.nodes) + " nodes, " +
                  std::to_string(e.leaves) + " leaves); ";
        if (r.has_solution()) accepted.push_back(bilevel::extract_outcome(inst, a, r));
    }
    report(3, "branch-and-bound matches dichotomy enumeration",
           all_optimal && worst_gap <= kEnumerationTol && slowest < kBranchBoundSeconds,
           detail + "max diff " + sci(worst_gap) + ", slowest solve " + fix(slowest) + " s (limits " +
               sci(kEnumerationTol) + ", " + fix(kBranchBoundSeconds, 0) + " s)");
    return accepted;
}

harness::CaseResult solve_desk(model::DistributionMode mode, double gamma) {
    model::Instance inst = testing::desk_instance();
    inst.config.mode = mode;
    inst.config.gamma = gamma;
    return harness::solve_case(inst);
}

void criterion_economics(const std::vector<const harness::CaseResult*>& runs) {
    double worst_budget = 0.0;
    double worst_ir = 0.0;
    double worst_excl = 0.0;
    bool all_solved = true;
    for (const auto* r : runs) {
        if (!r->outcome.has_solution()) {
            all_solved = false;
            continue;
        }
        const auto* b = r->report.find("budget-balance");
        worst_budget = std::max(worst_budget, b->residual / (1.0 + std::abs(r->outcome.community_cost)));
        const auto& s = r->outcome.settlement;
        double plus = 0.0, minus = 0.0;
        for (std::size_t i = 0; i < s.ids.size(); ++i) {
            worst_ir = std::max(worst_ir, std::abs(s.payment[i] - s.c_ext[i] - s.w_plus[i] + s.w_minus[i]));
            plus += s.w_plus[i];
            minus += s.w_minus[i];
        }
        worst_excl = std::max(worst_excl, std::min(plus, minus));
    }
    report(4, "economic properties", all_solved && worst_budget <= kBudgetRelTol && worst_ir == 0.0 &&
                                         worst_excl <= kExclusivityTol,
           std::to_string(runs.size()) + " desk runs, budget " + sci(worst_budget) + " (limit " +
               sci(kBudgetRelTol) + "), individual rationality " + sci(worst_ir) + " (exact), min(sum w+, sum w-) " +
               sci(worst_excl) + " (limit " + sci(kExclusivityTol) + ")");
}

void criterion_delivery(const harness::CaseResult& r) {
    const auto& inst = r.instance;
    double tariff = 0.0, penalty = kInf;
    for (int t = 0; t < inst.horizon(); ++t) {
        tariff = std::max(tariff, inst.contract.y_im[static_cast<std::size_t>(t)]);
        penalty = std::min(penalty, inst.contract.alpha_dso[static_cast<std::size_t>(t)]);
    }
    double worst = -kInf;
    int unc_over = 0;
    for (int t = 0; t < inst.horizon(); ++t) {
        const auto ts = static_cast<std::size_t>(t);
        worst = std::max(worst, r.coordinated.import_kw[ts] - r.coordinated.cap_kw[ts]);
        if (r.uncoordinated.import_kw[ts] > r.uncoordinated.cap_kw[ts] + kCapTol) ++unc_over;
    }
    report(5, "capacity-service delivery", r.outcome.has_solution() && worst <= kCapTol && unc_over >= 1,
           "max coordinated import over cap " + sci(worst) + " kW (limit " + sci(kCapTol) + "), uncoordinated over cap in " +
               std::to_string(unc_over) + " hours, penalty/tariff ratio " + fix(penalty / tariff, 1));
}

void criterion_benefit(const harness::CaseResult& r) {
    const auto& st = r.stats;
    const bool pass = r.outcome.has_solution() && r.outcome.community_cost <= r.uncoordinated.total_cost &&
                      st.total_benefit > 0.0 && st.total_loss <= kExclusivityTol;
    report(6, "benefit positivity", pass,
           "coordinated " + fix(r.outcome.community_cost, 4) + " DKK vs uncoordinated " +
               fix(r.uncoordinated.total_cost, 4) + " DKK, sum w- " + fix(st.total_benefit, 4) + ", sum w+ " +
               sci(st.total_loss));
}

void criterion_sweep() {
    auto config = harness::parse_config(std::string(CAPPRICE_DATA_DIR) + "/desk/desk.cfg");
    config.beta_grid = {0.0, 0.3, 0.6, 0.9};
    config.variation_grid = {0.5, 0.75, 1.0};
    const auto start = std::chrono::steady_clock::now();
    const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto s = harness::sweep_heatmap(config, jobs);
    const double elapsed = seconds_since(start);
    bool solved = true;
    for (const auto& c : s.cells) solved = solved && c.status == "pass";
    int checked = 0, bad = 0;
    for (const auto& t : s.trends) {
        const bool relevant = (t.axis == "beta" && t.fixed == 1.0) || (t.axis == "variation" && t.fixed == 0.6);
        if (!relevant) continue;
        ++checked;
        if (!t.ok) ++bad;
    }
    report(7, "heatmap trend", solved && checked == 5 && bad == 0 && elapsed < kSweepSeconds,
           std::to_string(s.cells.size()) + " cells solved, " + std::to_string(checked) + " axis steps checked, " +
               std::to_string(bad) + " rises beyond the certified gap, all-grid monotone " +
               (s.monotone() ? "yes" : "no") + ", " + fix(elapsed, 1) + " s (limit " + fix(kSweepSeconds, 0) + " s)");
}

void criterion_distribution(const harness::CaseResult& none, const harness::CaseResult& equal,
                            const harness::CaseResult& prop) {
    const double base = none.outcome.community_cost;
    const double eq_rise = (equal.outcome.community_cost - base) / std::abs(base);
    const double pr_rise = (prop.outcome.community_cost - base) / std::abs(base);
    const bool pass = none.outcome.has_solution() && equal.outcome.has_solution() && prop.outcome.has_solution() &&
                      equal.stats.variance < none.stats.variance &&
                      prop.stats.proportional_deviation < none.stats.proportional_deviation &&
                      eq_rise <= kCostIncreaseLimit && pr_rise <= kCostIncreaseLimit;
    report(8, "distribution mechanisms", pass,
           "gamma " + sci(kRegularizerWeight) + ", variance " + sci(none.stats.variance) + " -> " +
               sci(equal.stats.variance) + ", share deviation " + sci(none.stats.proportional_deviation) + " -> " +
               sci(prop.stats.proportional_deviation) + ", cost rise " + sci(eq_rise) + " / " + sci(pr_rise) +
               " (limit " + fix(kCostIncreaseLimit, 2) + ")");
}

network::NodeInjections injections_of(const model::Instance& inst, const bilevel::PricingOutcome& o) {
    std::vector<std::vector<double>> mp, mq;
    for (const auto& d : o.dispatch) {
        mp.emplace_back();
        mq.emplace_back();
        for (int t = 0; t < d.horizon(); ++t) {
            const auto ts = static_cast<std::size_t>(t);
            mp.back().push_back(d.p_plus()[ts] - d.p_minus()[ts]);
            mq.back().push_back(d.q_plus()[ts] - d.q_minus()[ts]);
        }
    }
    return network::node_injections(inst.network, inst.horizon(), mp, mq);
}

std::set<std::string> failing(const model::Instance& inst, const network::CommunityState& s,
                              const network::NodeInjections& inj) {
    std::set<std::string> names;
    for (const auto& v : network::check_flow_feasibility(inst.network, s, kFlowRoundingTol, &inj)) names.insert(v.check);
    return names;
}

void criterion_network(const std::vector<std::pair<model::Instance, bilevel::PricingOutcome>>& accepted,
                       const harness::CaseResult& desk) {
    int clean = 0;
    for (const auto& [inst, o] : accepted)
        if (failing(inst, o.state, injections_of(inst, o)).empty()) ++clean;

    const auto& inst = desk.instance;
    const auto inj = injections_of(inst, desk.outcome);
    const auto& good = desk.outcome.state;
    int flipped = 0;
    std::string wrong;
    auto fault = [&](const std::string& expect, const std::function<void(network::CommunityState&)>& mutate) {
        network::CommunityState s = good;
        mutate(s);
        const auto got = failing(inst, s, inj);
        if (got == std::set<std::string>{expect}) ++flipped;
        else wrong += " " + expect;
    };
    fault("root-balance", [](auto& s) { s.p_im[0] += 1.0; });
    fault("trade-nonnegative", [](auto& s) { s.p_pen[0] = -1.0; });
    fault("voltage-drop", [](auto& s) { s.u[2][0] += 0.02; });
    fault("voltage-anchor", [](auto& s) {
        for (auto& node : s.u) node[0] += 0.01;
    });
    report(9, "network soundness", clean == static_cast<int>(accepted.size()) && flipped == 4,
           std::to_string(clean) + "/" + std::to_string(accepted.size()) +
               " accepted states pass the exact cone at " + sci(kFlowRoundingTol) + ", " + std::to_string(flipped) +
               "/4 faults flip exactly their check" + (wrong.empty() ? "" : " (wrong:" + wrong + ")"));
}

void criterion_prices(const std::vector<std::pair<model::Instance, bilevel::PricingOutcome>>& accepted,
                      const std::vector<const harness::CaseResult*>& desk_runs) {
    double worst = -kInf;
    for (const auto& [inst, o] : accepted)
        for (const auto& row : o.prices.x)
            for (double x : row) worst = std::max(worst, x - inst.contract.alpha_shed);

    testing::TempDir dir;
    std::vector<std::filesystem::path> dirs;
    for (std::size_t k = 0; k < desk_runs.size(); ++k) {
        dirs.push_back(dir / ("run" + std::to_string(k)));
        harness::write_case(*desk_runs[k], dirs.back());
    }
    const auto table = harness::report_prices(dirs);
    const std::string csv = harness::format_price_table_csv(table);
    std::istringstream in(csv);
    std::string header, line;
    std::getline(in, header);
    bool format_ok =
        header == "prosumer_id,none_mean,none_min,none_max,equal_mean,equal_min,equal_max,proportional_mean,"
                  "proportional_min,proportional_max";
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        format_ok = format_ok && std::count(line.begin(), line.end(), ',') == 9;
    }
    for (const auto& r : table.rows)
        for (std::size_t k = 0; k < r.mean.size(); ++k)
            format_ok = format_ok && r.min[k] <= r.mean[k] + 1e-12 && r.mean[k] <= r.max[k] + 1e-12;
    format_ok = format_ok && rows == desk_runs.front()->instance.members();
    report(10, "price cap and price table", worst <= 0.0 && format_ok,
           "max price minus shed cost " + fix(worst, 4) + " DKK/kWh over " + std::to_string(accepted.size()) +
               " solutions, table rows " + std::to_string(rows) + " with mean/min/max per mode " +
               (format_ok ? "ok" : "malformed"));
}

}  // namespace

int main() {
    std::vector<MemberCase> members;
    guarded(1, "lower-level oracle equivalence", [&] {
        members = random_members();
        criterion_oracle(members);
    });
    guarded(2, "strong-duality payment identity", [&] { criterion_payment(members); });

    std::vector<std::pair<model::Instance, bilevel::PricingOutcome>> accepted;
    guarded(3, "branch-and-bound matches dichotomy enumeration", [&] {
        std::vector<model::Instance> insts;
        for (int T = 1; T <= 4; ++T) insts.push_back(testing::two_member(T));
        insts.push_back(one_member(4));
        const auto outcomes = criterion_enumeration();
        for (std::size_t k = 0; k < outcomes.size() && k < insts.size(); ++k) accepted.emplace_back(insts[k], outcomes[k]);
    });

    harness::CaseResult none, equal, prop;
    bool desk_ok = false;
    try {
        none = solve_desk(model::DistributionMode::None, 0.0);
        equal = solve_desk(model::DistributionMode::Equal, kRegularizerWeight);
        prop = solve_desk(model::DistributionMode::Proportional, kRegularizerWeight);
        desk_ok = true;
    } catch (const std::exception& e) {
        for (int id : {4, 5, 6, 8, 9, 10}) report(id, "desk solves", false, std::string("exception: ") + e.what());
    }
    if (desk_ok) {
        const std::vector<const harness::CaseResult*> runs{&none, &equal, &prop};
        for (const auto* r : runs)
            if (r->outcome.has_solution()) accepted.emplace_back(r->instance, r->outcome);
        guarded(4, "economic properties", [&] { criterion_economics(runs); });
        guarded(5, "capacity-service delivery", [&] { criterion_delivery(none); });
        guarded(6, "benefit positivity", [&] { criterion_benefit(none); });
        guarded(7, "heatmap trend", [&] { criterion_sweep(); });
        guarded(8, "distribution mechanisms", [&] { criterion_distribution(none, equal, prop); });
        guarded(9, "network soundness", [&] { criterion_network(accepted, none); });
        guarded(10, "price cap and price table", [&] { criterion_prices(accepted, runs); });
    } else {
        guarded(7, "heatmap trend", [&] { criterion_sweep(); });
    }
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
