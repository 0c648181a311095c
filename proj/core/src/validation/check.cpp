#include "capprice/validation/check.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "capprice/common/csv.hpp"
#include "capprice/common/numfmt.hpp"

namespace capprice::validation {

using dispatch::DispatchSolution;

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* Report::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<std::string> Report::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.pass) out.push_back(c.name);
    return out;
}

namespace {

void add(Report& r, const std::string& name, double residual, double threshold) {
    r.checks.push_back({name, residual, threshold, std::isfinite(residual) && residual <= threshold});
}

double dispatch_violation(const model::ProsumerAssets& a, const DispatchSolution& d) {
    const std::size_t T = a.demand_kw.size();
    double worst = 0.0;
    auto over = [&](double v) { worst = std::max(worst, v); };
    for (std::size_t t = 0; t < T; ++t) {
        for (const auto& fam : d.v) over(-fam[t]);
        over(d.p_ch()[t] - a.p_bat_kw);
        over(d.p_dis()[t] - a.p_bat_kw);
        over(d.energy()[t] - a.e_bat_kwh);
        over(d.shed()[t] - a.demand_kw[t]);
        over(std::abs(d.p_plus()[t] - d.p_minus()[t] + d.shed()[t] - d.p_ch()[t] + d.p_dis()[t] -
                      (a.demand_kw[t] - a.pv_kw[t])));
        const std::size_t prev = (t + T - 1) % T;
        over(std::abs(d.energy()[t] - d.energy()[prev] - a.eta_ch * d.p_ch()[t] + a.eta_dis * d.p_dis()[t]));
        over(std::abs(d.q_plus()[t] - a.sigma * d.p_plus()[t]));
        over(std::abs(d.q_minus()[t] - a.sigma * d.p_minus()[t]));
    }
    return worst;
}

}  // namespace

Report check_solution(const model::Instance& inst, const bilevel::PriceSchedule& prices,
                      const std::vector<DispatchSolution>& dispatch, const network::CommunityState& state,
                      const bilevel::SettlementRecord& settle, double tol) {
    Report r;
    const auto& c = inst.contract;
    const std::size_t I = inst.prosumers.size();
    const std::size_t T = static_cast<std::size_t>(inst.horizon());

    // Payments and the community cost from first principles.
    std::vector<double> payment(I, 0.0);
    std::vector<double> import_sum(T, 0.0), shed_sum(T, 0.0);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t t = 0; t < T; ++t) {
            payment[i] += prices.x[i][t] * (dispatch[i].p_plus()[t] - dispatch[i].p_minus()[t]);
            import_sum[t] += dispatch[i].p_plus()[t];
            shed_sum[t] += dispatch[i].shed()[t];
        }
    double upstream = 0.0;
    double shed_cost = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double lambda = inst.prices.spot[t];
        upstream += state.p_im[t] * (lambda + c.y_im[t]) - state.p_ex[t] * (lambda - c.y_ex[t]) +
                    (1.0 - c.beta[t]) * c.y_im[t] * (import_sum[t] - state.p_im[t]) + c.alpha_dso[t] * state.p_pen[t];
        shed_cost += c.alpha_shed * shed_sum[t];
    }
    const double total_cost = upstream + shed_cost;
    const double paid = std::accumulate(payment.begin(), payment.end(), 0.0);
    add(r, "budget-balance", std::abs(paid - upstream), tol * (1.0 + std::abs(total_cost)));

    double ir = 0.0;
    double recorded = 0.0;
    double negative = 0.0;
    for (std::size_t i = 0; i < I; ++i) {
        ir = std::max(ir, std::abs(payment[i] - settle.c_ext[i] - settle.w_plus[i] + settle.w_minus[i]));
        recorded = std::max(recorded, std::abs(payment[i] - settle.payment[i]));
        negative = std::max({negative, -settle.w_plus[i], -settle.w_minus[i]});
    }
    add(r, "individual-rationality", ir, tol);
    add(r, "settlement-payments", recorded, tol);
    add(r, "slack-nonnegative", negative, tol);
    const double sum_plus = std::accumulate(settle.w_plus.begin(), settle.w_plus.end(), 0.0);
    const double sum_minus = std::accumulate(settle.w_minus.begin(), settle.w_minus.end(), 0.0);
    add(r, "benefit-exclusivity", std::min(sum_plus, sum_minus), 1e-8);

    double pen = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double excess = std::max(0.0, state.p_im[t] - c.p_cap_kw[t]);
        const double gap = state.p_pen[t] - excess;
        pen = std::max(pen, c.alpha_dso[t] > 0.0 ? std::abs(gap) : std::max(0.0, -gap));
    }
    add(r, "penalty-consistency", pen, tol);

    double price = 0.0;
    for (const auto& row : prices.x)
        for (double x : row) price = std::max({price, -x, x - c.alpha_shed, x - prices.x_max});
    add(r, "price-bounds", price, tol);

    std::vector<std::vector<double>> mp(I), mq(I);
    for (std::size_t i = 0; i < I; ++i)
        for (std::size_t t = 0; t < T; ++t) {
            mp[i].push_back(dispatch[i].p_plus()[t] - dispatch[i].p_minus()[t]);
            mq[i].push_back(dispatch[i].q_plus()[t] - dispatch[i].q_minus()[t]);
        }
    const auto inj = network::node_injections(inst.network, inst.horizon(), mp, mq);
    const auto violations = network::check_flow_feasibility(inst.network, state, 0.0, &inj);
    std::map<std::string, double> worst;
    for (const char* family : {"trade-nonnegative", "feeder-active", "feeder-reactive", "root-balance",
                               "flow-aggregation", "voltage-anchor", "voltage-drop", "voltage-bounds",
                               "line-capacity"})
        worst[family] = 0.0;
    for (const auto& v : violations) worst[v.check] = std::max(worst[v.check], v.residual);
    for (const char* family : {"trade-nonnegative", "feeder-active", "feeder-reactive", "root-balance",
                               "flow-aggregation", "voltage-anchor", "voltage-drop", "voltage-bounds",
                               "line-capacity"})
        add(r, std::string("network-") + family, worst[family], tol);

    double feas = 0.0;
    double opt = 0.0;
    for (std::size_t i = 0; i < I; ++i) {
        const auto& a = inst.prosumers[i];
        feas = std::max(feas, dispatch_violation(a, dispatch[i]));
        const auto best = dispatch::solve_member(a, prices.x[i], c.alpha_shed);
        double own = 0.0;
        for (std::size_t t = 0; t < T; ++t)
            own += prices.x[i][t] * (dispatch[i].p_plus()[t] - dispatch[i].p_minus()[t]) +
                   c.alpha_shed * dispatch[i].shed()[t];
        opt = std::max(opt, (own - best.dispatch.objective) / (1.0 + std::abs(best.dispatch.objective)));
    }
    add(r, "dispatch-feasibility", feas, tol);
    add(r, "lower-level-optimality", opt, tol);
    return r;
}

std::string format_report(const Report& r) {
    std::ostringstream out;
    for (const auto& c : r.checks)
        out << c.name << " residual=" << fmt_num(c.residual) << " threshold=" << fmt_num(c.threshold) << " "
            << (c.pass ? "PASS" : "FAIL") << "\n";
    out << "status " << (r.passed() ? "pass" : "fail") << "\n";
    return out.str();
}

void write_report_csv(const Report& r, const std::filesystem::path& path) {
    CsvWriter w(path, {"check_name", "residual", "threshold", "pass"});
    for (const auto& c : r.checks) w.row({c.name, fmt_num(c.residual), fmt_num(c.threshold), c.pass ? "1" : "0"});
}

BenefitStats benefit_stats(const bilevel::SettlementRecord& s) {
    BenefitStats b;
    const auto& w = s.w_minus;
    b.total_benefit = std::accumulate(w.begin(), w.end(), 0.0);
    b.total_loss = std::accumulate(s.w_plus.begin(), s.w_plus.end(), 0.0);
    if (w.empty()) return b;
    const double n = static_cast<double>(w.size());
    b.mean = b.total_benefit / n;
    b.min = *std::min_element(w.begin(), w.end());
    b.max = *std::max_element(w.begin(), w.end());
    for (double v : w) {
        b.shares.push_back(b.total_benefit > 0.0 ? v / b.total_benefit : 0.0);
        if (w.size() > 1) b.variance += (v - b.mean) * (v - b.mean) / (n - 1.0);
    }
    const double dsum = std::accumulate(s.delta.begin(), s.delta.end(), 0.0);
    for (std::size_t i = 0; i < w.size() && i < s.delta.size(); ++i) {
        const double share = dsum != 0.0 ? s.delta[i] / dsum : 0.0;
        const double gap = w[i] - share * b.total_benefit;
        b.proportional_deviation += gap * gap;
    }
    return b;
}

}  // namespace capprice::validation
