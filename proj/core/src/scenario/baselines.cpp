#include "capprice/scenario/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "capprice/common/csv.hpp"
#include "capprice/common/numfmt.hpp"

namespace capprice::scenario {

std::vector<double> gen_capacity_curve(const std::vector<double>& spot,
                                       const std::vector<double>& residual, double v) {
    if (spot.size() != residual.size())
        throw std::invalid_argument("price and residual horizons differ");
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("variation factor outside [0,1]");
    if (spot.empty()) return {};
    double base = 0.0;
    for (double r : residual) base += std::max(0.0, r);
    base /= static_cast<double>(residual.size());
    const auto [lo, hi] = std::minmax_element(spot.begin(), spot.end());
    const double span = *hi - *lo;
    if (v > 0.0 && !(span > 0.0)) throw std::invalid_argument("flat price vector with positive variation");
    std::vector<double> cap;
    for (double p : spot) {
        const double s = v > 0.0 ? 1.0 - 2.0 * (p - *lo) / span : 0.0;
        cap.push_back(std::max(0.0, base * (1.0 + v * s)));
    }
    return cap;
}

model::Instance apply_scenario(const model::Instance& inst, double v, double beta) {
    model::Instance out = inst;
    out.contract.p_cap_kw = gen_capacity_curve(inst.prices.spot, inst.community_residual(), v);
    out.contract.beta.assign(static_cast<std::size_t>(inst.horizon()), beta);
    return out;
}

namespace {

RegimeResult empty_regime(const model::Instance& inst, const char* name) {
    RegimeResult r;
    r.regime = name;
    const auto T = static_cast<std::size_t>(inst.horizon());
    r.import_kw.assign(T, 0.0);
    r.export_kw.assign(T, 0.0);
    r.cap_kw = inst.contract.p_cap_kw;
    r.shed_kw.assign(T, 0.0);
    r.penalty_kw.assign(T, 0.0);
    r.cost_dkk.assign(T, 0.0);
    return r;
}

}  // namespace

RegimeResult baseline_no_dr(const model::Instance& inst) {
    RegimeResult r = empty_regime(inst, "no-dr");
    const auto& c = inst.contract;
    for (int t = 0; t < inst.horizon(); ++t) {
        const auto ts = static_cast<std::size_t>(t);
        double net = 0.0;
        double member_import = 0.0;
        for (const auto& a : inst.prosumers) {
            net += a.demand_kw[ts] - a.pv_kw[ts];
            member_import += std::max(0.0, a.demand_kw[ts] - a.pv_kw[ts]);
        }
        const double lambda = inst.prices.spot[ts];
        r.import_kw[ts] = std::max(0.0, net);
        r.export_kw[ts] = std::max(0.0, -net);
        r.penalty_kw[ts] = std::max(0.0, r.import_kw[ts] - c.p_cap_kw[ts]);
        r.cost_dkk[ts] = r.import_kw[ts] * (lambda + c.y_im[ts]) - r.export_kw[ts] * (lambda - c.y_ex[ts]) +
                         (1.0 - c.beta[ts]) * c.y_im[ts] * (member_import - r.import_kw[ts]) +
                         c.alpha_dso[ts] * r.penalty_kw[ts];
        r.total_cost += r.cost_dkk[ts];
    }
    return r;
}

UncoordinatedResult baseline_uncoordinated(const model::Instance& inst) {
    UncoordinatedResult u;
    u.community = empty_regime(inst, "uncoordinated");
    const auto& c = inst.contract;
    const auto T = static_cast<std::size_t>(inst.horizon());
    std::vector<double> buy(T), sell(T);
    for (std::size_t t = 0; t < T; ++t) {
        buy[t] = inst.prices.spot[t] + c.y_im[t];
        sell[t] = inst.prices.spot[t] - c.y_ex[t];
    }
    for (const auto& a : inst.prosumers)
        u.dispatch.push_back(dispatch::solve_member(a, buy, c.alpha_shed, sell).dispatch);

    const std::size_t I = inst.prosumers.size();
    u.curtailed_kw.assign(I, std::vector<double>(T, 0.0));
    u.energy_cost.assign(I, 0.0);
    u.shed_cost.assign(I, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double net = 0.0;
        double gross = 0.0;
        for (const auto& d : u.dispatch) {
            net += d.p_plus()[t] - d.p_minus()[t];
            gross += d.p_plus()[t];
        }
        const double excess = std::max(0.0, net - inst.network.p_grid_kw);
        double import = std::max(0.0, net);
        double cost_t = 0.0;
        for (std::size_t i = 0; i < I; ++i) {
            const auto& d = u.dispatch[i];
            const double cut = excess > 0.0 ? excess * d.p_plus()[t] / gross : 0.0;
            u.curtailed_kw[i][t] = cut;
            const double energy = buy[t] * (d.p_plus()[t] - cut) - sell[t] * d.p_minus()[t];
            const double shed = c.alpha_shed * (d.shed()[t] + cut);
            u.energy_cost[i] += energy;
            u.shed_cost[i] += shed;
            u.community.shed_kw[t] += d.shed()[t] + cut;
            cost_t += energy + shed;
        }
        import -= excess;
        u.community.import_kw[t] = import;
        u.community.export_kw[t] = std::max(0.0, -net);
        u.community.penalty_kw[t] = std::max(0.0, import - c.p_cap_kw[t]);
        cost_t += c.alpha_dso[t] * u.community.penalty_kw[t];
        u.community.cost_dkk[t] = cost_t;
        u.community.total_cost += cost_t;
    }
    return u;
}

std::vector<double> demand_shares(const model::Instance& inst) {
    std::vector<double> delta;
    for (const auto& a : inst.prosumers) delta.push_back(a.residual_total());
    return delta;
}

std::vector<double> compute_c_ext(const model::Instance& inst, const UncoordinatedResult& u) {
    const std::vector<double> delta = demand_shares(inst);
    const double total = std::accumulate(delta.begin(), delta.end(), 0.0);
    if (total == 0.0) throw std::invalid_argument("demand shares sum to zero");
    double penalty = 0.0;
    for (int t = 0; t < inst.horizon(); ++t)
        penalty += inst.contract.alpha_dso[static_cast<std::size_t>(t)] *
                   u.community.penalty_kw[static_cast<std::size_t>(t)];
    std::vector<double> c_ext;
    for (std::size_t i = 0; i < delta.size(); ++i)
        c_ext.push_back(u.energy_cost[i] + u.shed_cost[i] + delta[i] / total * penalty);
    return c_ext;
}

std::vector<double> compute_c_ext(const model::Instance& inst) {
    return compute_c_ext(inst, baseline_uncoordinated(inst));
}

void write_regime_csv(const RegimeResult& r, const std::filesystem::path& path) {
    CsvWriter w(path, {"t", "import_kw", "cap_kw", "shed_kw", "cost_dkk"});
    for (int t = 0; t < r.horizon(); ++t) {
        const auto ts = static_cast<std::size_t>(t);
        w.row({std::to_string(t + 1), fmt_num(r.import_kw[ts]), fmt_num(r.cap_kw[ts]), fmt_num(r.shed_kw[ts]),
               fmt_num(r.cost_dkk[ts])});
    }
}

}  // namespace capprice::scenario
