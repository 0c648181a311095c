#include "capprice/dispatch/kkt.hpp"

#include <algorithm>

namespace capprice::dispatch {

using solver::kInf;
using solver::Sense;
using solver::Term;

KktBounds default_kkt_bounds(const model::ProsumerAssets& a, double alpha_shed, double price_cap) {
    KktBounds b;
    const double eta = a.has_battery() ? std::min(a.eta_ch, a.eta_dis) : 1.0;
    // Storage multipliers scale prices by at most 1/eta per conversion.
    b.dual_box = 4.0 * (alpha_shed + price_cap) / (eta * eta);
    double peak = 0.0;
    for (std::size_t t = 0; t < a.demand_kw.size(); ++t)
        peak = std::max(peak, a.demand_kw[t] + a.pv_kw[t]);
    b.trade_box = peak + 2.0 * a.p_bat_kw + 1.0;
    return b;
}

KktBlock emit_kkt(solver::ModelIR& ir, const model::ProsumerAssets& a, const std::vector<int>& price,
                  double alpha_shed, const std::string& prefix, const KktBounds& bounds) {
    const int T = static_cast<int>(price.size());
    const double M = bounds.dual_box;
    KktBlock k;
    auto name = [&](const std::string& base, int t) {
        return prefix + base + "[" + std::to_string(t) + "]";
    };

    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const double caps[kFamilies] = {bounds.trade_box, bounds.trade_box,
                                        a.sigma * bounds.trade_box, a.sigma * bounds.trade_box,
                                        a.p_bat_kw, a.p_bat_kw, a.e_bat_kwh, a.demand_kw[ts]};
        for (int f = 0; f < kFamilies; ++f)
            k.primal[static_cast<std::size_t>(f)].push_back(ir.add_var(name(family_name(f), t), 0.0, caps[f]));
    }
    for (int t = 0; t < T; ++t) {
        k.lambda1.push_back(ir.add_var(name("lambda1", t), -M, M));
        if (t == 0) {
            k.lambda2 = ir.add_var(prefix + "lambda2", -M, M);
            k.lambda3.push_back(-1);
        } else {
            k.lambda3.push_back(ir.add_var(name("lambda3", t), -M, M));
        }
        k.lambda4.push_back(ir.add_var(name("lambda4", t), -M, M));
        k.lambda5.push_back(ir.add_var(name("lambda5", t), -M, M));
        for (int m = 0; m < 12; ++m)
            k.mu[static_cast<std::size_t>(m)].push_back(ir.add_var(name("mu" + std::to_string(m + 1), t), 0.0, M));
    }
    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const double caps[4] = {a.p_bat_kw, a.p_bat_kw, a.e_bat_kwh, a.demand_kw[ts]};
        const char* names[4] = {"s_ch", "s_dis", "s_e", "s_shed"};
        for (int c = 0; c < 4; ++c)
            k.cap_slack[static_cast<std::size_t>(c)].push_back(ir.add_var(name(names[c], t), 0.0, caps[c]));
    }

    auto P = [&](int f, int t) { return k.primal[static_cast<std::size_t>(f)][static_cast<std::size_t>(t)]; };
    auto MU = [&](int m, int t) { return k.mu[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(t)]; };
    auto storage_mult = [&](int t) { return t == 0 ? k.lambda2 : k.lambda3[static_cast<std::size_t>(t)]; };

    // Primal feasibility.
    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        ir.add_row(name("balance", t), Sense::Eq,
                   {{P(PPlus, t), 1.0}, {P(PMinus, t), -1.0}, {P(Shed, t), 1.0}, {P(PCh, t), -1.0}, {P(PDis, t), 1.0}},
                   a.demand_kw[ts] - a.pv_kw[ts], "kkt.primal");
        const int prev = (t + T - 1) % T;
        std::vector<Term> st{{P(Energy, t), 1.0}};
        if (prev != t) st.push_back({P(Energy, prev), -1.0});
        else st.clear();
        st.push_back({P(PCh, t), -a.eta_ch});
        st.push_back({P(PDis, t), a.eta_dis});
        ir.add_row(name(t == 0 ? "cyclic" : "storage", t), Sense::Eq, std::move(st), 0.0, "kkt.primal");
        ir.add_row(name("react_plus", t), Sense::Eq, {{P(QPlus, t), 1.0}, {P(PPlus, t), -a.sigma}}, 0.0, "kkt.primal");
        ir.add_row(name("react_minus", t), Sense::Eq, {{P(QMinus, t), 1.0}, {P(PMinus, t), -a.sigma}}, 0.0, "kkt.primal");
        ir.add_row(name("cap_ch", t), Sense::Eq, {{P(PCh, t), 1.0}, {k.cap_slack[0][ts], 1.0}}, a.p_bat_kw, "kkt.primal");
        ir.add_row(name("cap_dis", t), Sense::Eq, {{P(PDis, t), 1.0}, {k.cap_slack[1][ts], 1.0}}, a.p_bat_kw, "kkt.primal");
        ir.add_row(name("cap_e", t), Sense::Eq, {{P(Energy, t), 1.0}, {k.cap_slack[2][ts], 1.0}}, a.e_bat_kwh, "kkt.primal");
        ir.add_row(name("cap_shed", t), Sense::Eq, {{P(Shed, t), 1.0}, {k.cap_slack[3][ts], 1.0}}, a.demand_kw[ts],
                   "kkt.primal");
    }

    // Stationarity of the Lagrangian, one row per primal variable.
    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const int l1 = k.lambda1[ts];
        ir.add_row(name("stat_p_plus", t), Sense::Eq,
                   {{price[ts], 1.0}, {l1, 1.0}, {k.lambda4[ts], -a.sigma}, {MU(1, t), -1.0}}, 0.0, "kkt.stationarity");
        ir.add_row(name("stat_p_minus", t), Sense::Eq,
                   {{price[ts], -1.0}, {l1, -1.0}, {k.lambda5[ts], -a.sigma}, {MU(2, t), -1.0}}, 0.0,
                   "kkt.stationarity");
        ir.add_row(name("stat_q_plus", t), Sense::Eq, {{k.lambda4[ts], 1.0}, {MU(3, t), -1.0}}, 0.0, "kkt.stationarity");
        ir.add_row(name("stat_q_minus", t), Sense::Eq, {{k.lambda5[ts], 1.0}, {MU(4, t), -1.0}}, 0.0, "kkt.stationarity");
        ir.add_row(name("stat_p_ch", t), Sense::Eq,
                   {{l1, -1.0}, {storage_mult(t), -a.eta_ch}, {MU(5, t), -1.0}, {MU(9, t), 1.0}}, 0.0,
                   "kkt.stationarity");
        ir.add_row(name("stat_p_dis", t), Sense::Eq,
                   {{l1, 1.0}, {storage_mult(t), a.eta_dis}, {MU(6, t), -1.0}, {MU(10, t), 1.0}}, 0.0,
                   "kkt.stationarity");
        // e_t enters its own storage row with +1 and the next one with -1.
        std::vector<Term> se;
        const int next = (t + 1) % T;
        if (next != t) {
            se.push_back({storage_mult(t), 1.0});
            se.push_back({storage_mult(next), -1.0});
        }
        se.push_back({MU(7, t), -1.0});
        se.push_back({MU(11, t), 1.0});
        ir.add_row(name("stat_e", t), Sense::Eq, std::move(se), 0.0, "kkt.stationarity");
        ir.add_row(name("stat_d_shed", t), Sense::Eq, {{l1, 1.0}, {MU(8, t), -1.0}, {MU(12, t), 1.0}}, -alpha_shed,
                   "kkt.stationarity");
    }

    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        for (int f = 0; f < kFamilies; ++f) k.pairs.emplace_back(MU(f + 1, t), P(f, t));
        for (int c = 0; c < 4; ++c) k.pairs.emplace_back(MU(9 + c, t), k.cap_slack[static_cast<std::size_t>(c)][ts]);
    }
    return k;
}

std::vector<Term> payment_terms(const model::ProsumerAssets& a, const KktBlock& k, double alpha_shed) {
    std::vector<Term> terms;
    for (std::size_t t = 0; t < k.lambda1.size(); ++t) {
        const double resid = a.pv_kw[t] - a.demand_kw[t];
        if (resid != 0.0) terms.push_back({k.lambda1[t], resid});
        if (a.p_bat_kw != 0.0) {
            terms.push_back({k.mu[8][t], -a.p_bat_kw});
            terms.push_back({k.mu[9][t], -a.p_bat_kw});
        }
        if (a.e_bat_kwh != 0.0) terms.push_back({k.mu[10][t], -a.e_bat_kwh});
        if (a.demand_kw[t] != 0.0) terms.push_back({k.mu[11][t], -a.demand_kw[t]});
        terms.push_back({k.primal[Shed][t], -alpha_shed});
    }
    return terms;
}

void fill_kkt_point(const KktBlock& k, const model::ProsumerAssets& a, const DispatchSolution& dsp,
                    const DualSolution& d, std::vector<double>& x) {
    const std::size_t T = k.lambda1.size();
    auto set = [&](int j, double v) { x[static_cast<std::size_t>(j)] = v; };
    for (std::size_t t = 0; t < T; ++t) {
        for (int f = 0; f < kFamilies; ++f) set(k.primal[static_cast<std::size_t>(f)][t], dsp.v[static_cast<std::size_t>(f)][t]);
        set(k.lambda1[t], d.lambda1[t]);
        if (t == 0) set(k.lambda2, d.lambda2);
        else set(k.lambda3[t], d.lambda3[t]);
        set(k.lambda4[t], d.lambda4[t]);
        set(k.lambda5[t], d.lambda5[t]);
        for (std::size_t m = 0; m < 12; ++m) set(k.mu[m][t], d.mu[m][t]);
        set(k.cap_slack[0][t], a.p_bat_kw - dsp.p_ch()[t]);
        set(k.cap_slack[1][t], a.p_bat_kw - dsp.p_dis()[t]);
        set(k.cap_slack[2][t], a.e_bat_kwh - dsp.energy()[t]);
        set(k.cap_slack[3][t], a.demand_kw[t] - dsp.shed()[t]);
    }
}

}  // namespace capprice::dispatch
