#pragma once

// Exhaustive discretized-dispatch reference for one member's daily problem.
// The state of charge moves on a grid of step h; the cyclic start state is
// enumerated. Requires eta_ch <= eta_dis and equal import/export price, so
// simultaneous charge and discharge is never needed and per-period shedding
// has a closed form.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "capprice/model/instance.hpp"

namespace capprice::testing {

inline double dispatch_oracle(const model::ProsumerAssets& a, const std::vector<double>& price,
                              double alpha_shed, double h) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t T = price.size();
    auto period_cost = [&](std::size_t t, double battery_kw) {
        const double r = a.demand_kw[t] - a.pv_kw[t] + battery_kw;
        // Shedding d in [0, D] lowers the trade at marginal saving price - alpha.
        const double d = price[t] > alpha_shed ? a.demand_kw[t] : 0.0;
        return price[t] * (r - d) + alpha_shed * d;
    };
    const int levels = a.e_bat_kwh > 0.0 && a.p_bat_kw > 0.0
                           ? static_cast<int>(std::floor(a.e_bat_kwh / h + 1e-9))
                           : 0;
    const double step_up = a.eta_ch * a.p_bat_kw + 1e-12;
    const double step_down = a.eta_dis * a.p_bat_kw + 1e-12;
    auto transition = [&](int from, int to, std::size_t t) {
        const double delta = (to - from) * h;
        if (delta > step_up || -delta > step_down) return inf;
        const double battery_kw = delta >= 0.0 ? delta / a.eta_ch : delta / a.eta_dis;
        return period_cost(t, battery_kw);
    };
    double best = inf;
    std::vector<double> cur(static_cast<std::size_t>(levels) + 1), nxt(cur.size());
    for (int start = 0; start <= levels; ++start) {
        std::fill(cur.begin(), cur.end(), inf);
        cur[static_cast<std::size_t>(start)] = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            std::fill(nxt.begin(), nxt.end(), inf);
            for (int s = 0; s <= levels; ++s) {
                if (cur[static_cast<std::size_t>(s)] == inf) continue;
                for (int u = 0; u <= levels; ++u) {
                    const double c = transition(s, u, t);
                    if (c == inf) continue;
                    auto& slot = nxt[static_cast<std::size_t>(u)];
                    slot = std::min(slot, cur[static_cast<std::size_t>(s)] + c);
                }
            }
            std::swap(cur, nxt);
        }
        best = std::min(best, cur[static_cast<std::size_t>(start)]);
    }
    return best;
}

/// Random member on a quarter-unit lattice so LP vertices fall on the oracle grid.
struct RandomMember {
    model::ProsumerAssets assets;
    std::vector<double> price;
    double alpha_shed = 75.0;
};

inline RandomMember random_member(std::mt19937_64& rng, int max_horizon = 6) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    RandomMember m;
    const int T = pick(1, max_horizon);
    auto& a = m.assets;
    const bool pv = pick(0, 1) == 1;
    for (int t = 0; t < T; ++t) {
        a.demand_kw.push_back(0.25 * pick(0, 12));
        a.pv_kw.push_back(pv ? 0.25 * pick(0, 10) : 0.0);
        m.price.push_back(0.5 * pick(0, 20));
    }
    if (pick(0, 9) < 7) {
        a.p_bat_kw = 0.5 * pick(1, 3);
        a.e_bat_kwh = 0.5 * pick(1, 6);
        const double etas[3] = {0.5, 0.75, 1.0};
        const int ic = pick(0, 2);
        a.eta_ch = etas[ic];
        a.eta_dis = etas[pick(ic, 2)];
    }
    const double sigmas[3] = {0.0, 0.2, 0.5};
    a.sigma = sigmas[pick(0, 2)];
    m.alpha_shed = pick(0, 3) == 0 ? 0.5 * pick(1, 12) : 75.0;
    return m;
}

}  // namespace capprice::testing
