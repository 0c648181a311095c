#include "capprice/model/validate.hpp"

#include <cmath>

namespace capprice::model {

namespace {

std::string at_t(std::size_t t) { return " at t=" + std::to_string(t + 1); }

}  // namespace

std::vector<Diagnostic> validate_instance(const Instance& inst) {
    std::vector<Diagnostic> out;
    auto add = [&](const char* inv, const char* part, std::string msg) {
        out.push_back({inv, part, std::move(msg)});
    };
    const NetworkModel& net = inst.network;
    const auto T = static_cast<std::size_t>(inst.horizon());

    if (net.nodes.empty()) add("network.tree", "network", "network has no nodes");
    for (std::size_t n = 0; n < net.nodes.size(); ++n) {
        const NetworkNode& node = net.nodes[n];
        const std::string tag = "node " + std::to_string(node.id);
        if (node.id != static_cast<int>(n)) add("network.tree", "network", tag + " out of order");
        if (n == 0) {
            if (node.parent != -1) add("network.tree", "network", "node 0 must be the root");
            continue;
        }
        // Parent chain must reach node 0 within |N| steps.
        int p = node.parent;
        std::size_t steps = 0;
        while (p > 0 && p < static_cast<int>(net.nodes.size()) && steps <= net.nodes.size()) {
            p = net.nodes[static_cast<std::size_t>(p)].parent;
            ++steps;
        }
        if (p != 0) add("network.tree", "network", tag + " does not reach node 0");
        if (!(node.r_pu >= 0.0) || !(node.x_pu >= 0.0))
            add("network.impedance", "network", "negative impedance on " + tag);
        if (!(node.s_sq_max_pu > 0.0))
            add("network.capacity", "network", "nonpositive line capacity on " + tag);
    }
    if (!(net.u_min > 0.0 && net.u_min <= 1.0 && 1.0 <= net.u_max))
        add("network.voltage", "network", "voltage bounds must satisfy 0 < u_min <= 1 <= u_max");
    if (!(net.p_grid_kw >= 0.0) || !(net.q_grid_kvar >= 0.0))
        add("network.feeder", "network", "negative feeder capacity");
    if (!(net.s_base_kva > 0.0) || !(net.v_base_kv > 0.0))
        add("network.base", "network", "per-unit base must be positive");

    if (inst.prosumers.empty()) add("prosumer.count", "network", "instance has no members");
    for (const ProsumerAssets& p : inst.prosumers) {
        const std::string tag = "prosumer " + std::to_string(p.id);
        if (p.node < 0 || p.node >= net.num_nodes())
            add("prosumer.node", "network", tag + " sits at unknown node");
        if (p.demand_kw.size() != T || p.pv_kw.size() != T) {
            add("horizon", "profiles", tag + " profile length differs from horizon");
            continue;
        }
        for (std::size_t t = 0; t < T; ++t) {
            if (!(p.demand_kw[t] >= 0.0) || !std::isfinite(p.demand_kw[t]))
                add("prosumer.demand", "profiles", "negative demand for " + tag + at_t(t));
            if (!(p.pv_kw[t] >= 0.0) || !std::isfinite(p.pv_kw[t]))
                add("prosumer.pv", "profiles", "negative PV for " + tag + at_t(t));
        }
        if (!(p.p_bat_kw >= 0.0) || !(p.e_bat_kwh >= 0.0))
            add("prosumer.battery", "network", "negative battery limit for " + tag);
        const bool active = p.p_bat_kw > 0.0 || p.e_bat_kwh > 0.0;
        if (active && !(p.eta_ch > 0.0 && p.eta_dis > 0.0))
            add("prosumer.efficiency", "network", "zero efficiency on active battery of " + tag);
        else if (active && !(p.eta_ch <= 1.0 && p.eta_dis <= 1.0))
            add("prosumer.efficiency", "network", "efficiency above 1 on battery of " + tag);
        if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma))
            add("prosumer.sigma", "network", "invalid reactive ratio for " + tag);
    }

    const DsoContract& c = inst.contract;
    if (c.p_cap_kw.size() != T || c.alpha_dso.size() != T || c.beta.size() != T ||
        c.y_im.size() != T || c.y_ex.size() != T) {
        add("horizon", "contract", "contract length differs from horizon");
    } else {
        for (std::size_t t = 0; t < T; ++t) {
            if (!(c.beta[t] >= 0.0 && c.beta[t] <= 1.0))
                add("contract.discount", "contract", "discount out of [0,1]" + at_t(t));
            if (!(c.p_cap_kw[t] >= 0.0))
                add("contract.cap", "contract", "negative capacity limit" + at_t(t));
            if (!(c.alpha_dso[t] >= 0.0))
                add("contract.penalty", "contract", "negative penalty rate" + at_t(t));
            if (!std::isfinite(c.y_im[t]) || !std::isfinite(c.y_ex[t]))
                add("contract.tariff", "contract", "non-finite tariff" + at_t(t));
        }
    }
    if (!(c.alpha_shed > 0.0) || !std::isfinite(c.alpha_shed))
        add("contract.shed", "contract", "value of lost load must be positive");

    if (T == 0) add("horizon", "prices", "empty horizon");
    for (std::size_t t = 0; t < T; ++t)
        if (!std::isfinite(inst.prices.spot[t]))
            add("prices.finite", "prices", "non-finite spot price" + at_t(t));

    if (!(inst.config.rho > 0.0)) add("config.rho", "config", "rho must be positive");
    if (!(inst.config.gamma >= 0.0)) add("config.gamma", "config", "gamma must be nonnegative");
    return out;
}

}  // namespace capprice::model
