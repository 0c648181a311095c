#include "capprice/model/instance.hpp"

#include <stdexcept>

namespace capprice::model {

std::vector<int> NetworkModel::downstream(int n) const {
    std::vector<int> out;
    std::vector<int> stack(children[static_cast<std::size_t>(n)].begin(),
                           children[static_cast<std::size_t>(n)].end());
    while (!stack.empty()) {
        const int m = stack.back();
        stack.pop_back();
        out.push_back(m);
        for (int c : children[static_cast<std::size_t>(m)]) stack.push_back(c);
    }
    return out;
}

std::vector<int> NetworkModel::upstream(int n) const {
    std::vector<int> out;
    for (int p = nodes[static_cast<std::size_t>(n)].parent; p >= 0; p = nodes[static_cast<std::size_t>(p)].parent)
        out.push_back(p);
    return out;
}

double ProsumerAssets::residual_total() const {
    double s = 0.0;
    for (std::size_t t = 0; t < demand_kw.size(); ++t) s += demand_kw[t] - pv_kw[t];
    return s;
}

std::vector<double> Instance::community_residual() const {
    std::vector<double> r(static_cast<std::size_t>(horizon()), 0.0);
    for (const ProsumerAssets& p : prosumers)
        for (std::size_t t = 0; t < r.size(); ++t) r[t] += p.demand_kw[t] - p.pv_kw[t];
    return r;
}

const char* to_string(DistributionMode m) {
    switch (m) {
        case DistributionMode::None: return "none";
        case DistributionMode::Equal: return "equal";
        case DistributionMode::Proportional: return "proportional";
    }
    return "none";
}

DistributionMode parse_distribution_mode(const std::string& s) {
    if (s == "none") return DistributionMode::None;
    if (s == "equal") return DistributionMode::Equal;
    if (s == "proportional") return DistributionMode::Proportional;
    throw std::invalid_argument("unknown distribution mode '" + s + "'");
}

const char* to_string(Backend b) { return b == Backend::Native ? "native" : "external"; }

Backend parse_backend(const std::string& s) {
    if (s == "native") return Backend::Native;
    if (s == "external") return Backend::External;
    throw std::invalid_argument("unknown backend '" + s + "'");
}

void finalize(NetworkModel& net, const std::vector<ProsumerAssets>& prosumers) {
    const int n = net.num_nodes();
    if (n == 0) throw std::invalid_argument("network has no nodes");
    net.children.assign(static_cast<std::size_t>(n), {});
    net.prosumers_at.assign(static_cast<std::size_t>(n), {});
    for (int k = 0; k < n; ++k) {
        const NetworkNode& node = net.nodes[static_cast<std::size_t>(k)];
        if (node.id != k) throw std::invalid_argument("node ids must be 0..N-1 in order");
        if (k == 0) {
            if (node.parent != -1) throw std::invalid_argument("node 0 must be the root");
            continue;
        }
        if (node.parent < 0 || node.parent >= n || node.parent == k)
            throw std::invalid_argument("node " + std::to_string(k) + " has an invalid parent");
        net.children[static_cast<std::size_t>(node.parent)].push_back(k);
    }
    net.order.clear();
    net.order.push_back(0);
    for (std::size_t head = 0; head < net.order.size(); ++head)
        for (int c : net.children[static_cast<std::size_t>(net.order[head])]) net.order.push_back(c);
    if (static_cast<int>(net.order.size()) != n)
        throw std::invalid_argument("parent relation contains a cycle");
    for (std::size_t i = 0; i < prosumers.size(); ++i) {
        const int node = prosumers[i].node;
        if (node < 0 || node >= n)
            throw std::invalid_argument("prosumer " + std::to_string(prosumers[i].id) +
                                        " sits at unknown node " + std::to_string(node));
        net.prosumers_at[static_cast<std::size_t>(node)].push_back(static_cast<int>(i));
    }
}

}  // namespace capprice::model
