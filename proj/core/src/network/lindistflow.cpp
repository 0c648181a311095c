#include "capprice/network/lindistflow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capprice/common/csv.hpp"
#include "capprice/common/numfmt.hpp"

namespace capprice::network {

using solver::kInf;
using solver::Sense;
using solver::Term;

namespace {

std::string indexed(const std::string& prefix, const std::string& base, int n, int t) {
    if (n < 0) return prefix + "." + base + "[" + std::to_string(t) + "]";
    return prefix + "." + base + "[" + std::to_string(n) + "," + std::to_string(t) + "]";
}

}  // namespace

std::vector<solver::PolygonEdge> cone_rows(double s_sq, int segments) {
    return solver::inscribed_polygon(s_sq, segments);
}

void add_line_cone(solver::ModelIR& ir, const std::string& name, int fp, int fq, double s_base,
                   double s_sq, ConeMode mode, int segments, const std::string& tag) {
    const double scale = 1.0 / s_base;
    if (mode == ConeMode::Exact) {
        ir.add_cone(name, {{fp, scale}, {fq, scale}}, s_sq, tag);
        return;
    }
    const auto edges = cone_rows(s_sq, segments);
    for (std::size_t e = 0; e < edges.size(); ++e)
        ir.add_row(name + "#" + std::to_string(e), Sense::Le,
                   {{fp, edges[e].cos_a * scale}, {fq, edges[e].sin_a * scale}}, edges[e].rhs, tag);
}

FlowBlock build_lindistflow(solver::ModelIR& ir, const model::NetworkModel& net, int horizon,
                            const std::vector<InjectionHandles>& members, const FlowOptions& options) {
    const int N = net.num_nodes();
    const std::string& pre = options.prefix;
    FlowBlock b;
    b.f_p.resize(static_cast<std::size_t>(N));
    b.f_q.resize(static_cast<std::size_t>(N));
    b.u.resize(static_cast<std::size_t>(N));

    for (int t = 0; t < horizon; ++t) {
        b.p_im.push_back(ir.add_var(indexed(pre, "p_im", -1, t), 0.0, net.p_grid_kw));
        b.p_ex.push_back(ir.add_var(indexed(pre, "p_ex", -1, t), 0.0, net.p_grid_kw));
        b.q_im.push_back(ir.add_var(indexed(pre, "q_im", -1, t), 0.0, net.q_grid_kvar));
        b.q_ex.push_back(ir.add_var(indexed(pre, "q_ex", -1, t), 0.0, net.q_grid_kvar));
    }
    for (int n = 0; n < N; ++n) {
        const auto ns = static_cast<std::size_t>(n);
        const double lo = n == 0 ? std::min(net.u_min, 1.0) : net.u_min;
        const double hi = n == 0 ? std::max(net.u_max, 1.0) : net.u_max;
        for (int t = 0; t < horizon; ++t) {
            b.f_p[ns].push_back(ir.add_var(indexed(pre, "f_p", n, t), -kInf, kInf));
            b.f_q[ns].push_back(ir.add_var(indexed(pre, "f_q", n, t), -kInf, kInf));
            b.u[ns].push_back(ir.add_var(indexed(pre, "u", n, t), lo, hi));
        }
    }

    for (int t = 0; t < horizon; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        ir.add_row(indexed(pre, "root_p", -1, t), Sense::Eq,
                   {{b.p_im[ts], 1.0}, {b.p_ex[ts], -1.0}, {b.f_p[0][ts], -1.0}}, 0.0, "net.root");
        ir.add_row(indexed(pre, "root_q", -1, t), Sense::Eq,
                   {{b.q_im[ts], 1.0}, {b.q_ex[ts], -1.0}, {b.f_q[0][ts], -1.0}}, 0.0, "net.root");
        for (int n = 0; n < N; ++n) {
            const auto ns = static_cast<std::size_t>(n);
            std::vector<Term> tp{{b.f_p[ns][ts], 1.0}};
            std::vector<Term> tq{{b.f_q[ns][ts], 1.0}};
            for (const InjectionHandles& m : members) {
                if (m.node != n) continue;
                tp.push_back({m.p_plus[ts], -1.0});
                tp.push_back({m.p_minus[ts], 1.0});
                tq.push_back({m.q_plus[ts], -1.0});
                tq.push_back({m.q_minus[ts], 1.0});
            }
            for (int c : net.children[ns]) {
                tp.push_back({b.f_p[static_cast<std::size_t>(c)][ts], -1.0});
                tq.push_back({b.f_q[static_cast<std::size_t>(c)][ts], -1.0});
            }
            ir.add_row(indexed(pre, "flow_p", n, t), Sense::Eq, std::move(tp), 0.0, "net.flow");
            ir.add_row(indexed(pre, "flow_q", n, t), Sense::Eq, std::move(tq), 0.0, "net.flow");
        }
        ir.add_row(indexed(pre, "u_anchor", -1, t), Sense::Eq, {{b.u[0][ts], 1.0}}, 1.0, "net.voltage");
        for (int n = 1; n < N; ++n) {
            const auto ns = static_cast<std::size_t>(n);
            const model::NetworkNode& node = net.nodes[ns];
            const auto ps = static_cast<std::size_t>(node.parent);
            ir.add_row(indexed(pre, "u_drop", n, t), Sense::Eq,
                       {{b.u[ns][ts], 1.0},
                        {b.u[ps][ts], -1.0},
                        {b.f_p[ns][ts], 2.0 * node.r_pu / net.s_base_kva},
                        {b.f_q[ns][ts], 2.0 * node.x_pu / net.s_base_kva}},
                       0.0, "net.voltage");
            add_line_cone(ir, indexed(pre, "cap", n, t), b.f_p[ns][ts], b.f_q[ns][ts], net.s_base_kva,
                          node.s_sq_max_pu, options.cone_mode, options.cone_segments, "net.capacity");
        }
    }
    return b;
}

NodeInjections node_injections(const model::NetworkModel& net, int horizon,
                               const std::vector<std::vector<double>>& member_p,
                               const std::vector<std::vector<double>>& member_q) {
    NodeInjections inj;
    const auto N = static_cast<std::size_t>(net.num_nodes());
    inj.p.assign(N, std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
    inj.q = inj.p;
    for (std::size_t n = 0; n < N; ++n)
        for (int i : net.prosumers_at[n])
            for (int t = 0; t < horizon; ++t) {
                inj.p[n][static_cast<std::size_t>(t)] += member_p[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
                inj.q[n][static_cast<std::size_t>(t)] += member_q[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
            }
    return inj;
}

std::vector<FlowViolation> check_flow_feasibility(const model::NetworkModel& net,
                                                  const CommunityState& s, double tol,
                                                  const NodeInjections* inj) {
    std::vector<FlowViolation> out;
    auto flag = [&](const char* check, int n, int t, double residual) {
        if (residual > tol) out.push_back({check, n, t, residual});
    };
    const int T = s.horizon();
    const int N = net.num_nodes();
    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        flag("trade-nonnegative", -1, t,
             std::max({-s.p_im[ts], -s.p_ex[ts], -s.q_im[ts], -s.q_ex[ts], -s.p_pen[ts], 0.0}));
        flag("feeder-active", -1, t, std::max(s.p_im[ts], s.p_ex[ts]) - net.p_grid_kw);
        flag("feeder-reactive", -1, t, std::max(s.q_im[ts], s.q_ex[ts]) - net.q_grid_kvar);
        flag("root-balance", -1, t,
             std::max(std::abs(s.p_im[ts] - s.p_ex[ts] - s.f_p[0][ts]),
                      std::abs(s.q_im[ts] - s.q_ex[ts] - s.f_q[0][ts])));
        flag("voltage-anchor", 0, t, std::abs(s.u[0][ts] - 1.0));
        for (int n = 0; n < N; ++n) {
            const auto ns = static_cast<std::size_t>(n);
            if (inj) {
                double fp = inj->p[ns][ts];
                double fq = inj->q[ns][ts];
                for (int c : net.children[ns]) {
                    fp += s.f_p[static_cast<std::size_t>(c)][ts];
                    fq += s.f_q[static_cast<std::size_t>(c)][ts];
                }
                flag("flow-aggregation", n, t,
                     std::max(std::abs(s.f_p[ns][ts] - fp), std::abs(s.f_q[ns][ts] - fq)));
            }
            if (n == 0) continue;
            const model::NetworkNode& node = net.nodes[ns];
            const double expected = s.u[static_cast<std::size_t>(node.parent)][ts] -
                                    2.0 * (node.r_pu * s.f_p[ns][ts] + node.x_pu * s.f_q[ns][ts]) /
                                        net.s_base_kva;
            flag("voltage-drop", n, t, std::abs(s.u[ns][ts] - expected));
            flag("voltage-bounds", n, t, std::max(net.u_min - s.u[ns][ts], s.u[ns][ts] - net.u_max));
            const double sq = (s.f_p[ns][ts] * s.f_p[ns][ts] + s.f_q[ns][ts] * s.f_q[ns][ts]) /
                              (net.s_base_kva * net.s_base_kva);
            flag("line-capacity", n, t, sq - node.s_sq_max_pu);
        }
    }
    return out;
}

CommunityState evaluate_state(const model::NetworkModel& net, const NodeInjections& inj) {
    const auto N = static_cast<std::size_t>(net.num_nodes());
    const std::size_t T = inj.p.empty() ? 0 : inj.p[0].size();
    CommunityState s;
    s.f_p = inj.p;
    s.f_q = inj.q;
    s.u.assign(N, std::vector<double>(T, 1.0));
    for (auto it = net.order.rbegin(); it != net.order.rend(); ++it) {
        const auto n = static_cast<std::size_t>(*it);
        for (int c : net.children[n])
            for (std::size_t t = 0; t < T; ++t) {
                s.f_p[n][t] += s.f_p[static_cast<std::size_t>(c)][t];
                s.f_q[n][t] += s.f_q[static_cast<std::size_t>(c)][t];
            }
    }
    for (int n : net.order) {
        if (n == 0) continue;
        const auto ns = static_cast<std::size_t>(n);
        const model::NetworkNode& node = net.nodes[ns];
        for (std::size_t t = 0; t < T; ++t)
            s.u[ns][t] = s.u[static_cast<std::size_t>(node.parent)][t] -
                         2.0 * (node.r_pu * s.f_p[ns][t] + node.x_pu * s.f_q[ns][t]) / net.s_base_kva;
    }
    for (std::size_t t = 0; t < T; ++t) {
        s.p_im.push_back(std::max(0.0, s.f_p[0][t]));
        s.p_ex.push_back(std::max(0.0, -s.f_p[0][t]));
        s.q_im.push_back(std::max(0.0, s.f_q[0][t]));
        s.q_ex.push_back(std::max(0.0, -s.f_q[0][t]));
        s.p_pen.push_back(0.0);
    }
    return s;
}

CommunityState extract_state(const FlowBlock& b, const std::vector<double>& x) {
    auto pick = [&](const std::vector<int>& cols) {
        std::vector<double> v;
        for (int j : cols) v.push_back(x[static_cast<std::size_t>(j)]);
        return v;
    };
    CommunityState s;
    s.p_im = pick(b.p_im);
    s.p_ex = pick(b.p_ex);
    s.q_im = pick(b.q_im);
    s.q_ex = pick(b.q_ex);
    s.p_pen.assign(b.p_im.size(), 0.0);
    for (std::size_t n = 0; n < b.f_p.size(); ++n) {
        s.f_p.push_back(pick(b.f_p[n]));
        s.f_q.push_back(pick(b.f_q[n]));
        s.u.push_back(pick(b.u[n]));
    }
    return s;
}

void write_flow_csv(const CommunityState& s, const std::filesystem::path& path) {
    CsvWriter w(path, {"t", "node", "f_p", "f_q", "u"});
    for (int t = 0; t < s.horizon(); ++t)
        for (std::size_t n = 0; n < s.f_p.size(); ++n) {
            const auto ts = static_cast<std::size_t>(t);
            w.row({std::to_string(t + 1), std::to_string(n), fmt_num(s.f_p[n][ts]), fmt_num(s.f_q[n][ts]),
                   fmt_num(s.u[n][ts])});
        }
}

void write_trade_csv(const CommunityState& s, const std::filesystem::path& path) {
    CsvWriter w(path, {"t", "p_im", "p_ex", "q_im", "q_ex", "p_pen"});
    for (int t = 0; t < s.horizon(); ++t) {
        const auto ts = static_cast<std::size_t>(t);
        w.row({std::to_string(t + 1), fmt_num(s.p_im[ts]), fmt_num(s.p_ex[ts]), fmt_num(s.q_im[ts]),
               fmt_num(s.q_ex[ts]), fmt_num(s.p_pen[ts])});
    }
}

}  // namespace capprice::network
