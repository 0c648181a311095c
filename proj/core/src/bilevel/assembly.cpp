#include "capprice/bilevel/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace capprice::bilevel {

using dispatch::Family;
using solver::kInf;
using solver::QuadLink;
using solver::Sense;
using solver::Term;

namespace {

std::string idx(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }
std::string idx(const std::string& base, std::size_t i, std::size_t t) {
    return base + "[" + std::to_string(i) + "," + std::to_string(t) + "]";
}

}  // namespace

Assembly assemble_single_level(const model::Instance& inst, const std::vector<double>& c_ext,
                               const network::FlowOptions& flow_options) {
    const int I = inst.members();
    const int T = inst.horizon();
    if (static_cast<int>(c_ext.size()) != I)
        throw std::invalid_argument("external cost vector has " + std::to_string(c_ext.size()) +
                                    " entries for " + std::to_string(I) + " members");
    const auto& c = inst.contract;
    const double cap = c.alpha_shed;
    Assembly a;
    a.c_ext = c_ext;
    auto& ir = a.ir;

    // Prices and their common maximum.
    a.price_max = ir.add_var("price_max", 0.0, cap);
    for (int i = 0; i < I; ++i) {
        a.price.emplace_back();
        for (int t = 0; t < T; ++t) {
            const int x = ir.add_var(idx("price", static_cast<std::size_t>(i), static_cast<std::size_t>(t)), 0.0, cap);
            a.price.back().push_back(x);
            ir.add_row(idx("price_le_max", static_cast<std::size_t>(i), static_cast<std::size_t>(t)), Sense::Le,
                       {{x, 1.0}, {a.price_max, -1.0}}, 0.0, "upper.price");
        }
    }
    a.price_epigraph = ir.add_var("price_max_sq", 0.0, kInf, 1.0);
    QuadLink cap_link;
    cap_link.name = "price_cap_reg";
    cap_link.epigraph = a.price_epigraph;
    cap_link.weight = inst.config.rho;
    cap_link.terms = {{a.price_max, 1.0}};
    cap_link.lo = 0.0;
    cap_link.hi = cap;
    cap_link.tag = "upper.price-cap";
    ir.add_quad(cap_link);

    // Lower-level blocks.
    std::vector<network::InjectionHandles> inj;
    for (int i = 0; i < I; ++i) {
        const auto& m = inst.prosumers[static_cast<std::size_t>(i)];
        const auto bounds = dispatch::default_kkt_bounds(m, cap, cap);
        a.blocks.push_back(dispatch::emit_kkt(ir, m, a.price[static_cast<std::size_t>(i)], cap,
                                              "m" + std::to_string(m.id) + ".", bounds));
        const auto& b = a.blocks.back();
        inj.push_back({m.node, b.primal[Family::PPlus], b.primal[Family::PMinus], b.primal[Family::QPlus],
                       b.primal[Family::QMinus]});
        for (std::size_t p = 0; p < b.pairs.size(); ++p)
            ir.add_sos1("m" + std::to_string(m.id) + ".pair[" + std::to_string(p) + "]",
                        {b.pairs[p].first, b.pairs[p].second});
    }

    a.flow = network::build_lindistflow(ir, inst.network, T, inj, flow_options);

    // Penalty on import above the contracted cap; exports are not capped.
    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        a.p_pen.push_back(ir.add_var(idx("p_pen", ts), 0.0, inst.network.p_grid_kw));
        ir.add_row(idx("penalty", ts), Sense::Ge, {{a.p_pen[ts], 1.0}, {a.flow.p_im[ts], -1.0}}, -c.p_cap_kw[ts],
                   "upper.penalty");
    }

    // Objective and the budget balance share every term except shedding.
    std::vector<Term> budget;
    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const double lambda = inst.prices.spot[ts];
        const double internal = (1.0 - c.beta[ts]) * c.y_im[ts];
        const double im = lambda + c.y_im[ts] - internal;
        const double ex = -(lambda - c.y_ex[ts]);
        ir.add_cost(a.flow.p_im[ts], im);
        ir.add_cost(a.flow.p_ex[ts], ex);
        ir.add_cost(a.p_pen[ts], c.alpha_dso[ts]);
        budget.push_back({a.flow.p_im[ts], -im});
        budget.push_back({a.flow.p_ex[ts], -ex});
        budget.push_back({a.p_pen[ts], -c.alpha_dso[ts]});
        for (const auto& b : a.blocks) {
            if (internal != 0.0) {
                ir.add_cost(b.primal[Family::PPlus][ts], internal);
                budget.push_back({b.primal[Family::PPlus][ts], -internal});
            }
            ir.add_cost(b.primal[Family::Shed][ts], cap);
        }
    }

    // Individual rationality with benefit and loss slacks.
    std::vector<Term> sum_plus, sum_minus;
    double total_box = 0.0;
    for (int i = 0; i < I; ++i) {
        const auto is = static_cast<std::size_t>(i);
        const auto& m = inst.prosumers[is];
        const auto terms = dispatch::payment_terms(m, a.blocks[is], cap);
        budget.insert(budget.end(), terms.begin(), terms.end());
        const double trade = dispatch::default_kkt_bounds(m, cap, cap).trade_box;
        const double box = std::abs(c_ext[is]) + cap * trade * T + 1.0;
        a.slack_box.push_back(box);
        total_box += box;
        a.w_plus.push_back(ir.add_var(idx("w_plus", is), 0.0, box));
        a.w_minus.push_back(ir.add_var(idx("w_minus", is), 0.0, box));
        std::vector<Term> row = terms;
        row.push_back({a.w_plus[is], -1.0});
        row.push_back({a.w_minus[is], 1.0});
        ir.add_row(idx("rationality", is), Sense::Eq, std::move(row), c_ext[is], "upper.rationality");
        sum_plus.push_back({a.w_plus[is], 1.0});
        sum_minus.push_back({a.w_minus[is], 1.0});
    }
    ir.add_row("budget", Sense::Eq, std::move(budget), 0.0, "upper.budget");

    a.v_plus = ir.add_var("v_plus", 0.0, total_box);
    a.v_minus = ir.add_var("v_minus", 0.0, total_box);
    sum_plus.push_back({a.v_plus, -1.0});
    sum_minus.push_back({a.v_minus, -1.0});
    ir.add_row("loss_total", Sense::Le, std::move(sum_plus), 0.0, "upper.distribution");
    ir.add_row("benefit_total", Sense::Le, std::move(sum_minus), 0.0, "upper.distribution");
    ir.add_sos1("benefit_or_loss", {a.v_plus, a.v_minus});

    switch (inst.config.mode) {
        case model::DistributionMode::Equal: add_equal_regularizer(a, inst.config.gamma); break;
        case model::DistributionMode::Proportional: {
            std::vector<double> delta;
            for (const auto& m : inst.prosumers) delta.push_back(m.residual_total());
            add_proportional_regularizer(a, inst.config.gamma, delta);
            break;
        }
        case model::DistributionMode::None: break;
    }
    return a;
}

namespace {

double total_slack_box(const Assembly& a) {
    return std::accumulate(a.slack_box.begin(), a.slack_box.end(), 0.0);
}

void add_square(Assembly& a, const std::string& name, double gamma, std::vector<Term> terms, double bound) {
    const int epi = a.ir.add_var(name + ".epi", 0.0, kInf, 1.0);
    QuadLink q;
    q.name = name;
    q.epigraph = epi;
    q.weight = gamma;
    q.terms = std::move(terms);
    q.lo = -bound;
    q.hi = bound;
    q.grid = QuadLink::Grid::Geometric;
    q.tag = "upper.regularizer";
    a.ir.add_quad(std::move(q));
}

}  // namespace

void add_equal_regularizer(Assembly& a, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("negative distribution weight");
    const std::size_t I = a.w_plus.size();
    const double box = total_slack_box(a);
    a.mean_plus = a.ir.add_var("w_plus_mean", 0.0, box);
    a.mean_minus = a.ir.add_var("w_minus_mean", 0.0, box);
    std::vector<Term> mp{{a.mean_plus, static_cast<double>(I)}};
    std::vector<Term> mm{{a.mean_minus, static_cast<double>(I)}};
    for (std::size_t i = 0; i < I; ++i) {
        mp.push_back({a.w_plus[i], -1.0});
        mm.push_back({a.w_minus[i], -1.0});
    }
    a.ir.add_row("w_plus_mean_def", Sense::Eq, std::move(mp), 0.0, "upper.regularizer");
    a.ir.add_row("w_minus_mean_def", Sense::Eq, std::move(mm), 0.0, "upper.regularizer");
    if (gamma == 0.0) return;
    for (std::size_t i = 0; i < I; ++i) {
        add_square(a, idx("eq_minus", i), gamma, {{a.w_minus[i], 1.0}, {a.mean_minus, -1.0}}, box);
        add_square(a, idx("eq_plus", i), gamma, {{a.w_plus[i], 1.0}, {a.mean_plus, -1.0}}, box);
    }
}

void add_proportional_regularizer(Assembly& a, double gamma, const std::vector<double>& delta) {
    if (gamma < 0.0) throw std::invalid_argument("negative distribution weight");
    const std::size_t I = a.w_plus.size();
    if (delta.size() != I) throw std::invalid_argument("demand share vector length differs from member count");
    const double total = std::accumulate(delta.begin(), delta.end(), 0.0);
    if (total == 0.0) throw std::invalid_argument("demand shares sum to zero");
    if (gamma == 0.0) return;
    double max_share = 0.0;
    for (double d : delta) max_share = std::max(max_share, std::abs(d / total));
    const double box = total_slack_box(a) * (1.0 + max_share);
    for (std::size_t i = 0; i < I; ++i) {
        const double s = delta[i] / total;
        std::vector<Term> tm, tp;
        for (std::size_t j = 0; j < I; ++j) {
            const double coef = (i == j ? 1.0 : 0.0) - s;
            if (coef == 0.0) continue;
            tm.push_back({a.w_minus[j], coef});
            tp.push_back({a.w_plus[j], coef});
        }
        add_square(a, idx("pro_minus", i), gamma, std::move(tm), box);
        add_square(a, idx("pro_plus", i), gamma, std::move(tp), box);
    }
}

std::vector<double> community_cost_by_period(const model::Instance& inst, const std::vector<double>& p_im,
                                             const std::vector<double>& p_ex, const std::vector<double>& p_pen,
                                             const std::vector<double>& member_import_sum,
                                             const std::vector<double>& shed_sum) {
    const auto& c = inst.contract;
    std::vector<double> cost(p_im.size());
    for (std::size_t t = 0; t < p_im.size(); ++t) {
        const double lambda = inst.prices.spot[t];
        cost[t] = p_im[t] * (lambda + c.y_im[t]) - p_ex[t] * (lambda - c.y_ex[t]) +
                  (1.0 - c.beta[t]) * c.y_im[t] * (member_import_sum[t] - p_im[t]) + c.alpha_dso[t] * p_pen[t] +
                  c.alpha_shed * shed_sum[t];
    }
    return cost;
}

double community_cost(const model::Instance& inst, const std::vector<double>& p_im,
                      const std::vector<double>& p_ex, const std::vector<double>& p_pen,
                      const std::vector<double>& member_import_sum, const std::vector<double>& shed_sum) {
    double cost = 0.0;
    for (double v : community_cost_by_period(inst, p_im, p_ex, p_pen, member_import_sum, shed_sum)) cost += v;
    return cost;
}

}  // namespace capprice::bilevel
