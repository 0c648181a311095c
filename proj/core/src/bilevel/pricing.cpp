#include "capprice/bilevel/pricing.hpp"

#include <algorithm>
#include <numeric>

#include "capprice/common/csv.hpp"
#include "capprice/common/error.hpp"
#include "capprice/common/numfmt.hpp"
#include "capprice/solver/interchange.hpp"

namespace capprice::bilevel {

using dispatch::Family;

SettlementRecord settle(const model::Instance& inst, const PriceSchedule& prices,
                        const std::vector<dispatch::DispatchSolution>& dispatch,
                        const std::vector<double>& c_ext) {
    SettlementRecord s;
    const std::size_t I = inst.prosumers.size();
    for (std::size_t i = 0; i < I; ++i) {
        const auto& d = dispatch[i];
        double pay = 0.0;
        for (std::size_t t = 0; t < prices.x[i].size(); ++t) pay += prices.x[i][t] * (d.p_plus()[t] - d.p_minus()[t]);
        s.ids.push_back(inst.prosumers[i].id);
        s.payment.push_back(pay);
        s.c_ext.push_back(c_ext[i]);
        const double gap = pay - c_ext[i];
        s.w_plus.push_back(std::max(0.0, gap));
        s.w_minus.push_back(std::max(0.0, -gap));
        s.delta.push_back(inst.prosumers[i].residual_total());
    }
    s.v_plus = std::accumulate(s.w_plus.begin(), s.w_plus.end(), 0.0);
    s.v_minus = std::accumulate(s.w_minus.begin(), s.w_minus.end(), 0.0);
    if (I > 0) {
        s.mean_plus = s.v_plus / static_cast<double>(I);
        s.mean_minus = s.v_minus / static_cast<double>(I);
    }
    const double total = std::accumulate(s.delta.begin(), s.delta.end(), 0.0);
    for (double d : s.delta) s.share.push_back(total != 0.0 ? d / total : 0.0);
    return s;
}

solver::BranchBoundOptions native_options(const model::PricingConfig& config) {
    solver::BranchBoundOptions o;
    o.node_limit = config.node_limit;
    o.time_limit_seconds = config.time_limit_seconds;
    o.stop_gap = config.gap_tol;
    o.polyhedral.cone_segments = config.cone_segments;
    return o;
}

PricingOutcome extract_outcome(const model::Instance& inst, const Assembly& a, const solver::SolveResult& r) {
    PricingOutcome out;
    out.solve = r;
    if (!r.has_solution()) return out;
    const auto& x = r.x;
    auto val = [&](int j) { return x[static_cast<std::size_t>(j)]; };
    const int T = inst.horizon();
    out.prices.x_max = val(a.price_max);
    for (std::size_t i = 0; i < a.price.size(); ++i) {
        out.prices.x.emplace_back();
        for (int j : a.price[i]) out.prices.x.back().push_back(val(j));
    }
    std::vector<double> import_sum(static_cast<std::size_t>(T), 0.0);
    std::vector<double> shed_sum(static_cast<std::size_t>(T), 0.0);
    for (const auto& b : a.blocks) {
        dispatch::DispatchSolution d;
        for (int f = 0; f < dispatch::kFamilies; ++f)
            for (int j : b.primal[static_cast<std::size_t>(f)]) d.v[static_cast<std::size_t>(f)].push_back(val(j));
        dispatch::DualSolution du;
        for (int t = 0; t < T; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            du.lambda1.push_back(val(b.lambda1[ts]));
            du.lambda3.push_back(t == 0 ? 0.0 : val(b.lambda3[ts]));
            du.lambda4.push_back(val(b.lambda4[ts]));
            du.lambda5.push_back(val(b.lambda5[ts]));
            for (std::size_t m = 0; m < 12; ++m) du.mu[m].push_back(val(b.mu[m][ts]));
            import_sum[ts] += d.p_plus()[ts];
            shed_sum[ts] += d.shed()[ts];
        }
        du.lambda2 = val(b.lambda2);
        out.dispatch.push_back(std::move(d));
        out.duals.push_back(std::move(du));
    }
    for (std::size_t i = 0; i < out.dispatch.size(); ++i) {
        double obj = 0.0;
        const auto& d = out.dispatch[i];
        for (int t = 0; t < T; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            obj += out.prices.x[i][ts] * (d.p_plus()[ts] - d.p_minus()[ts]) + inst.contract.alpha_shed * d.shed()[ts];
        }
        out.dispatch[i].objective = obj;
    }
    out.state = network::extract_state(a.flow, x);
    for (std::size_t t = 0; t < a.p_pen.size(); ++t) out.state.p_pen[t] = val(a.p_pen[t]);
    out.settlement = settle(inst, out.prices, out.dispatch, a.c_ext);
    out.community_cost =
        community_cost(inst, out.state.p_im, out.state.p_ex, out.state.p_pen, import_sum, shed_sum);
    return out;
}

PricingOutcome solve_pricing(const model::Instance& inst, const std::vector<double>& c_ext,
                             const std::filesystem::path& work_dir) {
    const Assembly a = assemble_single_level(inst, c_ext);
    solver::SolveResult r;
    if (inst.config.backend == model::Backend::External) {
        if (inst.config.external_command.empty())
            throw SolverError("external backend selected without a solver command");
        const auto dir = work_dir.empty() ? std::filesystem::temp_directory_path() : work_dir;
        r = solver::solve_external(a.ir, inst.config.external_command, dir);
    } else {
        r = solver::branch_and_bound_sos1(a.ir, native_options(inst.config));
    }
    return extract_outcome(inst, a, r);
}

void write_prices_csv(const model::Instance& inst, const PriceSchedule& prices, const std::filesystem::path& path) {
    CsvWriter w(path, {"prosumer_id", "t", "price"});
    for (std::size_t i = 0; i < prices.x.size(); ++i)
        for (std::size_t t = 0; t < prices.x[i].size(); ++t)
            w.row({std::to_string(inst.prosumers[i].id), std::to_string(t + 1), fmt_num(prices.x[i][t])});
}

void write_settlement_csv(const SettlementRecord& s, const std::filesystem::path& path) {
    CsvWriter w(path, {"prosumer_id", "payment", "c_ext", "w_minus", "w_plus", "delta", "share"});
    for (std::size_t i = 0; i < s.ids.size(); ++i)
        w.row({std::to_string(s.ids[i]), fmt_num(s.payment[i]), fmt_num(s.c_ext[i]), fmt_num(s.w_minus[i]),
               fmt_num(s.w_plus[i]), fmt_num(s.delta[i]), fmt_num(s.share[i])});
}

}  // namespace capprice::bilevel
