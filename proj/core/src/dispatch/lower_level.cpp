#include "capprice/dispatch/lower_level.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "capprice/common/csv.hpp"
#include "capprice/common/error.hpp"
#include "capprice/common/numfmt.hpp"

namespace capprice::dispatch {

using solver::kInf;
using solver::Sense;
using solver::Term;

const char* family_name(int f) {
    static const char* names[kFamilies] = {"p_plus", "p_minus", "q_plus", "q_minus",
                                           "p_ch",   "p_dis",   "e",      "d_shed"};
    return names[f];
}

namespace {

// Terms on the same variable are merged; with T = 1 the cyclic link cancels e.
void add_term(std::vector<Term>& terms, int var, double coef) {
    for (Term& t : terms)
        if (t.var == var) {
            t.coef += coef;
            return;
        }
    terms.push_back({var, coef});
}

}  // namespace

LowerLp build_lower_lp(const model::ProsumerAssets& a, const std::vector<double>& price,
                       double alpha_shed, const std::vector<double>& export_price) {
    const int T = static_cast<int>(price.size());
    if (static_cast<int>(a.demand_kw.size()) != T || static_cast<int>(a.pv_kw.size()) != T)
        throw std::invalid_argument("price vector length differs from profile length");
    if (!export_price.empty() && static_cast<int>(export_price.size()) != T)
        throw std::invalid_argument("export price length differs from horizon");
    LowerLp lp;
    lp.horizon = T;
    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const std::string sfx = "[" + std::to_string(t) + "]";
        const double ex = export_price.empty() ? price[ts] : export_price[ts];
        lp.var[PPlus].push_back(lp.ir.add_var("p_plus" + sfx, 0.0, kInf, price[ts]));
        lp.var[PMinus].push_back(lp.ir.add_var("p_minus" + sfx, 0.0, kInf, -ex));
        lp.var[QPlus].push_back(lp.ir.add_var("q_plus" + sfx, 0.0, kInf));
        lp.var[QMinus].push_back(lp.ir.add_var("q_minus" + sfx, 0.0, kInf));
        lp.var[PCh].push_back(lp.ir.add_var("p_ch" + sfx, 0.0, a.p_bat_kw));
        lp.var[PDis].push_back(lp.ir.add_var("p_dis" + sfx, 0.0, a.p_bat_kw));
        lp.var[Energy].push_back(lp.ir.add_var("e" + sfx, 0.0, a.e_bat_kwh));
        lp.var[Shed].push_back(lp.ir.add_var("d_shed" + sfx, 0.0, a.demand_kw[ts], alpha_shed));
    }
    for (int t = 0; t < T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const std::string sfx = "[" + std::to_string(t) + "]";
        lp.balance_row.push_back(lp.ir.add_row(
            "balance" + sfx, Sense::Eq,
            {{lp.var[PPlus][ts], 1.0}, {lp.var[PMinus][ts], -1.0}, {lp.var[Shed][ts], 1.0},
             {lp.var[PCh][ts], -1.0}, {lp.var[PDis][ts], 1.0}},
            a.demand_kw[ts] - a.pv_kw[ts]));
        // e_t - e_{t-1} - eta_ch p_ch + eta_dis p_dis = 0, cyclic at t = 0.
        const auto prev = static_cast<std::size_t>((t + T - 1) % T);
        std::vector<Term> terms;
        add_term(terms, lp.var[Energy][ts], 1.0);
        add_term(terms, lp.var[Energy][prev], -1.0);
        add_term(terms, lp.var[PCh][ts], -a.eta_ch);
        add_term(terms, lp.var[PDis][ts], a.eta_dis);
        lp.storage_row.push_back(
            lp.ir.add_row((t == 0 ? "cyclic" : "storage") + sfx, Sense::Eq, std::move(terms), 0.0));
        lp.react_plus_row.push_back(lp.ir.add_row(
            "react_plus" + sfx, Sense::Eq, {{lp.var[QPlus][ts], 1.0}, {lp.var[PPlus][ts], -a.sigma}}, 0.0));
        lp.react_minus_row.push_back(lp.ir.add_row(
            "react_minus" + sfx, Sense::Eq, {{lp.var[QMinus][ts], 1.0}, {lp.var[PMinus][ts], -a.sigma}}, 0.0));
    }
    return lp;
}

LowerResult solve_lower_lp(const LowerLp& lp, const solver::SimplexOptions& options) {
    const solver::LpProblem prob = solver::LpProblem::from_linear_model(lp.ir);
    solver::BoundedSimplex spx(prob, options);
    const solver::LpSolution sol = spx.solve();
    if (sol.status != solver::LpStatus::Optimal)
        throw SolverError(std::string("lower-level LP not solved: ") + solver::to_string(sol.status));

    const auto T = static_cast<std::size_t>(lp.horizon);
    LowerResult out;
    out.status = sol.status;
    out.dispatch.objective = sol.objective;
    for (int f = 0; f < kFamilies; ++f) {
        out.dispatch.v[static_cast<std::size_t>(f)].resize(T);
        for (std::size_t t = 0; t < T; ++t)
            out.dispatch.v[static_cast<std::size_t>(f)][t] =
                std::max(0.0, sol.x[static_cast<std::size_t>(lp.var[static_cast<std::size_t>(f)][t])]);
    }

    // Row duals y = d obj / d rhs; with g(x) = A x - b the multiplier is -y.
    DualSolution& d = out.duals;
    d.lambda1.resize(T);
    d.lambda3.assign(T, 0.0);
    d.lambda4.resize(T);
    d.lambda5.resize(T);
    for (auto& m : d.mu) m.assign(T, 0.0);
    auto row_mult = [&](int r) { return -sol.row_dual[static_cast<std::size_t>(r)]; };
    for (std::size_t t = 0; t < T; ++t) {
        d.lambda1[t] = row_mult(lp.balance_row[t]);
        if (t == 0) d.lambda2 = row_mult(lp.storage_row[t]);
        else d.lambda3[t] = row_mult(lp.storage_row[t]);
        d.lambda4[t] = row_mult(lp.react_plus_row[t]);
        d.lambda5[t] = row_mult(lp.react_minus_row[t]);
        // Reduced cost c - y'A splits into the lower-bound multiplier (positive
        // part) and the cap multiplier (negative part).
        for (int f = 0; f < kFamilies; ++f) {
            const double rc = sol.reduced_cost[static_cast<std::size_t>(lp.var[static_cast<std::size_t>(f)][t])];
            d.mu[static_cast<std::size_t>(f)][t] = std::max(0.0, rc);
            if (f == PCh) d.mu[8][t] = std::max(0.0, -rc);
            if (f == PDis) d.mu[9][t] = std::max(0.0, -rc);
            if (f == Energy) d.mu[10][t] = std::max(0.0, -rc);
            if (f == Shed) d.mu[11][t] = std::max(0.0, -rc);
        }
    }
    return out;
}

LowerResult solve_member(const model::ProsumerAssets& assets, const std::vector<double>& price,
                         double alpha_shed, const std::vector<double>& export_price) {
    const LowerLp lp = build_lower_lp(assets, price, alpha_shed, export_price);
    LowerResult r = solve_lower_lp(lp);
    r.dual_objective = dual_objective(assets, r.duals);
    return r;
}

double dual_objective(const model::ProsumerAssets& a, const DualSolution& d) {
    double s = 0.0;
    for (std::size_t t = 0; t < d.lambda1.size(); ++t)
        s += d.lambda1[t] * (a.pv_kw[t] - a.demand_kw[t]) - a.p_bat_kw * (d.mu[8][t] + d.mu[9][t]) -
             a.e_bat_kwh * d.mu[10][t] - a.demand_kw[t] * d.mu[11][t];
    return s;
}

double payment_identity(const model::ProsumerAssets& a, const DualSolution& d,
                        const std::vector<double>& shed, double alpha_shed, double tol) {
    const std::size_t T = d.lambda1.size();
    if (shed.size() != T || a.demand_kw.size() != T)
        throw std::invalid_argument("payment identity: horizon mismatch");
    for (std::size_t k = 0; k < d.mu.size(); ++k)
        for (std::size_t t = 0; t < T; ++t)
            if (d.mu[k][t] < -tol)
                throw StaleDualsError("mu" + std::to_string(k + 1) + " negative at t=" + std::to_string(t + 1));
    for (std::size_t t = 0; t < T; ++t) {
        const double r8 = std::abs(d.mu[7][t] * shed[t]);
        const double r12 = std::abs(d.mu[11][t] * (a.demand_kw[t] - shed[t]));
        if (r8 > tol * (1.0 + std::abs(shed[t])) || r12 > tol * (1.0 + a.demand_kw[t]))
            throw StaleDualsError("shed complementarity violated at t=" + std::to_string(t + 1));
    }
    double s = dual_objective(a, d);
    for (std::size_t t = 0; t < T; ++t) s -= alpha_shed * shed[t];
    return s;
}

void write_dispatch_csv(const std::filesystem::path& path, const std::vector<int>& ids,
                        const std::vector<DispatchSolution>& dispatch) {
    CsvWriter w(path, {"prosumer_id", "t", "variable", "value"});
    for (std::size_t i = 0; i < dispatch.size(); ++i)
        for (int f = 0; f < kFamilies; ++f)
            for (std::size_t t = 0; t < dispatch[i].v[static_cast<std::size_t>(f)].size(); ++t)
                w.row({std::to_string(ids[i]), std::to_string(t + 1), family_name(f),
                       fmt_num(dispatch[i].v[static_cast<std::size_t>(f)][t])});
}

void write_duals_csv(const std::filesystem::path& path, const std::vector<int>& ids,
                     const std::vector<DualSolution>& duals) {
    CsvWriter w(path, {"prosumer_id", "t", "variable", "value"});
    for (std::size_t i = 0; i < duals.size(); ++i) {
        const DualSolution& d = duals[i];
        const std::string id = std::to_string(ids[i]);
        for (std::size_t t = 0; t < d.lambda1.size(); ++t) {
            const std::string ts = std::to_string(t + 1);
            w.row({id, ts, "lambda1", fmt_num(d.lambda1[t])});
            if (t == 0) w.row({id, ts, "lambda2", fmt_num(d.lambda2)});
            else w.row({id, ts, "lambda3", fmt_num(d.lambda3[t])});
            w.row({id, ts, "lambda4", fmt_num(d.lambda4[t])});
            w.row({id, ts, "lambda5", fmt_num(d.lambda5[t])});
            for (std::size_t k = 0; k < d.mu.size(); ++k)
                w.row({id, ts, "mu" + std::to_string(k + 1), fmt_num(d.mu[k][t])});
        }
    }
}

}  // namespace capprice::dispatch
