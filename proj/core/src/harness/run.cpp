#include "capprice/harness/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "capprice/common/csv.hpp"
#include "capprice/common/error.hpp"
#include "capprice/common/numfmt.hpp"
#include "capprice/harness/svg.hpp"

namespace capprice::harness {

namespace fs = std::filesystem;

namespace {

std::vector<double> member_sum(const std::vector<dispatch::DispatchSolution>& dsp, int family, int T) {
    std::vector<double> s(static_cast<std::size_t>(T), 0.0);
    for (const auto& d : dsp)
        for (int t = 0; t < T; ++t) s[static_cast<std::size_t>(t)] += d.v[static_cast<std::size_t>(family)][static_cast<std::size_t>(t)];
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

double total(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

scenario::RegimeResult coordinated_regime(const model::Instance& inst, const bilevel::PricingOutcome& o) {
    const int T = inst.horizon();
    scenario::RegimeResult r;
    r.regime = "coordinated";
    r.import_kw = o.state.p_im;
    r.export_kw = o.state.p_ex;
    r.cap_kw = inst.contract.p_cap_kw;
    r.penalty_kw = o.state.p_pen;
    r.shed_kw = member_sum(o.dispatch, dispatch::Shed, T);
    r.cost_dkk = bilevel::community_cost_by_period(inst, o.state.p_im, o.state.p_ex, o.state.p_pen,
                                                   member_sum(o.dispatch, dispatch::PPlus, T), r.shed_kw);
    r.total_cost = total(r.cost_dkk);
    return r;
}

CaseResult solve_case(const model::Instance& inst, const fs::path& work_dir) {
    CaseResult r;
    r.instance = inst;
    r.no_dr = scenario::baseline_no_dr(inst);
    const auto unc = scenario::baseline_uncoordinated(inst);
    r.uncoordinated = unc.community;
    r.c_ext = scenario::compute_c_ext(inst, unc);
    try {
        r.outcome = bilevel::solve_pricing(inst, r.c_ext, work_dir);
    } catch (const SolverError& e) {
        r.status = "solver-limit";
        r.exit_code = kExitSolverLimit;
        r.message = e.what();
        r.outcome.solve.status = solver::SolveStatus::Limit;
        return r;
    }

    const auto status = r.outcome.solve.status;
    if (!r.outcome.has_solution()) {
        r.status = status == solver::SolveStatus::Infeasible ? "infeasible" : "solver-limit";
        r.exit_code = kExitSolverLimit;
        return r;
    }
    r.coordinated = coordinated_regime(inst, r.outcome);
    r.report = validation::check_solution(inst, r.outcome.prices, r.outcome.dispatch, r.outcome.state,
                                          r.outcome.settlement, inst.config.feasibility_tol);
    r.stats = validation::benefit_stats(r.outcome.settlement);
    if (status == solver::SolveStatus::Limit) {
        r.status = "solver-limit";
        r.exit_code = kExitSolverLimit;
    } else if (!r.report.passed()) {
        r.status = "validation-failure";
        r.exit_code = kExitValidation;
    } else {
        r.status = "pass";
        r.exit_code = kExitPass;
    }
    return r;
}

std::vector<std::pair<std::string, std::string>> summary_rows(const CaseResult& r) {
    const auto& s = r.outcome.solve;
    std::vector<std::pair<std::string, std::string>> rows{
        {"status", r.status},
        {"solver_status", solver::to_string(s.status)},
        {"mode", model::to_string(r.instance.config.mode)},
        {"gamma", fmt_num(r.instance.config.gamma)},
        {"members", std::to_string(r.instance.members())},
        {"horizon", std::to_string(r.instance.horizon())},
        {"no_dr_cost", fmt_num(r.no_dr.total_cost)},
        {"uncoordinated_cost", fmt_num(r.uncoordinated.total_cost)},
    };
    if (!r.message.empty()) rows.emplace_back("message", r.message);
    if (r.outcome.has_solution()) {
        const auto& st = r.stats;
        rows.insert(rows.end(), {{"coordinated_cost", fmt_num(r.outcome.community_cost)},
                                 {"objective", fmt_num(s.objective)},
                                 {"bound", fmt_num(s.bound)},
                                 {"gap", fmt_num(s.gap)},
                                 {"nodes", std::to_string(s.nodes)},
                                 {"price_max", fmt_num(r.outcome.prices.x_max)},
                                 {"total_benefit", fmt_num(st.total_benefit)},
                                 {"total_loss", fmt_num(st.total_loss)},
                                 {"benefit_variance", fmt_num(st.variance)},
                                 {"proportional_deviation", fmt_num(st.proportional_deviation)},
                                 {"max_import_over_cap", fmt_num([&] {
                                      double m = -solver::kInf;
                                      for (std::size_t t = 0; t < r.coordinated.import_kw.size(); ++t)
                                          m = std::max(m, r.coordinated.import_kw[t] - r.coordinated.cap_kw[t]);
                                      return m;
                                  }())}});
    }
    return rows;
}

void write_case(const CaseResult& r, const fs::path& dir) {
    fs::create_directories(dir);
    const auto& inst = r.instance;
    std::vector<int> ids;
    for (const auto& p : inst.prosumers) ids.push_back(p.id);

    scenario::write_regime_csv(r.no_dr, dir / "regime_no_dr.csv");
    scenario::write_regime_csv(r.uncoordinated, dir / "regime_uncoordinated.csv");
    {
        CsvWriter w(dir / "c_ext.csv", {"prosumer_id", "c_ext"});
        for (std::size_t i = 0; i < ids.size(); ++i) w.row({std::to_string(ids[i]), fmt_num(r.c_ext[i])});
    }
    {
        CsvWriter w(dir / "summary.csv", {"key", "value"});
        for (const auto& [k, v] : summary_rows(r)) w.row({k, v});
    }
    {
        std::ostringstream log;
        log << "status " << r.status << "\n"
            << "solver " << solver::to_string(r.outcome.solve.status) << " nodes=" << r.outcome.solve.nodes
            << " objective=" << fmt_num(r.outcome.solve.objective) << " bound=" << fmt_num(r.outcome.solve.bound)
            << " wall_seconds=" << fmt_fixed(r.outcome.solve.wall_seconds, 3) << "\n";
        if (!r.message.empty()) log << "error " << r.message << "\n";
        write_text(dir / "solve.log", log.str());
    }
    if (!r.outcome.has_solution()) return;

    const auto& o = r.outcome;
    scenario::write_regime_csv(r.coordinated, dir / "regime_coordinated.csv");
    bilevel::write_prices_csv(inst, o.prices, dir / "prices.csv");
    dispatch::write_dispatch_csv(dir / "dispatch.csv", ids, o.dispatch);
    dispatch::write_duals_csv(dir / "duals.csv", ids, o.duals);
    network::write_flow_csv(o.state, dir / "flow.csv");
    network::write_trade_csv(o.state, dir / "trade.csv");
    bilevel::write_settlement_csv(o.settlement, dir / "settlement.csv");
    validation::write_report_csv(r.report, dir / "validation.csv");
    write_text(dir / "validation.txt", validation::format_report(r.report));

    write_line_plot(dir / "import_vs_cap.svg", "Feeder import against the capacity limit", "kW",
                    {{"cap", r.coordinated.cap_kw, true},
                     {"coordinated", r.coordinated.import_kw, false},
                     {"uncoordinated", r.uncoordinated.import_kw, false},
                     {"no DR", r.no_dr.import_kw, false}});
    std::vector<std::string> rows, cols;
    for (int id : ids) rows.push_back("member " + std::to_string(id));
    for (int t = 1; t <= inst.horizon(); ++t) cols.push_back(std::to_string(t));
    write_heat_table(dir / "prices.svg", "Prices [DKK/kWh]", rows, cols, o.prices.x);
}

CaseResult run_case(const HarnessConfig& config, const fs::path& out_dir) {
    const model::Instance inst = load_case(config);
    fs::create_directories(out_dir);
    CaseResult r = solve_case(inst, out_dir);
    write_text(out_dir / "config.txt", format_config(config));
    write_case(r, out_dir);
    return r;
}

const SweepCell* SweepResult::find(double beta, double variation) const {
    for (const auto& c : cells)
        if (c.beta == beta && c.variation == variation) return &c;
    return nullptr;
}

bool SweepResult::monotone() const {
    return std::all_of(trends.begin(), trends.end(), [](const TrendCheck& t) { return t.ok; });
}

std::vector<TrendCheck> check_trends(const std::vector<SweepCell>& cells) {
    auto solved = [](const SweepCell& c) { return c.error.empty() && std::isfinite(c.objective); };
    auto along = [&](const std::string& axis, auto key_fixed, auto key_moving) {
        std::map<double, std::vector<const SweepCell*>> lines;
        for (const auto& c : cells)
            if (solved(c)) lines[key_fixed(c)].push_back(&c);
        std::vector<TrendCheck> out;
        for (auto& [fixed, line] : lines) {
            std::sort(line.begin(), line.end(),
                      [&](const SweepCell* a, const SweepCell* b) { return key_moving(*a) < key_moving(*b); });
            for (std::size_t k = 0; k + 1 < line.size(); ++k) {
                const SweepCell& a = *line[k];
                const SweepCell& b = *line[k + 1];
                TrendCheck tc;
                tc.axis = axis;
                tc.fixed = fixed;
                tc.from = key_moving(a);
                tc.to = key_moving(b);
                tc.increase = b.cost - a.cost;
                const double reg_a = a.objective - a.cost;
                const double reg_b = b.objective - b.cost;
                tc.allowance = std::max(0.0, b.objective - b.bound) + std::max(0.0, reg_a - reg_b) +
                               1e-7 * (1.0 + std::abs(a.cost));
                tc.ok = tc.increase <= tc.allowance;
                out.push_back(tc);
            }
        }
        return out;
    };
    auto by_beta = along("beta", [](const SweepCell& c) { return c.variation; },
                         [](const SweepCell& c) { return c.beta; });
    auto by_v = along("variation", [](const SweepCell& c) { return c.beta; },
                      [](const SweepCell& c) { return c.variation; });
    by_beta.insert(by_beta.end(), by_v.begin(), by_v.end());
    return by_beta;
}

SweepResult sweep_heatmap(const HarnessConfig& config, int jobs) {
    if (config.beta_grid.empty() || config.variation_grid.empty())
        throw InputError(config.source.string(), 0, "beta_grid", "sweep grids must be nonempty");
    const model::Instance base = model::load_instance(config.files, config.pricing);

    SweepResult s;
    for (double b : config.beta_grid)
        for (double v : config.variation_grid) {
            SweepCell c;
            c.beta = b;
            c.variation = v;
            c.below_floor = v < config.v_floor;
            s.cells.push_back(c);
        }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < s.cells.size(); k = next++) {
            SweepCell& c = s.cells[k];
            try {
                const model::Instance inst = scenario::apply_scenario(base, c.variation, c.beta);
                const CaseResult r = solve_case(inst);
                c.status = r.status;
                c.nodes = r.outcome.solve.nodes;
                if (r.outcome.has_solution()) {
                    c.cost = r.outcome.community_cost;
                    c.objective = r.outcome.solve.objective;
                    c.bound = r.outcome.solve.bound;
                    c.gap = r.outcome.solve.gap;
                    c.shed_kw = total(r.coordinated.shed_kw);
                } else {
                    c.cost = c.objective = c.gap = NAN;
                    c.bound = r.outcome.solve.bound;
                }
            } catch (const std::exception& e) {
                c.status = "error";
                c.error = e.what();
                c.cost = c.objective = c.bound = c.gap = NAN;
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(s.cells.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < n; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    s.trends = check_trends(s.cells);
    return s;
}

void write_sweep(const SweepResult& s, const fs::path& dir) {
    fs::create_directories(dir);
    {
        CsvWriter w(dir / "sweep.csv", {"beta", "variation", "cost", "gap", "status", "shed_kw", "below_floor"});
        for (const auto& c : s.cells)
            w.row({fmt_num(c.beta), fmt_num(c.variation), fmt_num(c.cost), fmt_num(c.gap), c.status, fmt_num(c.shed_kw),
                   c.below_floor ? "1" : "0"});
    }
    {
        CsvWriter w(dir / "sweep_trends.csv", {"axis", "fixed", "from", "to", "increase", "allowance", "ok"});
        for (const auto& t : s.trends)
            w.row({t.axis, fmt_num(t.fixed), fmt_num(t.from), fmt_num(t.to), fmt_num(t.increase), fmt_num(t.allowance),
                   t.ok ? "1" : "0"});
    }
    std::vector<double> betas, vs;
    for (const auto& c : s.cells) {
        if (std::find(betas.begin(), betas.end(), c.beta) == betas.end()) betas.push_back(c.beta);
        if (std::find(vs.begin(), vs.end(), c.variation) == vs.end()) vs.push_back(c.variation);
    }
    std::vector<std::string> rows, cols;
    for (double v : vs) rows.push_back("v = " + fmt_num(v));
    for (double b : betas) cols.push_back("beta " + fmt_num(b));
    std::vector<std::vector<double>> grid(vs.size(), std::vector<double>(betas.size(), NAN));
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < betas.size(); ++j)
            if (const SweepCell* c = s.find(betas[j], vs[i])) grid[i][j] = c->cost;
    write_heat_table(dir / "sweep.svg", "Community cost [DKK]", rows, cols, grid);
}

PriceTable report_prices(const std::vector<fs::path>& run_dirs) {
    if (run_dirs.empty()) throw InputError("", 0, "run", "no run directory given");
    PriceTable table;
    std::map<int, std::size_t> row_of;
    for (std::size_t k = 0; k < run_dirs.size(); ++k) {
        const fs::path prices = run_dirs[k] / "prices.csv";
        if (!fs::exists(prices))
            throw InputError(run_dirs[k].string(), 0, "prices.csv", "run directory holds no prices");
        std::string mode = "run" + std::to_string(k + 1);
        if (fs::exists(run_dirs[k] / "summary.csv")) {
            CsvReader sr(run_dirs[k] / "summary.csv");
            sr.expect_header({"key", "value"});
            while (sr.next())
                if (sr.fields().size() == 2 && sr.fields()[0] == "mode") mode = sr.fields()[1];
        }
        table.runs.push_back(mode);

        std::map<int, std::vector<double>> series;
        std::vector<int> order;
        CsvReader r(prices);
        r.expect_header({"prosumer_id", "t", "price"});
        while (r.next()) {
            const int id = r.integer(0, "prosumer_id");
            if (!series.count(id)) order.push_back(id);
            series[id].push_back(r.number(2, "price"));
        }
        if (order.empty()) throw InputError(prices.string(), 0, "price", "no price rows");
        for (int id : order) {
            if (!row_of.count(id)) {
                row_of[id] = table.rows.size();
                PriceRow pr;
                pr.prosumer_id = id;
                table.rows.push_back(pr);
            }
            PriceRow& pr = table.rows[row_of[id]];
            pr.mean.resize(k, NAN);
            pr.min.resize(k, NAN);
            pr.max.resize(k, NAN);
            const auto& x = series[id];
            pr.mean.push_back(total(x) / static_cast<double>(x.size()));
            pr.min.push_back(*std::min_element(x.begin(), x.end()));
            pr.max.push_back(*std::max_element(x.begin(), x.end()));
        }
    }
    for (auto& pr : table.rows) {
        pr.mean.resize(run_dirs.size(), NAN);
        pr.min.resize(run_dirs.size(), NAN);
        pr.max.resize(run_dirs.size(), NAN);
    }
    return table;
}

std::string format_price_table_csv(const PriceTable& t) {
    std::ostringstream out;
    out << "prosumer_id";
    for (const auto& m : t.runs) out << "," << m << "_mean," << m << "_min," << m << "_max";
    out << "\n";
    for (const auto& r : t.rows) {
        out << r.prosumer_id;
        for (std::size_t k = 0; k < t.runs.size(); ++k)
            out << "," << fmt_fixed(r.mean[k], 2) << "," << fmt_fixed(r.min[k], 2) << "," << fmt_fixed(r.max[k], 2);
        out << "\n";
    }
    return out.str();
}

std::string format_price_table(const PriceTable& t) {
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.insert(0, w - s.size(), ' ');
        return s;
    };
    std::ostringstream out;
    out << pad("member", 8);
    for (const auto& m : t.runs) out << "  " << pad(m + " mean", 18) << pad("min", 8) << pad("max", 8);
    out << "\n";
    for (const auto& r : t.rows) {
        out << pad(std::to_string(r.prosumer_id), 8);
        for (std::size_t k = 0; k < t.runs.size(); ++k)
            out << "  " << pad(fmt_fixed(r.mean[k], 2), 18) << pad(fmt_fixed(r.min[k], 2), 8)
                << pad(fmt_fixed(r.max[k], 2), 8);
        out << "\n";
    }
    return out.str();
}

}  // namespace capprice::harness
