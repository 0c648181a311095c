#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "capprice/bilevel/pricing.hpp"
#include "capprice/common/csv.hpp"
#include "capprice/common/error.hpp"
#include "capprice/common/numfmt.hpp"
#include "capprice/harness/run.hpp"
#include "capprice/model/synth.hpp"
#include "capprice/model/validate.hpp"
#include "capprice/solver/interchange.hpp"

namespace fs = std::filesystem;
using namespace capprice;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string backend;
    int jobs = 1;
    long seed = -1;
};

harness::HarnessConfig load_config(const Common& c) {
    auto config = harness::parse_config(c.config);
    if (!c.backend.empty()) config.pricing.backend = model::parse_backend(c.backend);
    if (c.seed >= 0) config.seed = static_cast<unsigned long>(c.seed);
    return config;
}

int cmd_run(const Common& c) {
    const auto config = load_config(c);
    const auto r = harness::run_case(config, c.out);
    std::cout << "status " << r.status << "\n";
    if (!r.message.empty()) std::cout << r.message << "\n";
    if (r.outcome.has_solution())
        std::cout << "community cost " << fmt_fixed(r.outcome.community_cost, 4) << " DKK (uncoordinated "
                  << fmt_fixed(r.uncoordinated.total_cost, 4) << ", no DR " << fmt_fixed(r.no_dr.total_cost, 4)
                  << ")\n";
    if (!r.report.passed())
        for (const auto& name : r.report.failures()) std::cout << "failed check " << name << "\n";
    std::cout << "wrote " << c.out << "\n";
    return r.exit_code;
}

int cmd_sweep(const Common& c) {
    const auto config = load_config(c);
    const auto s = harness::sweep_heatmap(config, c.jobs);
    harness::write_sweep(s, c.out);
    bool all_pass = true;
    for (const auto& cell : s.cells) {
        std::cout << "beta=" << fmt_num(cell.beta) << " v=" << fmt_num(cell.variation) << " " << cell.status
                  << " cost=" << fmt_fixed(cell.cost, 4) << (cell.below_floor ? " below-floor" : "")
                  << (cell.shed_kw > 1e-6 ? " shedding" : "") << "\n";
        all_pass = all_pass && cell.status == "pass";
    }
    for (const auto& t : s.trends)
        if (!t.ok)
            std::cout << "trend violation along " << t.axis << " at " << fmt_num(t.fixed) << ": " << fmt_num(t.from)
                      << " -> " << fmt_num(t.to) << " rises by " << fmt_num(t.increase) << "\n";
    std::cout << "monotone " << (s.monotone() ? "yes" : "no") << "\n";
    return all_pass ? harness::kExitPass : harness::kExitSolverLimit;
}

int cmd_baselines(const Common& c) {
    const auto inst = harness::load_case(load_config(c));
    fs::create_directories(c.out);
    const auto no_dr = scenario::baseline_no_dr(inst);
    const auto unc = scenario::baseline_uncoordinated(inst);
    scenario::write_regime_csv(no_dr, fs::path(c.out) / "regime_no_dr.csv");
    scenario::write_regime_csv(unc.community, fs::path(c.out) / "regime_uncoordinated.csv");
    const auto c_ext = scenario::compute_c_ext(inst, unc);
    CsvWriter w(fs::path(c.out) / "c_ext.csv", {"prosumer_id", "c_ext"});
    for (std::size_t i = 0; i < c_ext.size(); ++i)
        w.row({std::to_string(inst.prosumers[i].id), fmt_num(c_ext[i])});
    std::cout << "no DR cost " << fmt_fixed(no_dr.total_cost, 4) << "\nuncoordinated cost "
              << fmt_fixed(unc.community.total_cost, 4) << "\n";
    return harness::kExitPass;
}

int cmd_validate(const Common& c) {
    const auto inst = harness::load_case(load_config(c));
    const auto diags = model::validate_instance(inst);
    for (const auto& d : diags) std::cout << d.part << " " << d.invariant << ": " << d.message << "\n";
    std::cout << (diags.empty() ? "instance valid" : "instance invalid") << "\n";
    return diags.empty() ? harness::kExitPass : harness::kExitInput;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& out) {
    std::vector<fs::path> dirs(runs.begin(), runs.end());
    const auto table = harness::report_prices(dirs);
    std::cout << harness::format_price_table(table);
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        f << harness::format_price_table_csv(table);
    }
    return harness::kExitPass;
}

int cmd_synth(long seed, int members, int horizon, const std::vector<int>& pv_owners, const std::string& out) {
    model::ProfileShape shape;
    shape.pv_owners = pv_owners;
    const auto p = model::synth_profiles(static_cast<std::uint64_t>(seed < 0 ? 1 : seed), members, horizon, shape);
    model::write_profiles_csv(p, out);
    return harness::kExitPass;
}

int cmd_solve_ir(const std::string& model_path, const std::string& solution_path, int segments, double gap) {
    const auto ir = solver::read_interchange(fs::path(model_path));
    solver::BranchBoundOptions o;
    o.polyhedral.cone_segments = segments;
    o.stop_gap = gap;
    const auto r = solver::branch_and_bound_sos1(ir, o);
    solver::write_solution(ir, r, fs::path(solution_path));
    std::cout << solver::to_string(r.status) << "\n";
    return r.has_solution() ? harness::kExitPass : harness::kExitSolverLimit;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic community pricing under a DSO capacity contract"};
    app.require_subcommand(1);
    Common c;

    auto add_common = [&](CLI::App* sub, bool needs_out) {
        sub->add_option("--config", c.config, "experiment config file")->required()->check(CLI::ExistingFile);
        auto* out = sub->add_option("--out", c.out, "output directory");
        if (needs_out) out->required();
        sub->add_option("--backend", c.backend, "native or external")
            ->check(CLI::IsMember({"native", "external"}));
        sub->add_option("--seed", c.seed, "seed for synthetic data");
    };

    auto* run = app.add_subcommand("run", "solve one case and write a run directory");
    add_common(run, true);
    auto* sweep = app.add_subcommand("sweep", "solve the beta x variation grid");
    add_common(sweep, true);
    sweep->add_option("--jobs", c.jobs, "parallel cells")->check(CLI::PositiveNumber);
    auto* baselines = app.add_subcommand("baselines", "no-DR and uncoordinated regimes only");
    add_common(baselines, true);
    auto* validate = app.add_subcommand("validate", "check the instance referenced by a config");
    add_common(validate, false);

    std::vector<std::string> runs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "price statistics over run directories");
    report->add_option("runs", runs, "run directories, one per distribution mode")->required();
    report->add_option("--out", report_out, "CSV output file");

    long synth_seed = 1;
    int members = 3, horizon = 24;
    std::vector<int> pv_owners;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "write synthetic demand and PV profiles");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--members", members, "member count")->check(CLI::PositiveNumber);
    synth->add_option("--horizon", horizon, "periods")->check(CLI::PositiveNumber);
    synth->add_option("--pv", pv_owners, "member indices owning PV")->delimiter(',');
    synth->add_option("--out", synth_out, "profiles CSV")->required();

    std::string ir_model, ir_solution;
    int ir_segments = 32;
    double ir_gap = 1e-6;
    auto* solve_ir = app.add_subcommand("solve-ir", "solve an interchange model with the native solver");
    solve_ir->add_option("--model", ir_model, "model file")->required()->check(CLI::ExistingFile);
    solve_ir->add_option("--solution", ir_solution, "solution file")->required();
    solve_ir->add_option("--cone-segments", ir_segments, "polygon edges per cone");
    solve_ir->add_option("--gap", ir_gap, "relative stopping gap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : harness::kExitInput;
    }

    try {
        if (*run) return cmd_run(c);
        if (*sweep) return cmd_sweep(c);
        if (*baselines) return cmd_baselines(c);
        if (*validate) return cmd_validate(c);
        if (*report) return cmd_report(runs, report_out);
        if (*synth) return cmd_synth(synth_seed, members, horizon, pv_owners, synth_out);
        if (*solve_ir) return cmd_solve_ir(ir_model, ir_solution, ir_segments, ir_gap);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return harness::kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return harness::kExitInput;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return harness::kExitSolverLimit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
