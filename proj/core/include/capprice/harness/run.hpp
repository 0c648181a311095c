#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "capprice/bilevel/pricing.hpp"
#include "capprice/harness/config.hpp"
#include "capprice/scenario/baselines.hpp"
#include "capprice/validation/check.hpp"

namespace capprice::harness {

enum ExitCode : int { kExitPass = 0, kExitValidation = 2, kExitSolverLimit = 3, kExitInput = 4 };

struct CaseResult {
    std::string status;  // pass | validation-failure | solver-limit | infeasible
    int exit_code = kExitPass;
    std::string message;  // solver error text when no solve took place
    model::Instance instance;
    scenario::RegimeResult no_dr;
    scenario::RegimeResult uncoordinated;
    scenario::RegimeResult coordinated;
    std::vector<double> c_ext;
    bilevel::PricingOutcome outcome;
    validation::Report report;
    validation::BenefitStats stats;
};

/// Baselines, pricing solve, validation and benefit statistics without any
/// file output. A SolverError is recorded as a solver-limit result.
CaseResult solve_case(const model::Instance& inst, const std::filesystem::path& work_dir = {});

/// Community totals per period of a solved pricing problem.
scenario::RegimeResult coordinated_regime(const model::Instance& inst, const bilevel::PricingOutcome& outcome);

/// Writes regimes, prices, dispatch, duals, flows, trades, settlement,
/// validation report, summary and plots into dir. Nothing written depends on
/// wall time except solve.log.
void write_case(const CaseResult& r, const std::filesystem::path& dir);

/// Loads the case, solves it and writes the run directory.
CaseResult run_case(const HarnessConfig& config, const std::filesystem::path& out_dir);

/// key,value rows written to summary.csv.
std::vector<std::pair<std::string, std::string>> summary_rows(const CaseResult& r);

struct SweepCell {
    double beta = 0.0;
    double variation = 0.0;
    std::string status;
    double cost = 0.0;       // community cost of the incumbent
    double objective = 0.0;  // incumbent objective including regularizers
    double bound = 0.0;      // certified lower bound on the objective
    double gap = 0.0;        // relative
    double shed_kw = 0.0;
    bool below_floor = false;
    long nodes = 0;
    std::string error;
};

struct TrendCheck {
    std::string axis;  // "beta" or "variation"
    double fixed = 0.0;
    double from = 0.0;
    double to = 0.0;
    double increase = 0.0;   // cost(to) - cost(from)
    double allowance = 0.0;  // certified gaps plus the regularizer change
    bool ok = true;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // beta-major, grid order
    std::vector<TrendCheck> trends;

    const SweepCell* find(double beta, double variation) const;
    bool monotone() const;
};

/// Solves one case per (beta, variation) grid point with a pool of jobs
/// threads. A failing cell is recorded with its status and the sweep goes on.
SweepResult sweep_heatmap(const HarnessConfig& config, int jobs);

/// Cost must not rise as beta or variation grows, beyond what the two
/// incumbents' certified gaps and regularizer terms can explain.
std::vector<TrendCheck> check_trends(const std::vector<SweepCell>& cells);

/// sweep.csv, sweep_trends.csv and sweep.svg.
void write_sweep(const SweepResult& s, const std::filesystem::path& dir);

struct PriceRow {
    int prosumer_id = 0;
    std::vector<double> mean, min, max;  // one entry per run
};

struct PriceTable {
    std::vector<std::string> runs;  // distribution mode of each run
    std::vector<PriceRow> rows;
};

/// Per-member mean, min and max of the prices in each run directory. Throws
/// InputError when a directory holds no prices.csv.
PriceTable report_prices(const std::vector<std::filesystem::path>& run_dirs);

/// prosumer_id followed by <mode>_mean,<mode>_min,<mode>_max per run.
std::string format_price_table_csv(const PriceTable& t);
/// Aligned text with one row per member.
std::string format_price_table(const PriceTable& t);

}  // namespace capprice::harness
