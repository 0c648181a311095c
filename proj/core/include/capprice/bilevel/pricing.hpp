#pragma once

#include <filesystem>
#include <vector>

#include "capprice/bilevel/assembly.hpp"
#include "capprice/dispatch/lower_level.hpp"
#include "capprice/network/lindistflow.hpp"
#include "capprice/solver/branch_bound.hpp"

namespace capprice::bilevel {

struct PriceSchedule {
    std::vector<std::vector<double>> x;  // [member][t], DKK/kWh
    double x_max = 0.0;
};

struct SettlementRecord {
    std::vector<int> ids;
    std::vector<double> payment;  // sum_t x (p+ - p-)
    std::vector<double> c_ext;
    std::vector<double> w_minus;  // benefit
    std::vector<double> w_plus;   // loss
    double v_plus = 0.0;
    double v_minus = 0.0;
    double mean_minus = 0.0;
    double mean_plus = 0.0;
    std::vector<double> delta;  // baseline residual load per member
    std::vector<double> share;  // delta / sum delta
};

/// Payments from prices and dispatch; slacks are the positive and negative
/// parts of payment - c_ext.
SettlementRecord settle(const model::Instance& inst, const PriceSchedule& prices,
                        const std::vector<dispatch::DispatchSolution>& dispatch,
                        const std::vector<double>& c_ext);

struct PricingOutcome {
    solver::SolveResult solve;
    PriceSchedule prices;
    std::vector<dispatch::DispatchSolution> dispatch;
    std::vector<dispatch::DualSolution> duals;
    network::CommunityState state;
    SettlementRecord settlement;
    double community_cost = 0.0;

    bool has_solution() const { return solve.has_solution(); }
};

/// Branch-and-bound settings derived from the instance's pricing config.
solver::BranchBoundOptions native_options(const model::PricingConfig& config);

/// Assembles, solves with the configured backend and extracts the solution.
/// work_dir holds the interchange files of the external backend.
PricingOutcome solve_pricing(const model::Instance& inst, const std::vector<double>& c_ext,
                             const std::filesystem::path& work_dir = {});

/// Reads every upper- and lower-level quantity out of a solved assembly.
PricingOutcome extract_outcome(const model::Instance& inst, const Assembly& a, const solver::SolveResult& r);

/// prosumer_id,t,price with periods numbered from 1.
void write_prices_csv(const model::Instance& inst, const PriceSchedule& prices,
                      const std::filesystem::path& path);
/// prosumer_id,payment,c_ext,w_minus,w_plus,delta,share.
void write_settlement_csv(const SettlementRecord& s, const std::filesystem::path& path);

}  // namespace capprice::bilevel
