#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "capprice/dispatch/lower_level.hpp"
#include "capprice/model/instance.hpp"

namespace capprice::scenario {

/// Capacity-curve and tariff settings of one experiment.
struct ScenarioConfig {
    double variation = 1.0;  // v in [0, 1]
    double beta = 0.6;       // uniform tariff discount
    std::vector<double> beta_grid;
    std::vector<double> variation_grid;
    double v_floor = 0.4;
};

/// P_t = B (1 + v s_t), s_t = 1 - 2 (lambda_t - min) / (max - min), with B the
/// mean of the clipped residual demand. Throws std::invalid_argument for a flat
/// price vector with v > 0, v outside [0, 1] or mismatched lengths.
std::vector<double> gen_capacity_curve(const std::vector<double>& spot,
                                       const std::vector<double>& residual, double variation);

/// Copy of the instance with the curve and a uniform discount applied.
model::Instance apply_scenario(const model::Instance& inst, double variation, double beta);

/// Per-period outcome of one regime, in community totals.
struct RegimeResult {
    std::string regime;
    std::vector<double> import_kw, export_kw, cap_kw, shed_kw, penalty_kw, cost_dkk;
    double total_cost = 0.0;

    int horizon() const { return static_cast<int>(import_kw.size()); }
};

/// Nobody shifts: import is the clipped community residual.
RegimeResult baseline_no_dr(const model::Instance& inst);

struct UncoordinatedResult {
    RegimeResult community;
    std::vector<dispatch::DispatchSolution> dispatch;  // before curtailment
    std::vector<std::vector<double>> curtailed_kw;     // [member][t]
    std::vector<double> energy_cost;                   // tariffs on delivered import
    std::vector<double> shed_cost;                     // own shedding plus curtailment
};

/// Every member solves its own LP at spot plus tariffs; imports above the
/// feeder limit are curtailed pro-rata to member import.
UncoordinatedResult baseline_uncoordinated(const model::Instance& inst);

/// Delta_i = sum_t (D - PV) per member.
std::vector<double> demand_shares(const model::Instance& inst);

/// External cost per member: own energy and shed cost in the uncoordinated
/// run plus a Delta-share of its DSO penalty. Throws std::invalid_argument
/// when the shares sum to zero.
std::vector<double> compute_c_ext(const model::Instance& inst, const UncoordinatedResult& unc);
std::vector<double> compute_c_ext(const model::Instance& inst);

/// t,import_kw,cap_kw,shed_kw,cost_dkk with periods numbered from 1.
void write_regime_csv(const RegimeResult& r, const std::filesystem::path& path);

}  // namespace capprice::scenario
