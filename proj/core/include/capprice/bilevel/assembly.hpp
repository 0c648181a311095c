#pragma once

#include <vector>

#include "capprice/dispatch/kkt.hpp"
#include "capprice/model/instance.hpp"
#include "capprice/network/lindistflow.hpp"
#include "capprice/solver/model_ir.hpp"

namespace capprice::bilevel {

/// Single-level model with handles to every upper-level quantity.
struct Assembly {
    solver::ModelIR ir;
    std::vector<std::vector<int>> price;  // [member][t]
    int price_max = -1;
    int price_epigraph = -1;
    std::vector<dispatch::KktBlock> blocks;
    network::FlowBlock flow;
    std::vector<int> p_pen;
    std::vector<int> w_plus, w_minus;
    int v_plus = -1;
    int v_minus = -1;
    int mean_plus = -1;  // equal mode only
    int mean_minus = -1;
    std::vector<double> c_ext;
    /// Largest value any benefit or loss slack can take.
    std::vector<double> slack_box;
};

/// Upper-level objective and economic rows, the feeder block and one KKT block
/// per member with every complementarity pair registered as an SOS1 set. The
/// distribution mode and weight are taken from inst.config. Throws
/// std::invalid_argument when c_ext does not have one entry per member.
Assembly assemble_single_level(const model::Instance& inst, const std::vector<double>& c_ext,
                               const network::FlowOptions& flow = {});

/// gamma * sum_i [(w-_i - mean-)^2 + (w+_i - mean+)^2] with mean variables.
void add_equal_regularizer(Assembly& a, double gamma);

/// gamma * sum_i [(w-_i - s_i sum w-)^2 + (w+_i - s_i sum w+)^2], s_i = delta_i / sum delta.
/// Throws std::invalid_argument when delta sums to zero.
void add_proportional_regularizer(Assembly& a, double gamma, const std::vector<double>& delta);

/// Upper-level cost of a dispatch without the price-cap and distribution
/// regularizers: energy at the feeder head, discounted internal tariff,
/// DSO penalty and shedding.
double community_cost(const model::Instance& inst, const std::vector<double>& p_im,
                      const std::vector<double>& p_ex, const std::vector<double>& p_pen,
                      const std::vector<double>& member_import_sum, const std::vector<double>& shed_sum);
std::vector<double> community_cost_by_period(const model::Instance& inst, const std::vector<double>& p_im,
                                             const std::vector<double>& p_ex, const std::vector<double>& p_pen,
                                             const std::vector<double>& member_import_sum,
                                             const std::vector<double>& shed_sum);

}  // namespace capprice::bilevel
