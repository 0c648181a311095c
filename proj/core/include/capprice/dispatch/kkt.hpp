#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "capprice/dispatch/lower_level.hpp"
#include "capprice/solver/model_ir.hpp"

namespace capprice::dispatch {

/// Finite boxes for the block's variables so SOS1 branching acts on bounded
/// columns. Multipliers live in [-dual_box, dual_box] (lambda) or
/// [0, dual_box] (mu); trade variables in [0, trade_box].
struct KktBounds {
    double dual_box = 0.0;
    double trade_box = 0.0;
};

/// Boxes derived from the member's data and the largest price the upper
/// level can set.
KktBounds default_kkt_bounds(const model::ProsumerAssets& assets, double alpha_shed, double price_cap);

/// Variable handles of one emitted block. Complementarity pairs are
/// (mu_k, x) for k = 1..8 and (mu_k, slack) for the four caps.
struct KktBlock {
    std::array<std::vector<int>, kFamilies> primal;
    std::vector<int> lambda1;
    int lambda2 = -1;
    std::vector<int> lambda3;  // entry 0 is -1
    std::vector<int> lambda4;
    std::vector<int> lambda5;
    std::array<std::vector<int>, 12> mu;
    std::array<std::vector<int>, 4> cap_slack;  // Pbat - p_ch, Pbat - p_dis, Ebar - e, D - d
    std::vector<std::pair<int, int>> pairs;     // 12 per period
};

/// Appends primal feasibility, dual feasibility and stationarity of one
/// member's dispatch LP to ir. price_vars[t] is the column holding x_t.
/// Complementarity pairs are returned, not registered.
KktBlock emit_kkt(solver::ModelIR& ir, const model::ProsumerAssets& assets,
                  const std::vector<int>& price_vars, double alpha_shed, const std::string& prefix,
                  const KktBounds& bounds);

/// Linear expression for the member's payment in terms of block variables
/// (the payment identity with duals and shed as columns).
std::vector<solver::Term> payment_terms(const model::ProsumerAssets& assets, const KktBlock& block,
                                        double alpha_shed);

/// Point of the block built from a solved LP and its multipliers.
void fill_kkt_point(const KktBlock& block, const model::ProsumerAssets& assets,
                    const DispatchSolution& dispatch, const DualSolution& duals,
                    std::vector<double>& x);

}  // namespace capprice::dispatch
