#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "capprice/model/instance.hpp"
#include "capprice/solver/model_ir.hpp"
#include "capprice/solver/simplex.hpp"

namespace capprice::dispatch {

/// Primal variable families of one member's dispatch problem, in the order
/// of their nonnegativity multipliers mu1..mu8.
enum Family { PPlus, PMinus, QPlus, QMinus, PCh, PDis, Energy, Shed };
inline constexpr int kFamilies = 8;
const char* family_name(int f);

struct DispatchSolution {
    std::array<std::vector<double>, kFamilies> v;  // v[family][t]
    double objective = 0.0;

    const std::vector<double>& p_plus() const { return v[PPlus]; }
    const std::vector<double>& p_minus() const { return v[PMinus]; }
    const std::vector<double>& q_plus() const { return v[QPlus]; }
    const std::vector<double>& q_minus() const { return v[QMinus]; }
    const std::vector<double>& p_ch() const { return v[PCh]; }
    const std::vector<double>& p_dis() const { return v[PDis]; }
    const std::vector<double>& energy() const { return v[Energy]; }
    const std::vector<double>& shed() const { return v[Shed]; }
    int horizon() const { return static_cast<int>(v[PPlus].size()); }
};

/// Multipliers in the Lagrangian convention L = f + sum lambda*g - sum mu*x
/// + sum mu*(x - cap). lambda3[0] is unused; period 1 carries lambda2.
struct DualSolution {
    std::vector<double> lambda1;
    double lambda2 = 0.0;
    std::vector<double> lambda3;
    std::vector<double> lambda4;
    std::vector<double> lambda5;
    std::array<std::vector<double>, 12> mu;  // mu[k-1][t]
};

/// One member's dispatch LP with handles to its variables and rows.
struct LowerLp {
    solver::ModelIR ir;
    int horizon = 0;
    std::array<std::vector<int>, kFamilies> var;
    std::vector<int> balance_row;
    std::vector<int> storage_row;  // row 0 is the cyclic link
    std::vector<int> react_plus_row;
    std::vector<int> react_minus_row;
};

/// min sum_t price_t p+ - export_price_t p- + alpha_shed d. An empty
/// export_price means the import price applies to both directions.
LowerLp build_lower_lp(const model::ProsumerAssets& assets, const std::vector<double>& price,
                       double alpha_shed, const std::vector<double>& export_price = {});

struct LowerResult {
    solver::LpStatus status = solver::LpStatus::Optimal;
    DispatchSolution dispatch;
    DualSolution duals;
    double dual_objective = 0.0;
};

/// Solves with the native simplex and maps simplex duals onto the
/// multiplier convention above. Throws SolverError unless optimal.
LowerResult solve_lower_lp(const LowerLp& lp, const solver::SimplexOptions& options = {});

/// Convenience: build and solve in one call.
LowerResult solve_member(const model::ProsumerAssets& assets, const std::vector<double>& price,
                         double alpha_shed, const std::vector<double>& export_price = {});

/// Objective of the LP dual at the given multipliers.
double dual_objective(const model::ProsumerAssets& assets, const DualSolution& duals);

/// Linear stand-in for sum_t price_t (p+ - p-):
///   sum_t [lambda1 (PV - D) - Pbat (mu9 + mu10) - Ebar mu11 - D mu12 - alpha_shed d].
/// Throws StaleDualsError when a multiplier is negative or the shed
/// complementarity (mu8 d = 0, mu12 (D - d) = 0) is off by more than tol.
double payment_identity(const model::ProsumerAssets& assets, const DualSolution& duals,
                        const std::vector<double>& shed, double alpha_shed, double tol = 1e-7);

/// Rows of (prosumer_id, t, variable, value); t is 1-based.
void write_dispatch_csv(const std::filesystem::path& path, const std::vector<int>& ids,
                        const std::vector<DispatchSolution>& dispatch);
void write_duals_csv(const std::filesystem::path& path, const std::vector<int>& ids,
                     const std::vector<DualSolution>& duals);

}  // namespace capprice::dispatch
