#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "capprice/solver/model_ir.hpp"

namespace capprice::solver {

/// Purely linear problem in column-compressed form:
///   min c'x + c0   s.t.  row_lo <= A x <= row_hi,  lb <= x <= ub.
struct LpProblem {
    int num_cols = 0;
    int num_rows = 0;
    std::vector<double> cost;
    std::vector<double> lb;
    std::vector<double> ub;
    std::vector<double> row_lo;
    std::vector<double> row_hi;
    std::vector<int> col_start;  // size num_cols + 1
    std::vector<int> row_index;
    std::vector<double> value;
    double objective_constant = 0.0;

    /// Linear part of a ModelIR; fails if it still holds cones or quadratic links.
    static LpProblem from_linear_model(const ModelIR& ir);

    /// Builds the column-compressed matrix from row-wise terms.
    static LpProblem from_rows(int num_cols, const std::vector<std::vector<Term>>& rows,
                               std::vector<double> row_lo, std::vector<double> row_hi,
                               std::vector<double> cost, std::vector<double> lb,
                               std::vector<double> ub, double objective_constant = 0.0);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus s);

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, Zero };

/// Status of every structural and logical column; logical r is column num_cols + r.
struct Basis {
    std::vector<VarStatus> status;
    bool empty() const { return status.empty(); }
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;             // structurals
    std::vector<double> row_activity;  // A x
    std::vector<double> row_dual;      // d objective / d row bound
    std::vector<double> reduced_cost;  // c_j - y'A_j
    double infeasibility = 0.0;        // phase-1 residual when infeasible
    int iterations = 0;
    Basis basis;
};

struct SimplexOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    int max_iterations = 200000;
    int refactor_interval = 100;
    int degenerate_before_bland = 60;
    /// The dense basis inverse needs 8 m^2 bytes; larger models are refused
    /// with SolverError instead of exhausting memory.
    int max_rows = 8000;
};

/// Bounded-variable primal simplex on a dense explicit basis inverse.
/// One instance owns its working memory; reuse it across related solves so a
/// warm basis identical to the last one skips refactorization.
class BoundedSimplex {
public:
    explicit BoundedSimplex(const LpProblem& lp, SimplexOptions options = {});

    LpSolution solve();
    /// Solve with overridden structural bounds, optionally from a starting basis.
    LpSolution solve(std::span<const double> lb, std::span<const double> ub,
                     const Basis* start = nullptr);

    const LpProblem& problem() const { return lp_; }

private:
    void load_bounds(std::span<const double> lb, std::span<const double> ub);
    void crash_basis(const Basis* start);
    void place_nonbasic(int j);
    bool factor();
    void compute_basic_values();
    double basic_infeasibility(int pos) const;
    void btran(const std::vector<double>& cb, std::vector<double>& y) const;
    void ftran(int j, std::vector<double>& alpha) const;
    double reduced_cost(int j, const std::vector<double>& y, const std::vector<double>& cost) const;
    void pivot(int pos, int entering, const std::vector<double>& alpha);
    LpSolution finish(LpStatus status, int iterations);

    const LpProblem& lp_;
    SimplexOptions opt_;
    int n_ = 0;
    int m_ = 0;
    std::vector<double> lo_;  // bounds of all n+m columns
    std::vector<double> hi_;
    std::vector<double> x_;
    std::vector<VarStatus> status_;
    std::vector<int> head_;      // basic column at each position
    std::vector<int> position_;  // basis position of a column, -1 if nonbasic
    std::vector<double> binv_;   // m x m, row-major
    bool binv_valid_ = false;
    std::vector<int> factored_head_;
    int updates_since_factor_ = 0;
};

}  // namespace capprice::solver
