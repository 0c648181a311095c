#pragma once

#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace capprice::solver {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Eq, Le, Ge };

struct Term {
    int var = -1;
    double coef = 0.0;
};

struct Variable {
    std::string name;
    double lb = 0.0;
    double ub = kInf;
    double cost = 0.0;
};

struct LinearRow {
    std::string name;
    Sense sense = Sense::Eq;
    std::vector<Term> terms;
    double rhs = 0.0;
    std::string tag;
};

/// sum_j (coef_j * x_j)^2 <= bound
struct ConeRow {
    std::string name;
    std::vector<Term> terms;
    double bound = 0.0;
    std::string tag;
};

/// At most one member may be nonzero. Members must be nonnegative variables.
struct Sos1Set {
    std::string name;
    std::vector<int> members;
};

/// epigraph >= weight * (sum terms + constant)^2, with the affine argument
/// known to lie in [lo, hi]. Backends either keep the quadratic or replace it
/// with an over-estimating piecewise-linear envelope on that domain.
struct QuadLink {
    std::string name;
    int epigraph = -1;
    double weight = 0.0;
    std::vector<Term> terms;
    double constant = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    /// Breakpoint layout for piecewise-linear backends.
    enum class Grid { Uniform, Geometric } grid = Grid::Uniform;
    std::string tag;
};

/// Solver-agnostic optimization model: minimize the linear objective over
/// linear rows, cone rows, SOS1 sets and quadratic epigraph links.
class ModelIR {
public:
    int add_var(std::string name, double lb, double ub, double cost = 0.0);
    int add_row(std::string name, Sense sense, std::vector<Term> terms, double rhs,
                std::string tag = {});
    int add_cone(std::string name, std::vector<Term> terms, double bound, std::string tag = {});
    int add_sos1(std::string name, std::vector<int> members);
    int add_quad(QuadLink link);

    int find_var(const std::string& name) const;  // -1 when absent
    const Variable& var(int j) const { return vars_[static_cast<std::size_t>(j)]; }
    Variable& var(int j) { return vars_[static_cast<std::size_t>(j)]; }

    const std::vector<Variable>& vars() const { return vars_; }
    const std::vector<LinearRow>& rows() const { return rows_; }
    std::vector<LinearRow>& rows() { return rows_; }
    const std::vector<ConeRow>& cones() const { return cones_; }
    const std::vector<Sos1Set>& sos1() const { return sos1_; }
    const std::vector<QuadLink>& quads() const { return quads_; }

    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }

    double objective_constant() const { return objective_constant_; }
    void set_objective_constant(double c) { objective_constant_ = c; }
    void add_cost(int j, double c) { vars_[static_cast<std::size_t>(j)].cost += c; }

    /// Linear objective plus constant at a given point.
    double objective_value(const std::vector<double>& x) const;

    /// Largest violation over linear rows and variable bounds.
    double max_linear_violation(const std::vector<double>& x) const;

    /// For each SOS1 set: sum of member values minus the largest one.
    double max_sos1_violation(const std::vector<double>& x) const;

private:
    std::vector<Variable> vars_;
    std::vector<LinearRow> rows_;
    std::vector<ConeRow> cones_;
    std::vector<Sos1Set> sos1_;
    std::vector<QuadLink> quads_;
    std::unordered_map<std::string, int> index_;
    double objective_constant_ = 0.0;
};

double row_activity(const LinearRow& row, const std::vector<double>& x);

}  // namespace capprice::solver
