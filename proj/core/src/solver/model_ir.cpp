#include "capprice/solver/model_ir.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capprice::solver {

int ModelIR::add_var(std::string name, double lb, double ub, double cost) {
    if (lb > ub) throw std::invalid_argument("variable '" + name + "' has lb > ub");
    const int j = num_vars();
    auto [it, inserted] = index_.emplace(name, j);
    if (!inserted) throw std::invalid_argument("duplicate variable name '" + name + "'");
    vars_.push_back(Variable{std::move(name), lb, ub, cost});
    return j;
}

int ModelIR::add_row(std::string name, Sense sense, std::vector<Term> terms, double rhs,
                     std::string tag) {
    for (const Term& t : terms) {
        if (t.var < 0 || t.var >= num_vars())
            throw std::out_of_range("row '" + name + "' references unknown variable");
    }
    rows_.push_back(LinearRow{std::move(name), sense, std::move(terms), rhs, std::move(tag)});
    return num_rows() - 1;
}

int ModelIR::add_cone(std::string name, std::vector<Term> terms, double bound, std::string tag) {
    for (const Term& t : terms) {
        if (t.var < 0 || t.var >= num_vars())
            throw std::out_of_range("cone '" + name + "' references unknown variable");
    }
    cones_.push_back(ConeRow{std::move(name), std::move(terms), bound, std::move(tag)});
    return static_cast<int>(cones_.size()) - 1;
}

int ModelIR::add_sos1(std::string name, std::vector<int> members) {
    for (int j : members) {
        if (j < 0 || j >= num_vars())
            throw std::out_of_range("SOS1 '" + name + "' references unknown variable");
        if (vars_[static_cast<std::size_t>(j)].lb < 0.0)
            throw std::invalid_argument("SOS1 '" + name + "' member '" +
                                        vars_[static_cast<std::size_t>(j)].name +
                                        "' is not nonnegative");
    }
    sos1_.push_back(Sos1Set{std::move(name), std::move(members)});
    return static_cast<int>(sos1_.size()) - 1;
}

int ModelIR::add_quad(QuadLink link) {
    if (link.epigraph < 0 || link.epigraph >= num_vars())
        throw std::out_of_range("quadratic link '" + link.name + "' has no epigraph variable");
    if (link.lo > link.hi)
        throw std::invalid_argument("quadratic link '" + link.name + "' has empty domain");
    quads_.push_back(std::move(link));
    return static_cast<int>(quads_.size()) - 1;
}

int ModelIR::find_var(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

double ModelIR::objective_value(const std::vector<double>& x) const {
    double v = objective_constant_;
    for (std::size_t j = 0; j < vars_.size(); ++j) v += vars_[j].cost * x[j];
    return v;
}

double row_activity(const LinearRow& row, const std::vector<double>& x) {
    double a = 0.0;
    for (const Term& t : row.terms) a += t.coef * x[static_cast<std::size_t>(t.var)];
    return a;
}

double ModelIR::max_linear_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        worst = std::max(worst, vars_[j].lb - x[j]);
        worst = std::max(worst, x[j] - vars_[j].ub);
    }
    for (const LinearRow& r : rows_) {
        const double a = row_activity(r, x);
        switch (r.sense) {
            case Sense::Eq: worst = std::max(worst, std::abs(a - r.rhs)); break;
            case Sense::Le: worst = std::max(worst, a - r.rhs); break;
            case Sense::Ge: worst = std::max(worst, r.rhs - a); break;
        }
    }
    return worst;
}

double ModelIR::max_sos1_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (const Sos1Set& s : sos1_) {
        double sum = 0.0;
        double largest = 0.0;
        for (int j : s.members) {
            const double v = std::abs(x[static_cast<std::size_t>(j)]);
            sum += v;
            largest = std::max(largest, v);
        }
        worst = std::max(worst, sum - largest);
    }
    return worst;
}

}  // namespace capprice::solver
