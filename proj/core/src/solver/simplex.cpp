#include "capprice/solver/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capprice/common/error.hpp"

namespace capprice::solver {

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

LpProblem LpProblem::from_rows(int num_cols, const std::vector<std::vector<Term>>& rows,
                               std::vector<double> row_lo, std::vector<double> row_hi,
                               std::vector<double> cost, std::vector<double> lb,
                               std::vector<double> ub, double objective_constant) {
    LpProblem lp;
    lp.num_cols = num_cols;
    lp.num_rows = static_cast<int>(rows.size());
    lp.cost = std::move(cost);
    lp.lb = std::move(lb);
    lp.ub = std::move(ub);
    lp.row_lo = std::move(row_lo);
    lp.row_hi = std::move(row_hi);
    lp.objective_constant = objective_constant;

    std::vector<int> count(static_cast<std::size_t>(num_cols) + 1, 0);
    for (const auto& row : rows)
        for (const Term& t : row) ++count[static_cast<std::size_t>(t.var) + 1];
    lp.col_start.assign(static_cast<std::size_t>(num_cols) + 1, 0);
    for (int j = 0; j < num_cols; ++j)
        lp.col_start[static_cast<std::size_t>(j) + 1] =
            lp.col_start[static_cast<std::size_t>(j)] + count[static_cast<std::size_t>(j) + 1];
    lp.row_index.resize(static_cast<std::size_t>(lp.col_start.back()));
    lp.value.resize(static_cast<std::size_t>(lp.col_start.back()));
    std::vector<int> fill(lp.col_start.begin(), lp.col_start.end() - 1);
    for (int r = 0; r < lp.num_rows; ++r) {
        for (const Term& t : rows[static_cast<std::size_t>(r)]) {
            if (t.coef == 0.0) continue;
            const int k = fill[static_cast<std::size_t>(t.var)]++;
            lp.row_index[static_cast<std::size_t>(k)] = r;
            lp.value[static_cast<std::size_t>(k)] = t.coef;
        }
    }
    // Zero coefficients were skipped; compact each column.
    std::vector<int> start(lp.col_start);
    int out = 0;
    for (int j = 0; j < num_cols; ++j) {
        const int begin = start[static_cast<std::size_t>(j)];
        lp.col_start[static_cast<std::size_t>(j)] = out;
        for (int k = begin; k < fill[static_cast<std::size_t>(j)]; ++k) {
            lp.row_index[static_cast<std::size_t>(out)] = lp.row_index[static_cast<std::size_t>(k)];
            lp.value[static_cast<std::size_t>(out)] = lp.value[static_cast<std::size_t>(k)];
            ++out;
        }
    }
    lp.col_start[static_cast<std::size_t>(num_cols)] = out;
    lp.row_index.resize(static_cast<std::size_t>(out));
    lp.value.resize(static_cast<std::size_t>(out));
    return lp;
}

LpProblem LpProblem::from_linear_model(const ModelIR& ir) {
    if (!ir.cones().empty() || !ir.quads().empty())
        throw std::invalid_argument("model still contains cone rows or quadratic links");
    std::vector<std::vector<Term>> rows;
    std::vector<double> lo, hi;
    rows.reserve(ir.rows().size());
    for (const LinearRow& r : ir.rows()) {
        rows.push_back(r.terms);
        switch (r.sense) {
            case Sense::Eq: lo.push_back(r.rhs); hi.push_back(r.rhs); break;
            case Sense::Le: lo.push_back(-kInf); hi.push_back(r.rhs); break;
            case Sense::Ge: lo.push_back(r.rhs); hi.push_back(kInf); break;
        }
    }
    std::vector<double> cost, lb, ub;
    for (const Variable& v : ir.vars()) {
        cost.push_back(v.cost);
        lb.push_back(v.lb);
        ub.push_back(v.ub);
    }
    return from_rows(ir.num_vars(), rows, std::move(lo), std::move(hi), std::move(cost),
                     std::move(lb), std::move(ub), ir.objective_constant());
}

BoundedSimplex::BoundedSimplex(const LpProblem& lp, SimplexOptions options)
    : lp_(lp), opt_(options), n_(lp.num_cols), m_(lp.num_rows) {
    if (m_ > opt_.max_rows)
        throw SolverError("model has " + std::to_string(m_) + " rows which exceeds the dense simplex limit of " +
                          std::to_string(opt_.max_rows) + " (use the external backend)");
    const auto total = static_cast<std::size_t>(n_ + m_);
    lo_.resize(total);
    hi_.resize(total);
    x_.assign(total, 0.0);
    status_.assign(total, VarStatus::AtLower);
    position_.assign(total, -1);
    head_.resize(static_cast<std::size_t>(m_));
}

LpSolution BoundedSimplex::solve() { return solve(lp_.lb, lp_.ub, nullptr); }

void BoundedSimplex::load_bounds(std::span<const double> lb, std::span<const double> ub) {
    for (int j = 0; j < n_; ++j) {
        lo_[static_cast<std::size_t>(j)] = lb[static_cast<std::size_t>(j)];
        hi_[static_cast<std::size_t>(j)] = ub[static_cast<std::size_t>(j)];
    }
    for (int r = 0; r < m_; ++r) {
        lo_[static_cast<std::size_t>(n_ + r)] = lp_.row_lo[static_cast<std::size_t>(r)];
        hi_[static_cast<std::size_t>(n_ + r)] = lp_.row_hi[static_cast<std::size_t>(r)];
    }
}

void BoundedSimplex::place_nonbasic(int j) {
    const auto u = static_cast<std::size_t>(j);
    const bool lo_finite = std::isfinite(lo_[u]);
    const bool hi_finite = std::isfinite(hi_[u]);
    VarStatus& s = status_[u];
    if (s == VarStatus::AtLower && !lo_finite) s = hi_finite ? VarStatus::AtUpper : VarStatus::Zero;
    if (s == VarStatus::AtUpper && !hi_finite) s = lo_finite ? VarStatus::AtLower : VarStatus::Zero;
    if (s == VarStatus::Zero && (lo_finite || hi_finite))
        s = lo_finite ? VarStatus::AtLower : VarStatus::AtUpper;
    switch (s) {
        case VarStatus::AtLower: x_[u] = lo_[u]; break;
        case VarStatus::AtUpper: x_[u] = hi_[u]; break;
        case VarStatus::Zero: x_[u] = 0.0; break;
        case VarStatus::Basic: break;
    }
}

void BoundedSimplex::crash_basis(const Basis* start) {
    const int total = n_ + m_;
    bool usable = start != nullptr && static_cast<int>(start->status.size()) == total &&
                  std::count(start->status.begin(), start->status.end(), VarStatus::Basic) == m_;
    bool reuse = false;
    if (usable && binv_valid_) {
        reuse = true;
        for (int j = 0; j < total && reuse; ++j) {
            const bool want = start->status[static_cast<std::size_t>(j)] == VarStatus::Basic;
            const bool have = position_[static_cast<std::size_t>(j)] >= 0;
            if (want != have) reuse = false;
        }
    }
    if (usable) {
        status_ = start->status;
    } else {
        for (int j = 0; j < n_; ++j) status_[static_cast<std::size_t>(j)] = VarStatus::AtLower;
        for (int r = 0; r < m_; ++r) status_[static_cast<std::size_t>(n_ + r)] = VarStatus::Basic;
    }
    if (!reuse) {
        std::fill(position_.begin(), position_.end(), -1);
        int pos = 0;
        for (int j = 0; j < total; ++j) {
            if (status_[static_cast<std::size_t>(j)] == VarStatus::Basic) {
                head_[static_cast<std::size_t>(pos)] = j;
                position_[static_cast<std::size_t>(j)] = pos;
                ++pos;
            }
        }
        binv_valid_ = false;
    }
    for (int j = 0; j < total; ++j)
        if (status_[static_cast<std::size_t>(j)] != VarStatus::Basic) place_nonbasic(j);
}

bool BoundedSimplex::factor() {
    const auto m = static_cast<std::size_t>(m_);
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<double> w(m * m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const int j = head_[k];
            if (j < n_) {
                for (int p = lp_.col_start[static_cast<std::size_t>(j)];
                     p < lp_.col_start[static_cast<std::size_t>(j) + 1]; ++p)
                    w[static_cast<std::size_t>(lp_.row_index[static_cast<std::size_t>(p)]) * m + k] +=
                        lp_.value[static_cast<std::size_t>(p)];
            } else {
                w[static_cast<std::size_t>(j - n_) * m + k] = -1.0;
            }
        }
        std::vector<double> e(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i) e[i * m + i] = 1.0;
        std::vector<int> pivot_row(m, -1);
        std::vector<char> used(m, 0);
        std::vector<std::size_t> singular;
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t best = m;
            double best_abs = 1e-9;
            for (std::size_t i = 0; i < m; ++i) {
                if (used[i]) continue;
                const double a = std::abs(w[i * m + k]);
                if (a > best_abs) {
                    best_abs = a;
                    best = i;
                }
            }
            if (best == m) {
                singular.push_back(k);
                continue;
            }
            used[best] = 1;
            pivot_row[k] = static_cast<int>(best);
            const double inv = 1.0 / w[best * m + k];
            double* wp = &w[best * m];
            double* ep = &e[best * m];
            for (std::size_t c = 0; c < m; ++c) {
                wp[c] *= inv;
                ep[c] *= inv;
            }
            for (std::size_t i = 0; i < m; ++i) {
                if (i == best) continue;
                const double f = w[i * m + k];
                if (f == 0.0) continue;
                double* wi = &w[i * m];
                double* ei = &e[i * m];
                for (std::size_t c = k; c < m; ++c) wi[c] -= f * wp[c];
                for (std::size_t c = 0; c < m; ++c) ei[c] -= f * ep[c];
            }
        }
        if (singular.empty()) {
            binv_.assign(m * m, 0.0);
            for (std::size_t k = 0; k < m; ++k)
                std::copy_n(&e[static_cast<std::size_t>(pivot_row[k]) * m], m, &binv_[k * m]);
            binv_valid_ = true;
            factored_head_ = head_;
            updates_since_factor_ = 0;
            return attempt == 0;
        }
        // Swap dependent columns for logicals of uncovered rows.
        std::size_t next_row = 0;
        for (std::size_t k : singular) {
            while (used[next_row]) ++next_row;
            used[next_row] = 1;
            const int leaving = head_[k];
            const int logical = n_ + static_cast<int>(next_row);
            position_[static_cast<std::size_t>(leaving)] = -1;
            status_[static_cast<std::size_t>(leaving)] = VarStatus::AtLower;
            place_nonbasic(leaving);
            head_[k] = logical;
            position_[static_cast<std::size_t>(logical)] = static_cast<int>(k);
            status_[static_cast<std::size_t>(logical)] = VarStatus::Basic;
        }
    }
    throw SolverError("basis factorization failed after repair");
}

void BoundedSimplex::compute_basic_values() {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> rhs(m, 0.0);
    for (int j = 0; j < n_; ++j) {
        if (status_[static_cast<std::size_t>(j)] == VarStatus::Basic) continue;
        const double xj = x_[static_cast<std::size_t>(j)];
        if (xj == 0.0) continue;
        for (int p = lp_.col_start[static_cast<std::size_t>(j)];
             p < lp_.col_start[static_cast<std::size_t>(j) + 1]; ++p)
            rhs[static_cast<std::size_t>(lp_.row_index[static_cast<std::size_t>(p)])] -=
                lp_.value[static_cast<std::size_t>(p)] * xj;
    }
    for (int r = 0; r < m_; ++r) {
        const auto j = static_cast<std::size_t>(n_ + r);
        if (status_[j] != VarStatus::Basic) rhs[static_cast<std::size_t>(r)] += x_[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        const double* row = &binv_[i * m];
        for (std::size_t k = 0; k < m; ++k) s += row[k] * rhs[k];
        x_[static_cast<std::size_t>(head_[i])] = s;
    }
}

double BoundedSimplex::basic_infeasibility(int pos) const {
    const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)]);
    if (x_[j] < lo_[j] - opt_.feasibility_tol) return lo_[j] - x_[j];
    if (x_[j] > hi_[j] + opt_.feasibility_tol) return x_[j] - hi_[j];
    return 0.0;
}

void BoundedSimplex::btran(const std::vector<double>& cb, std::vector<double>& y) const {
    const auto m = static_cast<std::size_t>(m_);
    y.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double c = cb[i];
        if (c == 0.0) continue;
        const double* row = &binv_[i * m];
        for (std::size_t k = 0; k < m; ++k) y[k] += c * row[k];
    }
}

void BoundedSimplex::ftran(int j, std::vector<double>& alpha) const {
    const auto m = static_cast<std::size_t>(m_);
    alpha.assign(m, 0.0);
    if (j < n_) {
        for (int p = lp_.col_start[static_cast<std::size_t>(j)];
             p < lp_.col_start[static_cast<std::size_t>(j) + 1]; ++p) {
            const auto r = static_cast<std::size_t>(lp_.row_index[static_cast<std::size_t>(p)]);
            const double v = lp_.value[static_cast<std::size_t>(p)];
            for (std::size_t i = 0; i < m; ++i) alpha[i] += binv_[i * m + r] * v;
        }
    } else {
        const auto r = static_cast<std::size_t>(j - n_);
        for (std::size_t i = 0; i < m; ++i) alpha[i] = -binv_[i * m + r];
    }
}

double BoundedSimplex::reduced_cost(int j, const std::vector<double>& y,
                                    const std::vector<double>& cost) const {
    if (j >= n_) return y[static_cast<std::size_t>(j - n_)];
    double d = cost[static_cast<std::size_t>(j)];
    for (int p = lp_.col_start[static_cast<std::size_t>(j)];
         p < lp_.col_start[static_cast<std::size_t>(j) + 1]; ++p)
        d -= y[static_cast<std::size_t>(lp_.row_index[static_cast<std::size_t>(p)])] *
             lp_.value[static_cast<std::size_t>(p)];
    return d;
}

void BoundedSimplex::pivot(int pos, int entering, const std::vector<double>& alpha) {
    const auto m = static_cast<std::size_t>(m_);
    const auto r = static_cast<std::size_t>(pos);
    const double inv = 1.0 / alpha[r];
    double* pr = &binv_[r * m];
    for (std::size_t k = 0; k < m; ++k) pr[k] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == r) continue;
        const double f = alpha[i];
        if (f == 0.0) continue;
        double* pi = &binv_[i * m];
        for (std::size_t k = 0; k < m; ++k) pi[k] -= f * pr[k];
    }
    const int leaving = head_[r];
    position_[static_cast<std::size_t>(leaving)] = -1;
    head_[r] = entering;
    position_[static_cast<std::size_t>(entering)] = pos;
    status_[static_cast<std::size_t>(entering)] = VarStatus::Basic;
    ++updates_since_factor_;
}

LpSolution BoundedSimplex::solve(std::span<const double> lb, std::span<const double> ub,
                                 const Basis* start) {
    load_bounds(lb, ub);
    for (int j = 0; j < n_; ++j) {
        if (lo_[static_cast<std::size_t>(j)] > hi_[static_cast<std::size_t>(j)] + opt_.feasibility_tol) {
            LpSolution out;
            out.status = LpStatus::Infeasible;
            out.infeasibility = lo_[static_cast<std::size_t>(j)] - hi_[static_cast<std::size_t>(j)];
            return out;
        }
    }
    crash_basis(start);
    if (!binv_valid_ || updates_since_factor_ >= opt_.refactor_interval) factor();
    compute_basic_values();

    const auto m = static_cast<std::size_t>(m_);
    const int total = n_ + m_;
    std::vector<double> full_cost(static_cast<std::size_t>(total), 0.0);
    std::copy(lp_.cost.begin(), lp_.cost.end(), full_cost.begin());
    std::vector<double> zero_cost(static_cast<std::size_t>(total), 0.0);
    std::vector<double> cb(m), y, alpha;

    int iterations = 0;
    int degenerate_run = 0;
    bool verified = false;
    while (true) {
        if (iterations >= opt_.max_iterations) return finish(LpStatus::IterationLimit, iterations);
        if (updates_since_factor_ >= opt_.refactor_interval) {
            factor();
            compute_basic_values();
        }

        bool phase_one = false;
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = static_cast<std::size_t>(head_[i]);
            if (x_[j] < lo_[j] - opt_.feasibility_tol) {
                cb[i] = -1.0;
                phase_one = true;
            } else if (x_[j] > hi_[j] + opt_.feasibility_tol) {
                cb[i] = 1.0;
                phase_one = true;
            } else {
                cb[i] = 0.0;
            }
        }
        if (!phase_one)
            for (std::size_t i = 0; i < m; ++i) cb[i] = full_cost[static_cast<std::size_t>(head_[i])];
        const std::vector<double>& cost = phase_one ? zero_cost : full_cost;
        btran(cb, y);

        const bool bland = degenerate_run > opt_.degenerate_before_bland;
        int entering = -1;
        int direction = 0;
        double best_score = 0.0;
        for (int j = 0; j < total; ++j) {
            const auto u = static_cast<std::size_t>(j);
            const VarStatus s = status_[u];
            if (s == VarStatus::Basic) continue;
            if (lo_[u] == hi_[u]) continue;
            const double d = reduced_cost(j, y, cost);
            int dir = 0;
            if (s == VarStatus::AtLower && d < -opt_.optimality_tol) dir = 1;
            else if (s == VarStatus::AtUpper && d > opt_.optimality_tol) dir = -1;
            else if (s == VarStatus::Zero && std::abs(d) > opt_.optimality_tol) dir = d < 0 ? 1 : -1;
            if (dir == 0) continue;
            if (bland) {
                entering = j;
                direction = dir;
                break;
            }
            if (std::abs(d) > best_score) {
                best_score = std::abs(d);
                entering = j;
                direction = dir;
            }
        }

        if (entering < 0) {
            if (updates_since_factor_ > 0 && !verified) {
                factor();
                compute_basic_values();
                verified = true;
                continue;
            }
            if (phase_one) {
                LpSolution out = finish(LpStatus::Infeasible, iterations);
                double infeas = 0.0;
                for (int i = 0; i < m_; ++i) infeas += basic_infeasibility(i);
                out.infeasibility = infeas;
                return out;
            }
            return finish(LpStatus::Optimal, iterations);
        }
        verified = false;

        ftran(entering, alpha);

        // Harris two-pass ratio test.
        double theta_max = kInf;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = alpha[i];
            if (std::abs(a) < opt_.pivot_tol) continue;
            const double rate = -direction * a;
            const auto j = static_cast<std::size_t>(head_[i]);
            const double xb = x_[j];
            double lim = kInf;
            if (phase_one && xb < lo_[j] - opt_.feasibility_tol) {
                if (rate > 0) lim = (lo_[j] - xb) / rate;
            } else if (phase_one && xb > hi_[j] + opt_.feasibility_tol) {
                if (rate < 0) lim = (xb - hi_[j]) / -rate;
            } else if (rate < 0 && std::isfinite(lo_[j])) {
                lim = (xb - lo_[j] + opt_.feasibility_tol) / -rate;
            } else if (rate > 0 && std::isfinite(hi_[j])) {
                lim = (hi_[j] + opt_.feasibility_tol - xb) / rate;
            }
            theta_max = std::min(theta_max, lim);
        }
        int leave_pos = -1;
        bool leave_upper = false;
        double theta = kInf;
        double best_alpha = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = alpha[i];
            if (std::abs(a) < opt_.pivot_tol) continue;
            const double rate = -direction * a;
            const auto j = static_cast<std::size_t>(head_[i]);
            const double xb = x_[j];
            double lim = kInf;
            bool upper = false;
            if (phase_one && xb < lo_[j] - opt_.feasibility_tol) {
                if (rate > 0) lim = (lo_[j] - xb) / rate;
            } else if (phase_one && xb > hi_[j] + opt_.feasibility_tol) {
                if (rate < 0) {
                    lim = (xb - hi_[j]) / -rate;
                    upper = true;
                }
            } else if (rate < 0 && std::isfinite(lo_[j])) {
                lim = (xb - lo_[j]) / -rate;
            } else if (rate > 0 && std::isfinite(hi_[j])) {
                lim = (hi_[j] - xb) / rate;
                upper = true;
            }
            if (!std::isfinite(lim) || lim > theta_max) continue;
            const bool better = bland ? (leave_pos < 0 || head_[i] < head_[static_cast<std::size_t>(leave_pos)])
                                      : std::abs(a) > best_alpha;
            if (better) {
                best_alpha = std::abs(a);
                leave_pos = static_cast<int>(i);
                leave_upper = upper;
                theta = std::max(lim, 0.0);
            }
        }

        const auto q = static_cast<std::size_t>(entering);
        const double range = hi_[q] - lo_[q];
        const bool can_flip = status_[q] != VarStatus::Zero && std::isfinite(range);
        if (leave_pos < 0 && !can_flip) {
            if (phase_one) throw SolverError("phase-one ratio test found no blocking variable");
            return finish(LpStatus::Unbounded, iterations);
        }
        ++iterations;
        if (can_flip && (leave_pos < 0 || range <= theta)) {
            const double step = direction * range;
            x_[q] += step;
            for (std::size_t i = 0; i < m; ++i)
                if (alpha[i] != 0.0) x_[static_cast<std::size_t>(head_[i])] -= step * alpha[i];
            status_[q] = direction > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
            x_[q] = direction > 0 ? hi_[q] : lo_[q];
            degenerate_run = 0;
            continue;
        }

        const double step = direction * theta;
        x_[q] += step;
        for (std::size_t i = 0; i < m; ++i)
            if (alpha[i] != 0.0) x_[static_cast<std::size_t>(head_[i])] -= step * alpha[i];
        const auto leaving = static_cast<std::size_t>(head_[static_cast<std::size_t>(leave_pos)]);
        status_[leaving] = leave_upper ? VarStatus::AtUpper : VarStatus::AtLower;
        x_[leaving] = leave_upper ? hi_[leaving] : lo_[leaving];
        pivot(leave_pos, entering, alpha);
        degenerate_run = theta < 1e-12 ? degenerate_run + 1 : 0;
    }
}

LpSolution BoundedSimplex::finish(LpStatus status, int iterations) {
    const auto m = static_cast<std::size_t>(m_);
    LpSolution out;
    out.status = status;
    out.iterations = iterations;
    out.x.assign(x_.begin(), x_.begin() + n_);
    out.row_activity.assign(x_.begin() + n_, x_.end());
    std::vector<double> cb(m);
    for (std::size_t i = 0; i < m; ++i) {
        const int j = head_[i];
        cb[i] = j < n_ ? lp_.cost[static_cast<std::size_t>(j)] : 0.0;
    }
    btran(cb, out.row_dual);
    out.reduced_cost.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j)
        out.reduced_cost[static_cast<std::size_t>(j)] =
            status_[static_cast<std::size_t>(j)] == VarStatus::Basic ? 0.0
                                                                      : reduced_cost(j, out.row_dual, lp_.cost);
    double obj = lp_.objective_constant;
    for (int j = 0; j < n_; ++j) obj += lp_.cost[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    out.objective = obj;
    out.basis.status = status_;
    return out;
}

}  // namespace capprice::solver
