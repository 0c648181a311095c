#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "capprice/bilevel/pricing.hpp"

namespace capprice::validation {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = true;
};

struct Report {
    std::vector<CheckResult> checks;

    bool passed() const;
    const CheckResult* find(const std::string& name) const;
    /// Names of failing checks, in report order.
    std::vector<std::string> failures() const;
};

/// Recomputes every economic, physical and lower-level condition from the
/// instance data and the candidate solution alone.
Report check_solution(const model::Instance& inst, const bilevel::PriceSchedule& prices,
                      const std::vector<dispatch::DispatchSolution>& dispatch,
                      const network::CommunityState& state, const bilevel::SettlementRecord& settle,
                      double tol);

/// One line per check: name, residual, threshold and PASS or FAIL.
std::string format_report(const Report& r);
/// check_name,residual,threshold,pass
void write_report_csv(const Report& r, const std::filesystem::path& path);

struct BenefitStats {
    double total_benefit = 0.0;
    double total_loss = 0.0;
    std::vector<double> shares;  // w-_i / sum w-, zero when nobody benefits
    double variance = 0.0;       // sample variance of w-
    double proportional_deviation = 0.0;
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

BenefitStats benefit_stats(const bilevel::SettlementRecord& settle);

}  // namespace capprice::validation
