#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "capprice/model/io.hpp"

namespace capprice::harness {

/// Flat key = value experiment file. Paths are relative to the file's
/// directory; grids are comma lists; '#' starts a comment.
///
///   instance             directory holding the four instance files
///   network, profiles, contract, prices   per-file overrides
///   variation            capacity-curve factor v (omit to keep the file's cap)
///   beta                 uniform tariff discount (omit to keep the file's)
///   mode                 none | equal | proportional
///   gamma, rho           distribution and price-cap weights
///   backend              native | external
///   external_command     solver command with {model} and {solution}
///   cone_segments, node_limit, time_limit_seconds, feasibility_tol, gap_tol
///   beta_grid, variation_grid, v_floor     sweep settings
///   seed                 synthetic profile seed
struct HarnessConfig {
    std::filesystem::path source;
    model::InstanceFiles files;
    model::PricingConfig pricing;
    bool has_variation = false;
    double variation = 1.0;
    bool has_beta = false;
    double beta = 0.6;
    std::vector<double> beta_grid{0.0, 0.3, 0.6, 0.9};
    std::vector<double> variation_grid{0.5, 0.75, 1.0};
    double v_floor = 0.4;
    unsigned long seed = 1;
};

/// Throws InputError with file, line and key for unknown keys and bad values.
HarnessConfig parse_config(const std::filesystem::path& path);
HarnessConfig parse_config_text(const std::string& text, const std::filesystem::path& origin);

/// Loads the referenced instance and applies variation and beta when given.
model::Instance load_case(const HarnessConfig& config);

/// Canonical text form, one key per line in a fixed order.
std::string format_config(const HarnessConfig& config);

}  // namespace capprice::harness
