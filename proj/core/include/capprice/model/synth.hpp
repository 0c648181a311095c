#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace capprice::model {

struct ProfileShape {
    double base_kw = 0.4;
    double morning_peak_kw = 0.8;
    double evening_peak_kw = 1.4;
    double pv_peak_kw = 2.5;
    double noise = 0.1;  // relative multiplicative noise on demand
    /// Member indices that own PV.
    std::vector<int> pv_owners;
};

struct Profiles {
    std::vector<std::vector<double>> demand_kw;  // [member][t]
    std::vector<std::vector<double>> pv_kw;
};

/// Deterministic synthetic demand (double peak around 08:00 and 19:00) and PV
/// (bell between 06:00 and 18:00). The horizon is stretched over one day.
Profiles synth_profiles(std::uint64_t seed, int members, int horizon, const ProfileShape& shape);

/// CSV in the profiles file schema; member k is written as prosumer id k.
void write_profiles_csv(const Profiles& p, const std::filesystem::path& path);

}  // namespace capprice::model
