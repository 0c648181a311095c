#pragma once

#include <filesystem>

#include "capprice/model/instance.hpp"

namespace capprice::model {

struct InstanceFiles {
    std::filesystem::path network;   // JSON
    std::filesystem::path profiles;  // prosumer_id,t,demand_kw,pv_kw
    std::filesystem::path contract;  // t,p_cap_kw,alpha_dkk_per_kwh,beta,y_im,y_ex + alpha_shed line
    std::filesystem::path prices;    // t,lambda_spot

    /// network.json, profiles.csv, contract.csv and prices.csv inside dir.
    static InstanceFiles in_directory(const std::filesystem::path& dir);
};

/// Loads and validates an instance. Periods are numbered 1..T in files. The
/// network file may carry a "prosumers" array with node assignment and battery
/// data; without it every node hosts one asset-free member with id = node id.
/// Throws InputError naming file, line and field.
Instance load_instance(const InstanceFiles& files, const PricingConfig& config);

/// Writes the four instance files into dir using the default names.
void write_instance(const Instance& inst, const std::filesystem::path& dir);

}  // namespace capprice::model
