#pragma once

#include <string>
#include <vector>

namespace capprice::model {

struct NetworkNode {
    int id = 0;
    int parent = -1;  // -1 for the reference node
    double r_pu = 0.0;
    double x_pu = 0.0;
    double s_sq_max_pu = 0.0;  // squared apparent-power capacity of the line into the node
};

/// Radial feeder. Node ids are 0..N-1 and nodes[n].id == n; node 0 is the
/// reference. Derived sets are filled by finalize().
struct NetworkModel {
    double s_base_kva = 100.0;
    double v_base_kv = 0.4;
    double u_min = 0.9;
    double u_max = 1.1;
    double p_grid_kw = 0.0;
    double q_grid_kvar = 0.0;
    std::vector<NetworkNode> nodes;

    std::vector<std::vector<int>> children;      // direct children
    std::vector<std::vector<int>> prosumers_at;  // member indices per node
    std::vector<int> order;                      // parents before children

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    /// Every node strictly below n.
    std::vector<int> downstream(int n) const;
    /// Nodes on the path from n's parent up to node 0.
    std::vector<int> upstream(int n) const;
};

struct ProsumerAssets {
    int id = 0;
    int node = 0;
    std::vector<double> demand_kw;
    std::vector<double> pv_kw;
    double p_bat_kw = 0.0;
    double e_bat_kwh = 0.0;
    double eta_ch = 1.0;
    double eta_dis = 1.0;
    double sigma = 0.0;  // reactive-to-active ratio

    bool has_battery() const { return p_bat_kw > 0.0 && e_bat_kwh > 0.0; }
    /// Baseline residual load sum_t (D - PV).
    double residual_total() const;
};

struct DsoContract {
    std::vector<double> p_cap_kw;
    std::vector<double> alpha_dso;
    std::vector<double> beta;
    std::vector<double> y_im;
    std::vector<double> y_ex;
    double alpha_shed = 75.0;
};

struct DayAheadPrices {
    std::vector<double> spot;
};

enum class DistributionMode { None, Equal, Proportional };
enum class Backend { Native, External };

const char* to_string(DistributionMode m);
DistributionMode parse_distribution_mode(const std::string& s);
const char* to_string(Backend b);
Backend parse_backend(const std::string& s);

struct PricingConfig {
    double rho = 1e-6;
    DistributionMode mode = DistributionMode::None;
    double gamma = 0.0;
    double feasibility_tol = 1e-6;
    double gap_tol = 1e-6;
    Backend backend = Backend::Native;
    std::string external_command;
    int cone_segments = 32;
    long node_limit = 200000;
    double time_limit_seconds = 300.0;
};

struct Instance {
    NetworkModel network;
    std::vector<ProsumerAssets> prosumers;
    DsoContract contract;
    DayAheadPrices prices;
    PricingConfig config;

    int horizon() const { return static_cast<int>(prices.spot.size()); }
    int members() const { return static_cast<int>(prosumers.size()); }
    /// Community residual demand per period, sum_i (D - PV).
    std::vector<double> community_residual() const;
};

/// Fills children, prosumers_at and order. Throws std::invalid_argument when
/// the parent relation is not a tree rooted at node 0 or a prosumer node is
/// unknown.
void finalize(NetworkModel& net, const std::vector<ProsumerAssets>& prosumers);

}  // namespace capprice::model
