#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "capprice/model/instance.hpp"
#include "capprice/solver/model_ir.hpp"
#include "capprice/solver/polyhedral.hpp"

namespace capprice::network {

/// Community-level trade and the feeder's flow and voltage profile.
/// Node quantities are indexed [node][t]; flows are in kW/kvar at the line
/// into the node (node 0: the feeder head), u is the squared voltage in pu.
struct CommunityState {
    std::vector<double> p_im, p_ex, q_im, q_ex, p_pen;
    std::vector<std::vector<double>> f_p, f_q, u;

    int horizon() const { return static_cast<int>(p_im.size()); }
};

/// Column handles for one member's net injection. Net active power at t is
/// p_plus[t] - p_minus[t]; reactive likewise.
struct InjectionHandles {
    int node = 0;
    std::vector<int> p_plus, p_minus, q_plus, q_minus;
};

enum class ConeMode { Exact, Polygon };

struct FlowOptions {
    ConeMode cone_mode = ConeMode::Exact;
    int cone_segments = 32;
    std::string prefix = "net";
};

/// Column handles of the emitted block, same indexing as CommunityState.
struct FlowBlock {
    std::vector<int> p_im, p_ex, q_im, q_ex;
    std::vector<std::vector<int>> f_p, f_q, u;
};

/// Root balance, flow aggregation over direct children and members at each
/// node, the voltage anchor and drop rows, voltage and feeder bounds, and one
/// capacity cone per line.
FlowBlock build_lindistflow(solver::ModelIR& ir, const model::NetworkModel& net, int horizon,
                            const std::vector<InjectionHandles>& members,
                            const FlowOptions& options = {});

/// Line capacity (fp/S)^2 + (fq/S)^2 <= s_sq. Exact mode adds a cone row;
/// polygon mode adds the edges of the inscribed k-gon. Throws
/// std::invalid_argument for k < 4 in polygon mode.
void add_line_cone(solver::ModelIR& ir, const std::string& name, int fp, int fq, double s_base,
                   double s_sq, ConeMode mode, int segments, const std::string& tag);

/// Polygon edges of cone_rows for a capacity in per-unit squared.
std::vector<solver::PolygonEdge> cone_rows(double s_sq, int segments);

struct FlowViolation {
    std::string check;  // row family, e.g. "root-balance", "voltage-drop", "line-capacity"
    int node = -1;      // -1 for community rows
    int t = 0;
    double residual = 0.0;
};

/// Net injections per node and period: sum over members at the node of
/// (p+ - p-) and (q+ - q-).
struct NodeInjections {
    std::vector<std::vector<double>> p, q;
};

NodeInjections node_injections(const model::NetworkModel& net, int horizon,
                               const std::vector<std::vector<double>>& member_p,
                               const std::vector<std::vector<double>>& member_q);

/// Every violated network row of the state, checked against the exact cone.
/// Aggregation rows are checked only when injections are supplied.
std::vector<FlowViolation> check_flow_feasibility(const model::NetworkModel& net,
                                                  const CommunityState& state, double tol,
                                                  const NodeInjections* injections = nullptr);

/// Flows and voltages implied by injections; trade splits f_p/f_q at the
/// head into import and export parts. p_pen is left at zero.
CommunityState evaluate_state(const model::NetworkModel& net, const NodeInjections& injections);

/// Reads a state back out of a solved model.
CommunityState extract_state(const FlowBlock& block, const std::vector<double>& x);

/// t,node,f_p,f_q,u with periods numbered from 1.
void write_flow_csv(const CommunityState& state, const std::filesystem::path& path);
/// t,p_im,p_ex,q_im,q_ex,p_pen.
void write_trade_csv(const CommunityState& state, const std::filesystem::path& path);

}  // namespace capprice::network
