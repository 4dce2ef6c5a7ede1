#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxopf/customer.hpp"
#include "maxopf/netmodel.hpp"

namespace maxopf {

/// Branch-flow solution on a radial network. Vectors are indexed by BusIndex
/// (v) and EdgeIndex (S, l).
struct PowerFlowState {
  std::vector<double> v;    ///< |V_i|^2 (p.u.^2)
  std::vector<Complex> S;   ///< sending-end power of each edge (p.u.)
  std::vector<double> l;    ///< |I_e|^2 (p.u.^2)
  Complex s0;               ///< root injection, equal to -S of the root edge
  int iterations = 0;
};

struct SweepOptions {
  double tolerance = 1e-10;
  int max_iterations = 100;
  /// Consecutive iterations of residual growth treated as divergence.
  int growth_window = 10;
};

/// Backward/forward sweep of the branch flow model for fixed bus loads.
/// `bus_loads` is indexed by BusIndex; the root entry is ignored.
/// Throws NonConvergence when the iteration diverges, exceeds its cap, or
/// produces a non-positive voltage.
PowerFlowState sweep_solve(const RadialNetwork& net, std::span<const Complex> bus_loads, double v0,
                           const SweepOptions& options = {});

/// Largest absolute residual of each branch-flow equation.
struct BfmResiduals {
  double current = 0.0;  ///< |l_e v_i - |S_e|^2|
  double voltage = 0.0;  ///< v_j - v_i - |z|^2 l + 2 Re(z* S)
  double balance = 0.0;  ///< S_e - sum children S - load - z l
  double root = 0.0;     ///< s0 + S of the root edge

  double max() const;
};

BfmResiduals bfm_residuals(const RadialNetwork& net, std::span<const Complex> bus_loads,
                           const PowerFlowState& state);

/// Measured constraint violation of a power-flow state.
struct ViolationReport {
  double capacity_beta = 0.0;  ///< max_e |S_e| / C_e
  double voltage_beta = 0.0;   ///< max_j max(vmin/v_j, v_j/vmax) over non-root buses
  bool feasible = true;
  std::optional<EdgeIndex> worst_edge;
  std::optional<BusIndex> worst_bus;
};

/// Absolute slack applied to capacity (p.u.) and voltage (p.u.^2) checks.
inline constexpr double kLimitSlack = 1e-9;

ViolationReport check_limits(const PowerFlowState& state, const OperatingLimits& limits, const RadialNetwork& net);

/// Per-bus load sum_k s_k x_k.
std::vector<Complex> assemble_bus_loads(const RadialNetwork& net, std::span<const Customer> customers,
                                        std::span<const double> x);

struct FeasibilityCheck {
  bool feasible = false;
  ViolationReport report;
  std::optional<PowerFlowState> state;  ///< absent when the sweep failed
  std::string reason;                   ///< empty when feasible
};

/// Exact feasibility of a fixed allocation: the sweep must converge and every
/// capacity and voltage limit must hold.
FeasibilityCheck opf_feasible(const RadialNetwork& net, std::span<const Customer> customers,
                              std::span<const double> x, const OperatingLimits& limits);

/// Debug dumps: `bus,v_sq` and `edge,S_re,S_im,l`.
void write_bus_csv(std::ostream& os, const RadialNetwork& net, const PowerFlowState& state);
void write_edge_csv(std::ostream& os, const RadialNetwork& net, const PowerFlowState& state);

}  // namespace maxopf
