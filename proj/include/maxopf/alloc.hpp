#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "maxopf/customer.hpp"
#include "maxopf/netmodel.hpp"
#include "maxopf/powerflow.hpp"
#include "maxopf/smaxopf.hpp"

namespace maxopf {

/// Scans customers by non-decreasing |s| (ties by index) and keeps each one
/// whose addition leaves the simplified constraints satisfied. Every customer
/// is treated as inelastic. Returns the chosen indices in ascending order.
std::vector<std::size_t> greedy_alloc(const SimplifiedLimits& limits, std::span<const Customer> customers);

/// Restricted to `candidates`, with `background` (indexed like customers)
/// counted as fixed load in every check.
std::vector<std::size_t> greedy_alloc(const SimplifiedLimits& limits, std::span<const Customer> customers,
                                      std::span<const std::size_t> candidates,
                                      std::span<const double> background);

struct GroupingTrace {
  double unit = 0.0;                            ///< L = u_max / n^2
  double u_max = 0.0;                           ///< over individually servable candidates
  std::vector<long long> ubar;                  ///< per candidate, floor(u / L)
  std::vector<std::vector<std::size_t>> groups; ///< customer indices per utility band
  std::vector<std::vector<std::size_t>> picks;  ///< greedy result per group
  std::vector<double> group_utility;
  std::vector<std::size_t> excluded;            ///< ubar > n^2
  std::size_t winner = 0;                       ///< index into groups
  bool degenerate = false;                      ///< u_max = 0
};

struct InelasResult {
  std::vector<std::size_t> chosen;
  GroupingTrace trace;
};

/// Groups customers into ceil(2 log2 n) + 1 utility bands, runs greedy_alloc
/// on each band and returns the best band. Degenerate inputs (no positive
/// utility among servable customers) give an empty choice with the flag set.
InelasResult inelas_dem_alloc(const SimplifiedLimits& limits, std::span<const Customer> customers);
InelasResult inelas_dem_alloc(const SimplifiedLimits& limits, std::span<const Customer> customers,
                              std::span<const std::size_t> candidates, std::span<const double> background);

struct RelaxationOptions {
  int tangents = 64;
  double tol = 1e-9;
};

/// Fractional relaxation over the simplified constraints with each norm
/// constraint replaced by supporting half-planes from `tangents` evenly spaced
/// directions, added on demand. Entries of `pinned` that hold a value fix that
/// customer. Throws InfeasibleRelaxation when x = 0 (with pins) is infeasible.
Allocation solve_rmaxopf(const SimplifiedLimits& limits, std::span<const Customer> customers,
                         const RelaxationOptions& options = {},
                         std::span<const std::optional<double>> pinned = {});

struct MixOptions {
  double epsilon = 0.005;
  LossMode loss_mode = LossMode::aggregate;
  bool include_lower_voltage = true;
  RelaxationOptions relaxation;
};

struct MixResult {
  Allocation allocation;
  double delta = 0.0;          ///< capacity reduction of the accepted iteration
  int iterations = 0;
  Allocation fractional_base;  ///< relaxation solution
  double elastic_scale = 1.0;  ///< uniform factor applied to elastic entries
  bool exhausted = false;      ///< no reduction below 1 passed; fallback returned
  FeasibilityCheck check;
};

/// Relaxation once, then growing capacity reductions until the exact power
/// flow of the assembled allocation is feasible.
MixResult mix_dem_alloc(std::shared_ptr<const RadialNetwork> net, std::span<const Customer> customers,
                        const OperatingLimits& limits, const MixOptions& options = {});

}  // namespace maxopf
