#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maxopf/customer.hpp"
#include "maxopf/netmodel.hpp"

namespace maxopf {

/// How the per-edge loss bound l̄_e is chosen.
enum class LossMode { zero, capacity, aggregate };

LossMode parse_loss_mode(std::string_view name);
std::string to_string(LossMode mode);

struct LossBounds {
  std::vector<double> lbar;  ///< per edge, p.u.^2
};

/// zero: 0. capacity: C^2/vmin. aggregate: min(C, downstream sum |s|)^2/vmin.
LossBounds loss_bounds(const RadialNetwork& net, const PathIndex& paths, std::span<const Customer> customers,
                       LossMode mode, double vmin_sq);

/// Constraint data of the simplified problem. Shares the network and path
/// index so limits can be copied cheaply into worker threads.
struct SimplifiedLimits {
  std::shared_ptr<const RadialNetwork> net;
  std::shared_ptr<const PathIndex> paths;
  std::vector<double> c_hat;    ///< effective capacity per edge
  std::vector<double> l_hat;    ///< loss magnitude subtracted from C_e
  std::vector<double> v_upper;  ///< upper voltage window per edge
  std::vector<double> v_lower;  ///< lower voltage window per edge
  std::vector<EdgeIndex> leaves;
  bool include_lower_voltage = true;
  bool check_capacity = true;
  bool check_voltage = true;

  std::size_t edge_count() const { return c_hat.size(); }
};

SimplifiedLimits simplified_limits(std::shared_ptr<const RadialNetwork> net, const LossBounds& bounds,
                                   const OperatingLimits& limits, bool include_lower_voltage = true);

/// Convenience: loss bounds from `mode` and the network's (or default) limits.
SimplifiedLimits make_limits(std::shared_ptr<const RadialNetwork> net, std::span<const Customer> customers,
                             LossMode mode, const OperatingLimits& limits, bool include_lower_voltage = true);

/// Capacity (1 - delta) C_e on every edge, voltage windows of `base` kept.
SimplifiedLimits reduced_capacity_limits(const SimplifiedLimits& base, double delta);

/// Per-customer constants: the edge path and sum_{e' in P_k ∩ P_e} z_{e'}
/// stored per edge, so that Q_k(e) = Re(zsum) s^R + Im(zsum) s^I.
class CustomerGeometry {
 public:
  CustomerGeometry(const SimplifiedLimits& limits, std::span<const Customer> customers);

  std::span<const EdgeIndex> path(std::size_t k) const { return paths_[k]; }
  /// Q_k(e) for every edge e.
  std::span<const double> q(std::size_t k) const { return q_[k]; }
  std::size_t size() const { return paths_.size(); }

 private:
  std::vector<std::vector<EdgeIndex>> paths_;
  std::vector<std::vector<double>> q_;
};

/// True when every z-s angle gap along customer paths is below pi/2, so all
/// Q_k(e) >= 0 and the upper voltage side may be checked on leaf edges only.
bool leaf_reduction_holds(const SimplifiedLimits& limits, std::span<const Customer> customers);

inline constexpr double kConstraintSlack = 1e-12;

struct ConstraintEval {
  std::vector<Complex> flow;     ///< per edge sum_{k: e in P_k} s_k x_k
  std::vector<double> voltage;   ///< per edge sum_k Q_k(e) x_k
  std::vector<EdgeIndex> checked_voltage_edges;
  bool capacity_ok = true;
  bool voltage_ok = true;
  bool feasible = true;
};

ConstraintEval eval_constraints(const SimplifiedLimits& limits, std::span<const Customer> customers,
                                std::span<const double> x);

/// Incremental version of eval_constraints for greedy scans and subset walks.
class ConstraintTracker {
 public:
  ConstraintTracker(const SimplifiedLimits& limits, std::span<const Customer> customers);

  /// Fixed load counted in every check (frozen elastic demand).
  void set_background(std::span<const double> x);
  /// Would adding `fraction` of customer k keep the system feasible? Capacity
  /// is only rechecked on k's path, so the current state must be feasible.
  bool fits(std::size_t k, double fraction = 1.0) const;
  void add(std::size_t k, double fraction = 1.0);
  void remove(std::size_t k, double fraction = 1.0);
  /// Recompute sums from scratch for the given allocation (drift control).
  void reset(std::span<const double> x);
  bool feasible() const;

 private:
  bool capacity_ok(EdgeIndex e, Complex flow) const;
  bool voltage_ok(EdgeIndex e, double value) const;

  const SimplifiedLimits* limits_;
  std::span<const Customer> customers_;
  CustomerGeometry geometry_;
  std::vector<EdgeIndex> voltage_edges_;
  bool upper_all_edges_;
  std::vector<Complex> bg_flow_, flow_;
  std::vector<double> bg_volt_, volt_;
};

}  // namespace maxopf
