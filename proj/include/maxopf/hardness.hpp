#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "maxopf/customer.hpp"
#include "maxopf/netmodel.hpp"
#include "maxopf/smaxopf.hpp"

namespace maxopf {

struct SubSumInstance {
  std::vector<long long> a;
  long long b = 0;

  void validate() const;
};

/// "a1,a2,...:B".
SubSumInstance parse_subsum(std::string_view text);
std::string format_subsum(const SubSumInstance& ss);

/// Dynamic-programming answer to the subset-sum question.
bool subset_sum(const SubSumInstance& ss);

enum class GadgetVariant { voltage, simplified };

GadgetVariant parse_gadget_variant(std::string_view name);
std::string to_string(GadgetVariant v);

struct GadgetParams {
  double alpha = 0.5;
  double beta = 1.0;
  double delta = 0.1;
  double eps_small = 0.0;  ///< delta / 100 for the voltage gadget
};

/// Single-edge instance (z = 1 + i) whose best utility reaches 1 exactly when
/// the subset-sum instance is a yes-instance.
struct GadgetInstance {
  GadgetVariant variant = GadgetVariant::voltage;
  std::shared_ptr<const RadialNetwork> network;
  OperatingLimits limits;
  std::vector<Customer> customers;
  double scale = 0.0;  ///< the demand multiplier
  GadgetParams params;
  LossMode loss_mode = LossMode::aggregate;
  bool include_lower_voltage = true;
};

/// Exact power-flow gadget. Uses multiplier 1 when it satisfies the bounds
/// the reduction relies on, otherwise the smallest self-consistent one.
GadgetInstance gadget_voltage(const SubSumInstance& ss, double alpha = 0.5, double beta = 1.0, double delta = 0.1);

/// Simplified-constraint gadget with v0 = 1, vmin = 0.81, vmax = 1.21 and
/// no loss bounds.
GadgetInstance gadget_simplified_voltage(const SubSumInstance& ss, double alpha = 0.5, double beta = 1.0);

/// The inequalities on the multiplier that the reduction argument needs.
bool gadget_bounds_hold(const GadgetInstance& g);

/// Best utility of the gadget from the matching exhaustive oracle.
double gadget_best_utility(const GadgetInstance& g);

/// (best utility >= 1) == subset_sum(ss). Throws TooLarge above the oracle guard.
bool verify_reduction(const GadgetInstance& g, const SubSumInstance& ss);

}  // namespace maxopf
