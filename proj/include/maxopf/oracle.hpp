#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "maxopf/alloc.hpp"
#include "maxopf/customer.hpp"
#include "maxopf/smaxopf.hpp"

namespace maxopf {

struct OracleResult {
  Allocation best_allocation;
  double best_utility = 0.0;
  std::size_t nodes_explored = 0;
  bool exact = false;
};

inline constexpr std::size_t kSimplifiedOracleGuard = 24;
inline constexpr std::size_t kExactOracleGuard = 20;

/// Optimum of the simplified problem: every inelastic assignment is walked in
/// Gray-code order; elastic customers are filled in by the relaxation with the
/// inelastic choice pinned. Ties prefer the lexicographically larger
/// allocation. Throws TooLarge above the guard.
OracleResult brute_force_smaxopf(const SimplifiedLimits& limits, std::span<const Customer> customers,
                                 const RelaxationOptions& relaxation = {});

struct ExactOracleOptions {
  double epsilon = 0.005;  ///< step of the elastic down-scaling search
  LossMode loss_mode = LossMode::aggregate;
  bool include_lower_voltage = true;
  RelaxationOptions relaxation;
};

/// Optimum under the exact power flow: inelastic assignments are tried in
/// decreasing utility order and certified by opf_feasible; elastic customers
/// take the pinned relaxation solution scaled down until the sweep passes.
OracleResult brute_force_maxopf(std::shared_ptr<const RadialNetwork> net, std::span<const Customer> customers,
                                const OperatingLimits& limits, const ExactOracleOptions& options = {});

}  // namespace maxopf
