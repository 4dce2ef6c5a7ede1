#include "maxopf/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "maxopf/errors.hpp"
#include "maxopf/powerflow.hpp"

namespace maxopf {

namespace {

constexpr double kTie = 1e-12;
constexpr std::uint64_t kResyncPeriod = 4096;

struct Split {
  std::vector<std::size_t> inelastic;
  std::vector<std::size_t> elastic;
  double elastic_utility = 0.0;
};

Split split_customers(std::span<const Customer> customers, std::size_t guard) {
  Split s;
  for (std::size_t k = 0; k < customers.size(); ++k) {
    if (customers[k].elastic) {
      s.elastic.push_back(k);
      s.elastic_utility += customers[k].utility;
    } else {
      s.inelastic.push_back(k);
    }
  }
  if (s.inelastic.size() > guard) {
    throw TooLarge(std::to_string(s.inelastic.size()) + " inelastic customers exceed the oracle guard of " +
                   std::to_string(guard));
  }
  return s;
}

// Maps a subset mask to a key whose numeric order is the lexicographic order
// of the corresponding allocations (first inelastic customer most significant).
std::uint64_t lex_key(std::uint64_t mask, std::size_t width) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < width; ++i) {
    if (mask >> i & 1U) key |= std::uint64_t{1} << (width - 1 - i);
  }
  return key;
}

struct Best {
  double utility = -1.0;
  std::uint64_t key = 0;
  Allocation x;

  bool improves(double u, std::uint64_t k) const {
    return u > utility + kTie || (u >= utility - kTie && k > key);
  }
};

}  // namespace

OracleResult brute_force_smaxopf(const SimplifiedLimits& limits, std::span<const Customer> customers,
                                 const RelaxationOptions& relaxation) {
  const Split split = split_customers(customers, kSimplifiedOracleGuard);
  const std::size_t n = customers.size();
  const std::size_t w = split.inelastic.size();

  ConstraintTracker tracker(limits, customers);
  Allocation x(n, 0.0);
  Best best;
  OracleResult out;

  auto visit = [&](std::uint64_t mask, double u_inelastic) {
    ++out.nodes_explored;
    if (!tracker.feasible()) return;
    const std::uint64_t key = lex_key(mask, w);
    if (split.elastic.empty()) {
      if (best.improves(u_inelastic, key)) best = {u_inelastic, key, x};
      return;
    }
    if (u_inelastic + split.elastic_utility < best.utility - kTie) return;
    std::vector<std::optional<double>> pins(n);
    for (std::size_t k : split.inelastic) pins[k] = x[k];
    Allocation full;
    try {
      full = solve_rmaxopf(limits, customers, relaxation, pins);
    } catch (const InfeasibleRelaxation&) {
      return;
    }
    const double u = total_utility(customers, full);
    if (best.improves(u, key)) best = {u, key, std::move(full)};
  };

  std::uint64_t mask = 0;
  double u_inelastic = 0.0;
  visit(mask, u_inelastic);
  const std::uint64_t total = std::uint64_t{1} << w;
  for (std::uint64_t i = 1; i < total; ++i) {
    const std::size_t bit = static_cast<std::size_t>(std::countr_zero(i));
    const std::size_t k = split.inelastic[bit];
    mask ^= std::uint64_t{1} << bit;
    if (mask >> bit & 1U) {
      x[k] = 1.0;
      tracker.add(k);
      u_inelastic += customers[k].utility;
    } else {
      x[k] = 0.0;
      tracker.remove(k);
      u_inelastic -= customers[k].utility;
    }
    if (i % kResyncPeriod == 0) {
      tracker.reset(x);
      u_inelastic = total_utility(customers, x);
    }
    visit(mask, u_inelastic);
  }

  out.exact = true;
  if (best.utility < 0.0) {
    out.best_allocation.assign(n, 0.0);
    out.best_utility = 0.0;
  } else {
    out.best_allocation = std::move(best.x);
    out.best_utility = total_utility(customers, out.best_allocation);
  }
  return out;
}

OracleResult brute_force_maxopf(std::shared_ptr<const RadialNetwork> net, std::span<const Customer> customers,
                                const OperatingLimits& limits, const ExactOracleOptions& options) {
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0)) throw ValueError("epsilon must lie in (0, 1)");
  const Split split = split_customers(customers, kExactOracleGuard);
  const std::size_t n = customers.size();
  const std::size_t w = split.inelastic.size();
  const std::uint64_t total = std::uint64_t{1} << w;

  std::vector<double> subset_utility(total, 0.0);
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    const std::size_t bit = static_cast<std::size_t>(std::countr_zero(mask));
    subset_utility[mask] = subset_utility[mask & (mask - 1)] + customers[split.inelastic[bit]].utility;
  }
  std::vector<std::uint64_t> order(total);
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::vector<std::uint64_t> keys(total);
  for (std::uint64_t mask = 0; mask < total; ++mask) keys[mask] = lex_key(mask, w);
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (subset_utility[a] != subset_utility[b]) return subset_utility[a] > subset_utility[b];
    return keys[a] > keys[b];
  });

  std::optional<SimplifiedLimits> simplified;
  if (!split.elastic.empty()) {
    simplified = make_limits(net, customers, options.loss_mode, limits, options.include_lower_voltage);
  }

  OracleResult out;
  Best best;
  for (std::uint64_t mask : order) {
    if (subset_utility[mask] + split.elastic_utility < best.utility - kTie) break;
    Allocation x(n, 0.0);
    for (std::size_t i = 0; i < w; ++i) {
      if (mask >> i & 1U) x[split.inelastic[i]] = 1.0;
    }
    ++out.nodes_explored;

    if (split.elastic.empty()) {
      if (opf_feasible(*net, customers, x, limits).feasible && best.improves(subset_utility[mask], keys[mask])) {
        best = {subset_utility[mask], keys[mask], x};
      }
      continue;
    }

    Allocation relaxed = x;
    try {
      std::vector<std::optional<double>> pins(n);
      for (std::size_t k : split.inelastic) pins[k] = x[k];
      relaxed = solve_rmaxopf(*simplified, customers, options.relaxation, pins);
    } catch (const InfeasibleRelaxation&) {
    }
    for (double delta = 0.0;; delta += options.epsilon) {
      const double scale = std::max(0.0, 1.0 - delta);
      for (std::size_t k : split.elastic) x[k] = relaxed[k] * scale;
      const double u = total_utility(customers, x);
      if (u < best.utility - kTie) break;
      if (opf_feasible(*net, customers, x, limits).feasible) {
        if (best.improves(u, keys[mask])) best = {u, keys[mask], x};
        break;
      }
      if (scale == 0.0) break;
    }
  }

  out.exact = true;
  if (best.utility < 0.0) {
    out.best_allocation.assign(n, 0.0);
  } else {
    out.best_allocation = std::move(best.x);
    out.best_utility = total_utility(customers, out.best_allocation);
  }
  return out;
}

}  // namespace maxopf
