#pragma once

#include <span>
#include <vector>

#include "maxopf/netmodel.hpp"

namespace maxopf {

/// A demand attached to a bus. Inelastic demands are served entirely or not at
/// all; elastic ones may be served fractionally with proportional utility.
struct Customer {
  BusId bus = 0;
  Complex s;             ///< complex demand (p.u.)
  double utility = 0.0;  ///< utility when fully served
  bool elastic = false;

  bool operator==(const Customer&) const = default;
};

/// Per-customer service fraction x_k in [0, 1].
using Allocation = std::vector<double>;

inline double total_utility(std::span<const Customer> customers, std::span<const double> x) {
  double u = 0.0;
  for (std::size_t k = 0; k < customers.size() && k < x.size(); ++k) u += customers[k].utility * x[k];
  return u;
}

/// Allocation with x_k = 1 on the listed customers and 0 elsewhere.
inline Allocation indicator(std::size_t n, std::span<const std::size_t> chosen) {
  Allocation x(n, 0.0);
  for (std::size_t k : chosen) x[k] = 1.0;
  return x;
}

}  // namespace maxopf
