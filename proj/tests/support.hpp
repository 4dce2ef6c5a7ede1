#pragma once

#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "maxopf/customer.hpp"
#include "maxopf/netmodel.hpp"
#include "maxopf/scenarios.hpp"

namespace maxopf::testing {

inline std::shared_ptr<const RadialNetwork> share(RadialNetwork net) {
  return std::make_shared<const RadialNetwork>(std::move(net));
}

inline RadialNetwork single_edge(double r, double x, double cap) {
  return RadialNetwork({{0, 1, r, x, cap}});
}

inline RadialNetwork chain(std::size_t edges, double r, double x, double cap) {
  std::vector<Edge> es;
  for (std::size_t i = 0; i < edges; ++i) {
    es.push_back({static_cast<BusId>(i), static_cast<BusId>(i + 1), r, x, cap});
  }
  return RadialNetwork(std::move(es));
}

struct RandomNetworkOptions {
  double r_lo = 0.001, r_hi = 0.03;
  double x_lo = 0.001, x_hi = 0.03;
  double cap_lo = 0.5, cap_hi = 2.0;
};

/// Random tree on `buses` buses: bus 1 hangs off the root, every later bus
/// off a uniformly chosen non-root bus.
inline RadialNetwork random_network(Rng& rng, std::size_t buses, const RandomNetworkOptions& o = {}) {
  std::vector<Edge> es;
  for (std::size_t b = 1; b < buses; ++b) {
    const BusId parent = b == 1 ? 0 : static_cast<BusId>(1 + rng.index(b - 1));
    es.push_back({parent, static_cast<BusId>(b), rng.uniform(o.r_lo, o.r_hi), rng.uniform(o.x_lo, o.x_hi),
                  rng.uniform(o.cap_lo, o.cap_hi)});
  }
  return RadialNetwork(std::move(es));
}

/// Demand with magnitude in [lo, hi] and angle in [-max_angle, max_angle].
inline Complex random_demand(Rng& rng, double lo, double hi, double max_angle) {
  return std::polar(rng.uniform(lo, hi), rng.uniform(-max_angle, max_angle));
}

inline BusId random_bus(Rng& rng, const RadialNetwork& net) {
  return net.bus_id(1 + rng.index(net.bus_count() - 1));
}

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace maxopf::testing
