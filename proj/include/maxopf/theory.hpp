#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "maxopf/customer.hpp"
#include "maxopf/netmodel.hpp"

namespace maxopf {

struct InstanceGeometry {
  double theta = 0.0;     ///< max pairwise demand angle gap (rad)
  double theta_zs = 0.0;  ///< max gap between a demand and an impedance on its path (rad)
  double rho = 1.0;       ///< max over edges of the |z| ratio along the edge's root path
  std::size_t eta = 0;    ///< max_e |P_e|
};

/// Zero demands carry no angle and are skipped.
InstanceGeometry geometry(const RadialNetwork& net, std::span<const Customer> customers, const PathIndex& paths);

/// Smallest absolute difference between two angles, in [0, pi].
double angle_gap(double a, double b);

/// floor(v), except values within `eps` of an integer m return m.
double floor_snap(double v, double eps = 1e-9);

struct RatioBounds {
  double alpha_c = 0.0;  ///< capacity-only
  double alpha_v = 0.0;  ///< voltage-only
  double alpha = 0.0;    ///< both
  double abar_c = 0.0;
  double abar_v = 0.0;
  double abar = 0.0;
  bool applicable_c = false;  ///< theta < pi/2
  bool applicable_v = false;  ///< theta_zs < pi/2
  bool applicable() const { return applicable_c && applicable_v; }
};

/// Unit-utility ratios and their general-utility scaling
/// a (1 - 1/n) / (2 log2 n + 1). Ratios whose angle precondition fails are 0.
RatioBounds ratio_bounds(const InstanceGeometry& g, std::size_t n);

/// a (1 - 1/n) / (2 log2 n + 1); zero for n <= 1.
double general_utility_scale(double alpha, std::size_t n);

struct BoundCheck {
  double value = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// sum |d_i| / |sum d_i| against sec(theta/2). Requires non-negative
/// components and pairwise angles at most pi/2; throws PreconditionError.
BoundCheck check_sec_half_bound(std::span<const Complex> vectors);

/// |d2| / |d1| against sec(theta) given |d0 + d1| >= |d0 + d2| and all
/// arguments in [0, pi/2). Throws PreconditionError.
BoundCheck check_ratio_bound(Complex d0, Complex d1, Complex d2);

}  // namespace maxopf
