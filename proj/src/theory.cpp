#include "maxopf/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "maxopf/errors.hpp"

namespace maxopf {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr double kBoundMargin = 1e-12;

double max_pairwise_gap(std::span<const Complex> vs) {
  std::vector<double> args;
  for (Complex v : vs) {
    if (v != Complex{}) args.push_back(std::arg(v));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    for (std::size_t j = i + 1; j < args.size(); ++j) best = std::max(best, angle_gap(args[i], args[j]));
  }
  return best;
}

}  // namespace

double angle_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
  return d > std::numbers::pi ? 2.0 * std::numbers::pi - d : d;
}

double floor_snap(double v, double eps) {
  const double r = std::round(v);
  return std::abs(v - r) <= eps ? r : std::floor(v);
}

InstanceGeometry geometry(const RadialNetwork& net, std::span<const Customer> customers, const PathIndex& paths) {
  InstanceGeometry g;
  std::vector<Complex> demands;
  demands.reserve(customers.size());
  for (const Customer& c : customers) demands.push_back(c.s);
  g.theta = max_pairwise_gap(demands);

  for (const Customer& c : customers) {
    if (c.s == Complex{}) continue;
    const double a = std::arg(c.s);
    for (EdgeIndex e : paths.bus_path(net.index_of(c.bus))) {
      g.theta_zs = std::max(g.theta_zs, angle_gap(a, std::arg(net.edge(e).impedance())));
    }
  }

  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    const auto path = paths.edge_path(e);
    double lo = std::abs(net.edge(path.front()).impedance());
    double hi = lo;
    for (EdgeIndex p : path) {
      const double mag = std::abs(net.edge(p).impedance());
      lo = std::min(lo, mag);
      hi = std::max(hi, mag);
    }
    g.rho = std::max(g.rho, hi / lo);
    g.eta = std::max(g.eta, path.size());
  }
  return g;
}

double general_utility_scale(double alpha, std::size_t n) {
  if (n <= 1) return 0.0;
  const double nn = static_cast<double>(n);
  return alpha * (1.0 - 1.0 / nn) / (2.0 * std::log2(nn) + 1.0);
}

RatioBounds ratio_bounds(const InstanceGeometry& g, std::size_t n) {
  RatioBounds r;
  r.applicable_c = g.theta < kHalfPi;
  r.applicable_v = g.theta_zs < kHalfPi;
  const double fc = r.applicable_c ? floor_snap(1.0 / (std::cos(g.theta) * std::cos(g.theta / 2))) : 0.0;
  const double fv =
      r.applicable_v ? floor_snap(static_cast<double>(g.eta) * g.rho / std::cos(g.theta_zs)) : 0.0;
  if (r.applicable_c) r.alpha_c = 1.0 / (fc + 1.0);
  if (r.applicable_v) r.alpha_v = 1.0 / (fv + 1.0);
  if (r.applicable()) r.alpha = 1.0 / (fc + fv + 2.0);
  r.abar_c = general_utility_scale(r.alpha_c, n);
  r.abar_v = general_utility_scale(r.alpha_v, n);
  r.abar = general_utility_scale(r.alpha, n);
  return r;
}

BoundCheck check_sec_half_bound(std::span<const Complex> vectors) {
  for (Complex v : vectors) {
    if (v.real() < 0.0 || v.imag() < 0.0) throw PreconditionError("vector components must be non-negative");
  }
  const double theta = max_pairwise_gap(vectors);
  if (theta > kHalfPi + kBoundMargin) throw PreconditionError("pairwise angle exceeds pi/2");

  double total = 0.0;
  Complex sum;
  for (Complex v : vectors) {
    total += std::abs(v);
    sum += v;
  }
  BoundCheck out;
  out.bound = 1.0 / std::cos(theta / 2);
  out.value = total > 0.0 ? total / std::abs(sum) : 1.0;
  out.holds = out.value <= out.bound + kBoundMargin;
  return out;
}

BoundCheck check_ratio_bound(Complex d0, Complex d1, Complex d2) {
  const Complex ds[] = {d0, d1, d2};
  for (Complex d : ds) {
    if (d.real() < 0.0 || d.imag() < 0.0) throw PreconditionError("vector components must be non-negative");
    if (d != Complex{} && std::arg(d) >= kHalfPi) throw PreconditionError("argument must lie in [0, pi/2)");
  }
  if (std::abs(d0 + d1) < std::abs(d0 + d2)) throw PreconditionError("requires |d0 + d1| >= |d0 + d2|");
  const double theta = max_pairwise_gap(ds);
  if (theta >= kHalfPi) throw PreconditionError("pairwise angle must be below pi/2");

  BoundCheck out;
  out.bound = 1.0 / std::cos(theta);
  const double a1 = std::abs(d1);
  const double a2 = std::abs(d2);
  if (a1 > 0.0) {
    out.value = a2 / a1;
  } else {
    out.value = a2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  out.holds = out.value <= out.bound + kBoundMargin;
  return out;
}

}  // namespace maxopf
