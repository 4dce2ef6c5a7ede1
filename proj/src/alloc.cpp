#include "maxopf/alloc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "maxopf/errors.hpp"
#include "maxopf/lp.hpp"
#include "maxopf/theory.hpp"

namespace maxopf {

namespace {

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

// Greedy scan on a tracker that holds only background load; the tracker is
// returned to that state afterwards.
std::vector<std::size_t> greedy_scan(ConstraintTracker& tracker, std::span<const Customer> customers,
                                     std::vector<std::size_t> order) {
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::abs(customers[a].s);
    const double mb = std::abs(customers[b].s);
    return ma != mb ? ma < mb : a < b;
  });
  std::vector<std::size_t> chosen;
  for (std::size_t k : order) {
    if (tracker.fits(k)) {
      tracker.add(k);
      chosen.push_back(k);
    }
  }
  for (std::size_t k : chosen) tracker.remove(k);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

double chosen_utility(std::span<const Customer> customers, std::span<const std::size_t> chosen) {
  double u = 0.0;
  for (std::size_t k : chosen) u += customers[k].utility;
  return u;
}

}  // namespace

std::vector<std::size_t> greedy_alloc(const SimplifiedLimits& limits, std::span<const Customer> customers) {
  const auto all = iota_indices(customers.size());
  return greedy_alloc(limits, customers, all, {});
}

std::vector<std::size_t> greedy_alloc(const SimplifiedLimits& limits, std::span<const Customer> customers,
                                      std::span<const std::size_t> candidates,
                                      std::span<const double> background) {
  ConstraintTracker tracker(limits, customers);
  if (!background.empty()) tracker.set_background(background);
  return greedy_scan(tracker, customers, {candidates.begin(), candidates.end()});
}

InelasResult inelas_dem_alloc(const SimplifiedLimits& limits, std::span<const Customer> customers) {
  const auto all = iota_indices(customers.size());
  return inelas_dem_alloc(limits, customers, all, {});
}

InelasResult inelas_dem_alloc(const SimplifiedLimits& limits, std::span<const Customer> customers,
                              std::span<const std::size_t> candidates, std::span<const double> background) {
  InelasResult out;
  GroupingTrace& tr = out.trace;
  const std::size_t n = candidates.size();
  if (n == 0) {
    tr.degenerate = true;
    return out;
  }
  for (std::size_t k : candidates) {
    if (customers[k].utility < 0.0) throw ValueError("utilities must be non-negative");
  }

  ConstraintTracker tracker(limits, customers);
  if (!background.empty()) tracker.set_background(background);

  for (std::size_t k : candidates) {
    if (tracker.fits(k)) tr.u_max = std::max(tr.u_max, customers[k].utility);
  }
  if (!(tr.u_max > 0.0)) {
    tr.degenerate = true;
    return out;
  }

  const long long n2 = static_cast<long long>(n) * static_cast<long long>(n);
  tr.unit = tr.u_max / static_cast<double>(n2);
  const std::size_t group_count =
      n == 1 ? 1 : static_cast<std::size_t>(std::ceil(2.0 * std::log2(static_cast<double>(n)) - 1e-12)) + 1;
  tr.groups.assign(group_count, {});

  tr.ubar.reserve(n);
  for (std::size_t k : candidates) {
    const double scaled = customers[k].utility * static_cast<double>(n2) / tr.u_max;
    const long long ub = static_cast<long long>(floor_snap(scaled));
    tr.ubar.push_back(ub);
    if (ub > n2) {
      tr.excluded.push_back(k);
      continue;
    }
    const std::size_t band = std::max<std::size_t>(1, std::bit_width(static_cast<unsigned long long>(ub)));
    tr.groups[std::min(band, group_count) - 1].push_back(k);
  }

  tr.picks.reserve(group_count);
  tr.group_utility.reserve(group_count);
  double best = -1.0;
  for (std::size_t g = 0; g < group_count; ++g) {
    tr.picks.push_back(greedy_scan(tracker, customers, tr.groups[g]));
    tr.group_utility.push_back(chosen_utility(customers, tr.picks.back()));
    if (tr.group_utility.back() > best) {
      best = tr.group_utility.back();
      tr.winner = g;
    }
  }
  out.chosen = tr.picks[tr.winner];
  return out;
}

Allocation solve_rmaxopf(const SimplifiedLimits& limits, std::span<const Customer> customers,
                         const RelaxationOptions& options, std::span<const std::optional<double>> pinned) {
  if (options.tangents < 8) throw ValueError("at least 8 tangent directions are required");
  if (!pinned.empty() && pinned.size() != customers.size()) throw ValueError("pin vector has wrong size");

  const std::size_t n = customers.size();
  const std::size_t m = limits.edge_count();
  Allocation x(n, 0.0);
  if (n == 0) return x;

  const CustomerGeometry geo(limits, customers);
  std::vector<std::size_t> free_vars;
  std::vector<Complex> fixed_flow(m);
  std::vector<double> fixed_volt(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!pinned.empty() && pinned[k]) {
      const double v = *pinned[k];
      x[k] = v;
      if (v == 0.0) continue;
      for (EdgeIndex e : geo.path(k)) fixed_flow[e] += customers[k].s * v;
      const auto q = geo.q(k);
      for (EdgeIndex e = 0; e < m; ++e) fixed_volt[e] += q[e] * v;
    } else {
      free_vars.push_back(k);
    }
  }
  if (free_vars.empty()) {
    if (!eval_constraints(limits, customers, x).feasible) throw InfeasibleRelaxation("pinned allocation is infeasible");
    return x;
  }

  const std::size_t nf = free_vars.size();
  LinearProgram lp;
  lp.c.resize(nf);
  lp.upper.assign(nf, 1.0);
  for (std::size_t j = 0; j < nf; ++j) lp.c[j] = customers[free_vars[j]].utility;

  if (limits.check_voltage) {
    const bool leaves_only = leaf_reduction_holds(limits, customers);
    std::vector<EdgeIndex> upper_edges = leaves_only ? limits.leaves : std::vector<EdgeIndex>{};
    if (!leaves_only) {
      for (EdgeIndex e = 0; e < m; ++e) upper_edges.push_back(e);
    }
    for (EdgeIndex e : upper_edges) {
      std::vector<double> row(nf);
      for (std::size_t j = 0; j < nf; ++j) row[j] = geo.q(free_vars[j])[e];
      lp.a.push_back(std::move(row));
      lp.b.push_back(limits.v_upper[e] - fixed_volt[e]);
    }
    if (limits.include_lower_voltage) {
      for (EdgeIndex e = 0; e < m; ++e) {
        std::vector<double> row(nf);
        for (std::size_t j = 0; j < nf; ++j) row[j] = -geo.q(free_vars[j])[e];
        lp.a.push_back(std::move(row));
        lp.b.push_back(fixed_volt[e] - limits.v_lower[e]);
      }
    }
  }

  // Capacity half-planes: Re(conj(w) * flow) <= C_hat for unit directions w.
  const int T = options.tangents;
  std::vector<std::vector<char>> used(m, std::vector<char>(static_cast<std::size_t>(T), 0));
  std::vector<std::vector<std::size_t>> edge_vars(m);
  for (std::size_t j = 0; j < nf; ++j) {
    for (EdgeIndex e : geo.path(free_vars[j])) edge_vars[e].push_back(j);
  }
  auto add_cut = [&](EdgeIndex e, int t) {
    used[e][static_cast<std::size_t>(t)] = 1;
    const double phi = 2.0 * std::numbers::pi * t / T;
    const Complex w = std::polar(1.0, phi);
    std::vector<double> row(nf, 0.0);
    for (std::size_t j : edge_vars[e]) row[j] = (std::conj(w) * customers[free_vars[j]].s).real();
    lp.a.push_back(std::move(row));
    lp.b.push_back(limits.c_hat[e] - (std::conj(w) * fixed_flow[e]).real());
  };
  auto nearest_direction = [&](Complex v) {
    double phi = std::arg(v);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    return static_cast<int>(std::lround(phi * T / (2.0 * std::numbers::pi))) % T;
  };

  if (limits.check_capacity) {
    for (EdgeIndex e = 0; e < m; ++e) {
      if (edge_vars[e].empty()) continue;
      Complex total = fixed_flow[e];
      for (std::size_t j : edge_vars[e]) total += customers[free_vars[j]].s;
      if (std::abs(total) <= limits.c_hat[e]) continue;
      add_cut(e, nearest_direction(total));
    }
  }

  LpResult res;
  const int max_rounds = T * static_cast<int>(m) + 1;
  for (int round = 0;; ++round) {
    res = solve_lp(lp, options.tol);
    if (!limits.check_capacity || round >= max_rounds) break;
    bool added = false;
    for (EdgeIndex e = 0; e < m; ++e) {
      if (edge_vars[e].empty()) continue;
      Complex flow = fixed_flow[e];
      for (std::size_t j : edge_vars[e]) flow += customers[free_vars[j]].s * res.x[j];
      if (std::abs(flow) <= limits.c_hat[e] * (1.0 + options.tol) + options.tol) continue;
      // Most violated direction of the polygon.
      int best = -1;
      double best_val = limits.c_hat[e] * (1.0 + options.tol) + options.tol;
      const int centre = nearest_direction(flow);
      for (int off = -1; off <= 1; ++off) {
        const int t = ((centre + off) % T + T) % T;
        const double val = (std::conj(std::polar(1.0, 2.0 * std::numbers::pi * t / T)) * flow).real();
        if (val > best_val && !used[e][static_cast<std::size_t>(t)]) {
          best_val = val;
          best = t;
        }
      }
      if (best >= 0) {
        add_cut(e, best);
        added = true;
      }
    }
    if (!added) break;
  }
  for (std::size_t j = 0; j < nf; ++j) x[free_vars[j]] = res.x[j];
  return x;
}

namespace {

// Largest s in [0, 1] (by bisection) for which `ok(s)` holds, assuming
// monotonicity; returns 0 when nothing passes.
template <class Pred>
double largest_scale(Pred ok, int steps = 40) {
  if (ok(1.0)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

MixResult mix_dem_alloc(std::shared_ptr<const RadialNetwork> net, std::span<const Customer> customers,
                        const OperatingLimits& limits, const MixOptions& options) {
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0)) throw ValueError("epsilon must lie in (0, 1)");
  const std::size_t n = customers.size();
  MixResult out;
  out.allocation.assign(n, 0.0);

  const SimplifiedLimits base =
      make_limits(net, customers, options.loss_mode, limits, options.include_lower_voltage);
  out.fractional_base = solve_rmaxopf(base, customers, options.relaxation);

  std::vector<std::size_t> inelastic;
  for (std::size_t k = 0; k < n; ++k) {
    if (!customers[k].elastic) inelastic.push_back(k);
  }
  auto elastic_part = [&](double scale) {
    Allocation bg(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (customers[k].elastic) bg[k] = std::clamp(out.fractional_base[k] * scale, 0.0, 1.0);
    }
    return bg;
  };

  for (int it = 0;; ++it) {
    const double delta = it * options.epsilon;
    if (delta >= 1.0) break;
    const SimplifiedLimits reduced = reduced_capacity_limits(base, delta);

    ConstraintTracker tracker(reduced, customers);
    const double scale = largest_scale([&](double s) {
      tracker.set_background(elastic_part(s));
      return tracker.feasible();
    });
    Allocation x = elastic_part(scale);
    for (std::size_t k : inelas_dem_alloc(reduced, customers, inelastic, x).chosen) x[k] = 1.0;

    FeasibilityCheck check = opf_feasible(*net, customers, x, limits);
    out.iterations = it + 1;
    out.delta = delta;
    if (check.feasible) {
      out.allocation = std::move(x);
      out.elastic_scale = scale;
      out.check = std::move(check);
      return out;
    }
  }

  out.exhausted = true;
  out.elastic_scale = largest_scale([&](double s) { return opf_feasible(*net, customers, elastic_part(s), limits).feasible; });
  out.allocation = elastic_part(out.elastic_scale);
  out.check = opf_feasible(*net, customers, out.allocation, limits);
  return out;
}

}  // namespace maxopf
