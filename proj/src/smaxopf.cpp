#include "maxopf/smaxopf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "maxopf/errors.hpp"

namespace maxopf {

LossMode parse_loss_mode(std::string_view name) {
  if (name == "zero") return LossMode::zero;
  if (name == "capacity") return LossMode::capacity;
  if (name == "aggregate") return LossMode::aggregate;
  throw ValueError("unknown loss mode '" + std::string(name) + "'");
}

std::string to_string(LossMode mode) {
  switch (mode) {
    case LossMode::zero: return "zero";
    case LossMode::capacity: return "capacity";
    case LossMode::aggregate: return "aggregate";
  }
  return "aggregate";
}

LossBounds loss_bounds(const RadialNetwork& net, const PathIndex& paths, std::span<const Customer> customers,
                       LossMode mode, double vmin_sq) {
  if (!(vmin_sq > 0.0)) throw ValueError("vmin_sq must be positive");
  const std::size_t m = net.edge_count();
  LossBounds out{std::vector<double>(m, 0.0)};
  if (mode == LossMode::zero) return out;

  std::vector<double> downstream(m, 0.0);
  if (mode == LossMode::aggregate) {
    for (const Customer& c : customers) {
      for (EdgeIndex e : paths.bus_path(net.index_of(c.bus))) downstream[e] += std::abs(c.s);
    }
  }
  for (EdgeIndex e = 0; e < m; ++e) {
    double bound = net.edge(e).capacity;
    if (mode == LossMode::aggregate) bound = std::min(bound, downstream[e]);
    out.lbar[e] = bound * bound / vmin_sq;
  }
  return out;
}

SimplifiedLimits simplified_limits(std::shared_ptr<const RadialNetwork> net, const LossBounds& bounds,
                                   const OperatingLimits& limits, bool include_lower_voltage) {
  limits.validate();
  const std::size_t m = net->edge_count();
  if (bounds.lbar.size() != m) throw ValueError("loss bound vector does not match edge count");

  SimplifiedLimits out;
  out.paths = std::make_shared<const PathIndex>(*net);
  out.c_hat.resize(m);
  out.l_hat.resize(m);
  out.v_upper.assign(m, 0.5 * (limits.v0 - limits.vmin_sq));
  out.v_lower.resize(m);
  out.leaves = leaf_edges(*net);
  out.include_lower_voltage = include_lower_voltage;

  for (EdgeIndex e = 0; e < m; ++e) {
    Complex loss;
    for (EdgeIndex d : out.paths->subtree_edges(e)) loss += net->edge(d).impedance() * bounds.lbar[d];
    out.l_hat[e] = std::abs(loss);
    out.c_hat[e] = std::max(net->edge(e).capacity - out.l_hat[e], 0.0);

    double drop = 0.0;
    for (EdgeIndex p : out.paths->edge_path(e)) drop += std::norm(net->edge(p).impedance()) * bounds.lbar[p];
    out.v_lower[e] = 0.5 * (limits.v0 - limits.vmax_sq + drop);
  }
  out.net = std::move(net);
  return out;
}

SimplifiedLimits make_limits(std::shared_ptr<const RadialNetwork> net, std::span<const Customer> customers,
                             LossMode mode, const OperatingLimits& limits, bool include_lower_voltage) {
  const PathIndex paths(*net);
  const LossBounds bounds = loss_bounds(*net, paths, customers, mode, limits.vmin_sq);
  return simplified_limits(std::move(net), bounds, limits, include_lower_voltage);
}

SimplifiedLimits reduced_capacity_limits(const SimplifiedLimits& base, double delta) {
  if (!(delta >= 0.0) || delta > 1.0) throw ValueError("capacity reduction must lie in [0, 1]");
  SimplifiedLimits out = base;
  for (EdgeIndex e = 0; e < out.edge_count(); ++e) {
    out.c_hat[e] = (1.0 - delta) * base.net->edge(e).capacity;
    out.l_hat[e] = 0.0;
  }
  return out;
}

CustomerGeometry::CustomerGeometry(const SimplifiedLimits& limits, std::span<const Customer> customers) {
  const RadialNetwork& net = *limits.net;
  const PathIndex& paths = *limits.paths;
  const std::size_t m = net.edge_count();
  paths_.reserve(customers.size());
  q_.reserve(customers.size());

  std::vector<char> on_path(m, 0);
  for (const Customer& c : customers) {
    const auto path = paths.bus_path(net.index_of(c.bus));
    paths_.emplace_back(path.begin(), path.end());
    for (EdgeIndex e : path) on_path[e] = 1;

    // Edges are in BFS order, so each edge's parent has been visited already:
    // zsum(e) = zsum(parent) + z_e when e lies on P_k.
    std::vector<double> q(m, 0.0);
    std::vector<Complex> zsum(m);
    for (EdgeIndex e = 0; e < m; ++e) {
      const BusIndex from = net.from_index(e);
      const Complex above = from == 0 ? Complex{} : zsum[net.parent_edge(from)];
      zsum[e] = above + (on_path[e] ? net.edge(e).impedance() : Complex{});
      q[e] = zsum[e].real() * c.s.real() + zsum[e].imag() * c.s.imag();
    }
    q_.push_back(std::move(q));
    for (EdgeIndex e : path) on_path[e] = 0;
  }
}

namespace {

double arg_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
  return d > std::numbers::pi ? 2.0 * std::numbers::pi - d : d;
}

std::vector<EdgeIndex> all_edges(std::size_t m) {
  std::vector<EdgeIndex> out(m);
  for (EdgeIndex e = 0; e < m; ++e) out[e] = e;
  return out;
}

}  // namespace

bool leaf_reduction_holds(const SimplifiedLimits& limits, std::span<const Customer> customers) {
  const RadialNetwork& net = *limits.net;
  for (const Customer& c : customers) {
    if (c.s == Complex{}) continue;
    const double sa = std::arg(c.s);
    for (EdgeIndex e : limits.paths->bus_path(net.index_of(c.bus))) {
      if (arg_gap(sa, std::arg(net.edge(e).impedance())) >= std::numbers::pi / 2) return false;
    }
  }
  return true;
}

ConstraintEval eval_constraints(const SimplifiedLimits& limits, std::span<const Customer> customers,
                                std::span<const double> x) {
  if (x.size() != customers.size()) throw ValueError("allocation size does not match customer count");
  const std::size_t m = limits.edge_count();
  const CustomerGeometry geo(limits, customers);

  ConstraintEval out;
  out.flow.assign(m, Complex{});
  out.voltage.assign(m, 0.0);
  for (std::size_t k = 0; k < customers.size(); ++k) {
    if (x[k] == 0.0) continue;
    for (EdgeIndex e : geo.path(k)) out.flow[e] += customers[k].s * x[k];
    const auto q = geo.q(k);
    for (EdgeIndex e = 0; e < m; ++e) out.voltage[e] += q[e] * x[k];
  }

  if (limits.check_capacity) {
    for (EdgeIndex e = 0; e < m; ++e) {
      if (std::abs(out.flow[e]) > limits.c_hat[e] + kConstraintSlack) out.capacity_ok = false;
    }
  }
  if (limits.check_voltage) {
    const bool leaves_only = leaf_reduction_holds(limits, customers);
    out.checked_voltage_edges = leaves_only ? limits.leaves : all_edges(m);
    for (EdgeIndex e : out.checked_voltage_edges) {
      if (out.voltage[e] > limits.v_upper[e] + kConstraintSlack) out.voltage_ok = false;
    }
    if (limits.include_lower_voltage) {
      for (EdgeIndex e = 0; e < m; ++e) {
        if (out.voltage[e] < limits.v_lower[e] - kConstraintSlack) out.voltage_ok = false;
      }
    }
  }
  out.feasible = out.capacity_ok && out.voltage_ok;
  return out;
}

ConstraintTracker::ConstraintTracker(const SimplifiedLimits& limits, std::span<const Customer> customers)
    : limits_(&limits),
      customers_(customers),
      geometry_(limits, customers),
      upper_all_edges_(!leaf_reduction_holds(limits, customers)) {
  const std::size_t m = limits.edge_count();
  if (limits.check_voltage) {
    voltage_edges_ = upper_all_edges_ || limits.include_lower_voltage ? all_edges(m) : limits.leaves;
  }
  bg_flow_.assign(m, Complex{});
  flow_.assign(m, Complex{});
  bg_volt_.assign(m, 0.0);
  volt_.assign(m, 0.0);
}

bool ConstraintTracker::capacity_ok(EdgeIndex e, Complex flow) const {
  return !limits_->check_capacity || std::abs(flow) <= limits_->c_hat[e] + kConstraintSlack;
}

bool ConstraintTracker::voltage_ok(EdgeIndex e, double value) const {
  if (!limits_->check_voltage) return true;
  if (limits_->include_lower_voltage && value < limits_->v_lower[e] - kConstraintSlack) return false;
  // Checking the upper side on non-leaf edges is redundant but harmless when
  // the leaf reduction holds.
  return value <= limits_->v_upper[e] + kConstraintSlack;
}

void ConstraintTracker::set_background(std::span<const double> x) {
  const std::size_t m = limits_->edge_count();
  std::fill(bg_flow_.begin(), bg_flow_.end(), Complex{});
  std::fill(bg_volt_.begin(), bg_volt_.end(), 0.0);
  for (std::size_t k = 0; k < customers_.size() && k < x.size(); ++k) {
    if (x[k] == 0.0) continue;
    for (EdgeIndex e : geometry_.path(k)) bg_flow_[e] += customers_[k].s * x[k];
    const auto q = geometry_.q(k);
    for (EdgeIndex e = 0; e < m; ++e) bg_volt_[e] += q[e] * x[k];
  }
}

bool ConstraintTracker::fits(std::size_t k, double fraction) const {
  const Complex s = customers_[k].s * fraction;
  for (EdgeIndex e : geometry_.path(k)) {
    if (!capacity_ok(e, bg_flow_[e] + flow_[e] + s)) return false;
  }
  const auto q = geometry_.q(k);
  for (EdgeIndex e : voltage_edges_) {
    if (!voltage_ok(e, bg_volt_[e] + volt_[e] + q[e] * fraction)) return false;
  }
  return true;
}

void ConstraintTracker::add(std::size_t k, double fraction) {
  const Complex s = customers_[k].s * fraction;
  for (EdgeIndex e : geometry_.path(k)) flow_[e] += s;
  const auto q = geometry_.q(k);
  for (EdgeIndex e = 0; e < volt_.size(); ++e) volt_[e] += q[e] * fraction;
}

void ConstraintTracker::remove(std::size_t k, double fraction) { add(k, -fraction); }

void ConstraintTracker::reset(std::span<const double> x) {
  std::fill(flow_.begin(), flow_.end(), Complex{});
  std::fill(volt_.begin(), volt_.end(), 0.0);
  for (std::size_t k = 0; k < customers_.size() && k < x.size(); ++k) {
    if (x[k] != 0.0) add(k, x[k]);
  }
}

bool ConstraintTracker::feasible() const {
  for (EdgeIndex e = 0; e < flow_.size(); ++e) {
    if (!capacity_ok(e, bg_flow_[e] + flow_[e])) return false;
  }
  for (EdgeIndex e : voltage_edges_) {
    if (!voltage_ok(e, bg_volt_[e] + volt_[e])) return false;
  }
  return true;
}

}  // namespace maxopf
