#include "maxopf/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "maxopf/errors.hpp"

namespace maxopf {

namespace {

void backward_pass(const RadialNetwork& net, std::span<const Complex> loads, PowerFlowState& st) {
  for (EdgeIndex e = net.edge_count(); e-- > 0;) {
    const BusIndex head = net.to_index(e);
    Complex flow = loads[head] + net.edge(e).impedance() * st.l[e];
    for (EdgeIndex c : net.child_edges(head)) flow += st.S[c];
    st.S[e] = flow;
  }
}

void forward_pass(const RadialNetwork& net, PowerFlowState& st) {
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    const Complex z = net.edge(e).impedance();
    const double v = st.v[net.from_index(e)] + std::norm(z) * st.l[e] - 2.0 * (std::conj(z) * st.S[e]).real();
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw NonConvergence("non-positive voltage at bus " + std::to_string(net.bus_id(net.to_index(e))));
    }
    st.v[net.to_index(e)] = v;
  }
}

}  // namespace

PowerFlowState sweep_solve(const RadialNetwork& net, std::span<const Complex> bus_loads, double v0,
                           const SweepOptions& options) {
  if (!(v0 > 0.0)) throw ValueError("source voltage square must be positive");
  if (bus_loads.size() != net.bus_count()) throw ValueError("bus load vector does not match bus count");

  const std::size_t m = net.edge_count();
  PowerFlowState st;
  st.v.assign(net.bus_count(), v0);
  st.S.assign(m, Complex{});
  st.l.assign(m, 0.0);

  double previous = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    backward_pass(net, bus_loads, st);
    const std::vector<double> v_prev = st.v;
    forward_pass(net, st);

    double residual = 0.0;
    for (EdgeIndex e = 0; e < m; ++e) {
      const double next = std::norm(st.S[e]) / st.v[net.from_index(e)];
      if (!std::isfinite(next)) throw NonConvergence("current magnitude overflow");
      residual = std::max(residual, std::abs(next - st.l[e]) / std::max(1.0, next));
      st.l[e] = next;
    }
    for (BusIndex b = 0; b < st.v.size(); ++b) {
      residual = std::max(residual, std::abs(st.v[b] - v_prev[b]) / std::max(1.0, st.v[b]));
    }
    st.iterations = it;

    if (residual < options.tolerance) {
      backward_pass(net, bus_loads, st);
      forward_pass(net, st);
      st.s0 = -st.S[0];
      return st;
    }
    growth = residual > previous ? growth + 1 : 0;
    if (growth >= options.growth_window) throw NonConvergence("sweep residual grew for consecutive iterations");
    previous = residual;
  }
  throw NonConvergence("sweep did not converge within " + std::to_string(options.max_iterations) + " iterations");
}

double BfmResiduals::max() const { return std::max({current, voltage, balance, root}); }

BfmResiduals bfm_residuals(const RadialNetwork& net, std::span<const Complex> bus_loads,
                           const PowerFlowState& st) {
  BfmResiduals r;
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    const Complex z = net.edge(e).impedance();
    const BusIndex from = net.from_index(e);
    const BusIndex head = net.to_index(e);
    r.current = std::max(r.current, std::abs(st.l[e] * st.v[from] - std::norm(st.S[e])));
    const double v_expected = st.v[from] + std::norm(z) * st.l[e] - 2.0 * (std::conj(z) * st.S[e]).real();
    r.voltage = std::max(r.voltage, std::abs(st.v[head] - v_expected));
    Complex flow = bus_loads[head] + z * st.l[e];
    for (EdgeIndex c : net.child_edges(head)) flow += st.S[c];
    r.balance = std::max(r.balance, std::abs(st.S[e] - flow));
  }
  r.root = std::abs(st.s0 + st.S[0]);
  return r;
}

ViolationReport check_limits(const PowerFlowState& state, const OperatingLimits& limits, const RadialNetwork& net) {
  ViolationReport rep;
  bool capacity_ok = true;
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    const double flow = std::abs(state.S[e]);
    const double cap = net.edge(e).capacity;
    double ratio = 0.0;
    if (cap > 0.0) {
      ratio = flow / cap;
    } else if (flow > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    if (!rep.worst_edge || ratio > rep.capacity_beta) {
      rep.capacity_beta = ratio;
      rep.worst_edge = e;
    }
    if (flow > cap + kLimitSlack) capacity_ok = false;
  }
  bool voltage_ok = true;
  for (BusIndex b = 1; b < net.bus_count(); ++b) {
    const double v = state.v[b];
    const double ratio = std::max(limits.vmin_sq / v, v / limits.vmax_sq);
    if (!rep.worst_bus || ratio > rep.voltage_beta) {
      rep.voltage_beta = ratio;
      rep.worst_bus = b;
    }
    if (v < limits.vmin_sq - kLimitSlack || v > limits.vmax_sq + kLimitSlack) voltage_ok = false;
  }
  rep.feasible = capacity_ok && voltage_ok;
  return rep;
}

std::vector<Complex> assemble_bus_loads(const RadialNetwork& net, std::span<const Customer> customers,
                                        std::span<const double> x) {
  if (x.size() != customers.size()) throw ValueError("allocation size does not match customer count");
  std::vector<Complex> loads(net.bus_count());
  for (std::size_t k = 0; k < customers.size(); ++k) {
    if (x[k] != 0.0) loads[net.index_of(customers[k].bus)] += customers[k].s * x[k];
  }
  return loads;
}

FeasibilityCheck opf_feasible(const RadialNetwork& net, std::span<const Customer> customers,
                              std::span<const double> x, const OperatingLimits& limits) {
  FeasibilityCheck out;
  const auto loads = assemble_bus_loads(net, customers, x);
  try {
    out.state = sweep_solve(net, loads, limits.v0);
  } catch (const NonConvergence& ex) {
    out.feasible = false;
    out.report.feasible = false;
    out.report.capacity_beta = std::numeric_limits<double>::infinity();
    out.report.voltage_beta = std::numeric_limits<double>::infinity();
    out.reason = std::string("power flow failed: ") + ex.what();
    return out;
  }
  out.report = check_limits(*out.state, limits, net);
  out.feasible = out.report.feasible;
  if (!out.feasible) {
    const double over = out.report.capacity_beta;
    out.reason = over > 1.0 ? "capacity exceeded on edge (" +
                                  std::to_string(net.edge(*out.report.worst_edge).from) + "," +
                                  std::to_string(net.edge(*out.report.worst_edge).to) + ")"
                            : "voltage outside window at bus " +
                                  std::to_string(net.bus_id(*out.report.worst_bus));
  }
  return out;
}

void write_bus_csv(std::ostream& os, const RadialNetwork& net, const PowerFlowState& state) {
  os << "bus,v_sq\n" << std::setprecision(17);
  for (BusIndex b = 0; b < net.bus_count(); ++b) os << net.bus_id(b) << ',' << state.v[b] << '\n';
}

void write_edge_csv(std::ostream& os, const RadialNetwork& net, const PowerFlowState& state) {
  os << "edge,S_re,S_im,l\n" << std::setprecision(17);
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    os << '(' << net.edge(e).from << ';' << net.edge(e).to << ")," << state.S[e].real() << ','
       << state.S[e].imag() << ',' << state.l[e] << '\n';
  }
}

}  // namespace maxopf
