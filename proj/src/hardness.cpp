#include "maxopf/hardness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "maxopf/errors.hpp"
#include "maxopf/oracle.hpp"

namespace maxopf {

namespace {

constexpr long long kMaxValue = 1'000'000;

long long parse_int(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("not an integer: '" + std::string(s) + "'");
  return v;
}

void check_params(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValueError("alpha must lie in (0, 1]");
  if (!(beta >= 1.0)) throw ValueError("beta must be at least 1");
}

std::shared_ptr<const RadialNetwork> single_edge(double capacity, const OperatingLimits& limits) {
  return std::make_shared<const RadialNetwork>(std::vector<Edge>{{0, 1, 1.0, 1.0, capacity}}, PerUnitBase{},
                                               limits);
}

std::vector<Customer> gadget_customers(const SubSumInstance& ss, double scale, double alpha) {
  const double small = alpha / static_cast<double>(ss.a.size() + 1);
  std::vector<Customer> out;
  for (long long a : ss.a) out.push_back({1, Complex(scale * static_cast<double>(a), 0.0), small, false});
  out.push_back({1, Complex(0.0, -scale * static_cast<double>(ss.b)), 1.0, false});
  return out;
}

double capacity_for(const std::vector<Customer>& cs) {
  double total = 0.0;
  for (const Customer& c : cs) total += std::abs(c.s);
  return 2.0 * total + 1.0;
}

}  // namespace

void SubSumInstance::validate() const {
  if (a.empty()) throw ValueError("subset-sum instance needs at least one value");
  for (long long v : a) {
    if (v < 1 || v > kMaxValue) throw ValueError("subset-sum values must lie in [1, 1e6]");
  }
  if (b < 1 || b > kMaxValue) throw ValueError("subset-sum target must lie in [1, 1e6]");
}

SubSumInstance parse_subsum(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("expected 'a1,a2,...:B'");
  SubSumInstance ss;
  std::string_view values = text.substr(0, colon);
  while (!values.empty()) {
    const auto comma = values.find(',');
    ss.a.push_back(parse_int(values.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    values.remove_prefix(comma + 1);
  }
  ss.b = parse_int(text.substr(colon + 1));
  return ss;
}

std::string format_subsum(const SubSumInstance& ss) {
  std::string out;
  for (std::size_t i = 0; i < ss.a.size(); ++i) out += (i ? "," : "") + std::to_string(ss.a[i]);
  return out + ":" + std::to_string(ss.b);
}

bool subset_sum(const SubSumInstance& ss) {
  if (ss.b < 0) return false;
  std::vector<char> reach(static_cast<std::size_t>(ss.b) + 1, 0);
  reach[0] = 1;
  for (long long v : ss.a) {
    if (v <= 0) continue;
    for (long long t = ss.b; t >= v; --t) {
      if (reach[static_cast<std::size_t>(t - v)]) reach[static_cast<std::size_t>(t)] = 1;
    }
  }
  return reach[static_cast<std::size_t>(ss.b)] != 0;
}

GadgetVariant parse_gadget_variant(std::string_view name) {
  if (name == "voltage") return GadgetVariant::voltage;
  if (name == "simplified") return GadgetVariant::simplified;
  throw ValueError("unknown gadget variant '" + std::string(name) + "'");
}

std::string to_string(GadgetVariant v) { return v == GadgetVariant::voltage ? "voltage" : "simplified"; }

GadgetInstance gadget_voltage(const SubSumInstance& ss, double alpha, double beta, double delta) {
  ss.validate();
  check_params(alpha, beta);
  if (!(delta > 0.0)) throw ValueError("delta must be positive");

  const double eps = delta / 100.0;
  const double c = delta / 2.0 - eps;
  const double sum_a = std::accumulate(ss.a.begin(), ss.a.end(), 0.0,
                                       [](double acc, long long v) { return acc + static_cast<double>(v); });
  const double k = sum_a * sum_a + static_cast<double>(ss.b) * static_cast<double>(ss.b);

  // Requirement: scale >= (beta - 1) v0 + beta delta with v0 = scale^2 k / c,
  // and scale > 2c.
  const double quad = (beta - 1.0) * k / c;
  double scale = 1.0;
  if (scale < quad * scale * scale + beta * delta || scale <= 2.0 * c) {
    if (quad == 0.0) {
      scale = beta * delta;
    } else {
      const double disc = 1.0 - 4.0 * quad * beta * delta;
      if (disc < 0.0) throw ValueError("no self-consistent demand multiplier for these parameters");
      scale = 2.0 * beta * delta / (1.0 + std::sqrt(disc));
    }
  }

  GadgetInstance g;
  g.variant = GadgetVariant::voltage;
  g.scale = scale;
  g.params = {alpha, beta, delta, eps};
  g.customers = gadget_customers(ss, scale, alpha);
  const double v0 = scale * scale * k / c;
  if (!(v0 - delta > 0.0)) throw ValueError("delta too large for the source voltage");
  g.limits = {v0, v0 - delta, v0 + delta};
  g.network = single_edge(capacity_for(g.customers), g.limits);
  g.loss_mode = LossMode::zero;
  g.include_lower_voltage = true;
  return g;
}

GadgetInstance gadget_simplified_voltage(const SubSumInstance& ss, double alpha, double beta) {
  ss.validate();
  check_params(alpha, beta);

  GadgetInstance g;
  g.variant = GadgetVariant::simplified;
  g.limits = {1.0, 0.81, 1.21};
  const double v_upper = 0.5 * (g.limits.v0 - g.limits.vmin_sq);
  const double v_lower = 0.5 * (g.limits.v0 - g.limits.vmax_sq);
  g.scale = std::max(-v_lower / beta, beta * v_upper);
  g.params = {alpha, beta, 0.0, 0.0};
  g.customers = gadget_customers(ss, 2.0 * g.scale, alpha);
  g.network = single_edge(capacity_for(g.customers), g.limits);
  g.loss_mode = LossMode::zero;
  g.include_lower_voltage = true;
  return g;
}

bool gadget_bounds_hold(const GadgetInstance& g) {
  const double tol = 1e-12 * std::max(1.0, g.scale);
  const double beta = g.params.beta;
  const OperatingLimits& l = g.limits;
  if (g.variant == GadgetVariant::voltage) {
    const double c = g.params.delta / 2.0 - g.params.eps_small;
    const double need = std::max(l.v0 - l.vmin_sq / beta, beta * l.vmax_sq - l.v0);
    return g.scale >= need - tol * std::max(1.0, l.v0) && c / g.scale < 0.5;
  }
  const double v_upper = 0.5 * (l.v0 - l.vmin_sq);
  const double v_lower = 0.5 * (l.v0 - l.vmax_sq);
  return -v_lower / (2.0 * beta * g.scale) <= 0.5 + tol && beta * v_upper / (2.0 * g.scale) <= 0.5 + tol;
}

double gadget_best_utility(const GadgetInstance& g) {
  if (g.variant == GadgetVariant::voltage) {
    ExactOracleOptions opts;
    opts.loss_mode = g.loss_mode;
    opts.include_lower_voltage = g.include_lower_voltage;
    return brute_force_maxopf(g.network, g.customers, g.limits, opts).best_utility;
  }
  const SimplifiedLimits lim = make_limits(g.network, g.customers, g.loss_mode, g.limits, g.include_lower_voltage);
  return brute_force_smaxopf(lim, g.customers).best_utility;
}

bool verify_reduction(const GadgetInstance& g, const SubSumInstance& ss) {
  return (gadget_best_utility(g) >= 1.0 - 1e-12) == subset_sum(ss);
}

}  // namespace maxopf
