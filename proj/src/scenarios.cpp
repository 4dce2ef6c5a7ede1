#include "maxopf/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>
#include <tuple>

#include "maxopf/errors.hpp"
#include "maxopf/oracle.hpp"
#include "maxopf/powerflow.hpp"
#include "maxopf/theory.hpp"

namespace maxopf {

Correlation ScenarioSpec::correlation() const {
  return tag.size() == 2 && tag[0] == 'U' ? Correlation::uncorrelated : Correlation::correlated;
}

DemandType ScenarioSpec::type() const {
  if (tag.size() == 2 && tag[1] == 'I') return DemandType::industrial;
  if (tag.size() == 2 && tag[1] == 'M') return DemandType::mixed;
  return DemandType::residential;
}

void ScenarioSpec::validate() const {
  const bool ok = tag.size() == 2 && (tag[0] == 'C' || tag[0] == 'U') &&
                  (tag[1] == 'R' || tag[1] == 'I' || tag[1] == 'M');
  if (!ok) throw ValueError("case tag must be one of CR, CI, CM, UR, UI, UM");
  if (!(elastic_fraction >= 0.0 && elastic_fraction <= 1.0)) throw ValueError("elastic fraction must lie in [0, 1]");
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t Rng::index(std::size_t count) {
  if (count == 0) throw ValueError("cannot draw from an empty range");
  return std::min(count - 1, static_cast<std::size_t>(uniform() * static_cast<double>(count)));
}

namespace {

// Fisher-Yates on [0, n), keeping the first `take` entries.
std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t take) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < take && i < n; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  idx.resize(std::min(take, n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::vector<Customer> generate_scenario(const ScenarioSpec& spec, const RadialNetwork& net) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t n = spec.n;
  const double s_base = net.base().s_va;

  std::vector<char> industrial(n, 0);
  if (spec.type() == DemandType::industrial) {
    std::fill(industrial.begin(), industrial.end(), 1);
  } else if (spec.type() == DemandType::mixed) {
    const std::size_t cap = n / 5;
    if (cap >= 1) {
      const std::size_t count = 1 + rng.index(cap);
      for (std::size_t k : sample_indices(rng, n, count)) industrial[k] = 1;
    }
  }

  const double max_phase = kMaxPhaseDeg * std::numbers::pi / 180.0;
  std::vector<Customer> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Customer& c = out[k];
    c.bus = net.bus_id(1 + rng.index(net.bus_count() - 1));
    const bool big = industrial[k] != 0;
    const double va = big ? rng.uniform(kIndustrialMinVa, kIndustrialMaxVa)
                          : rng.uniform(kResidentialMinVa, kResidentialMaxVa);
    // Industrial loads draw reactive power only in the lagging direction.
    const double phase = big ? rng.uniform(0.0, max_phase) : rng.uniform(-max_phase, max_phase);
    c.s = std::polar(va / s_base, phase);
    if (spec.correlation() == Correlation::correlated) {
      c.utility = std::norm(c.s);
    } else {
      c.utility = rng.uniform(0.0, (big ? kIndustrialMaxVa : kResidentialMaxVa) / s_base);
    }
  }

  const auto elastic_count = static_cast<std::size_t>(std::llround(spec.elastic_fraction * static_cast<double>(n)));
  for (std::size_t k : sample_indices(rng, n, elastic_count)) out[k].elastic = true;
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double ratio_of(double utility, double oracle) {
  if (std::isnan(oracle)) return std::numeric_limits<double>::quiet_NaN();
  if (oracle <= 0.0) return 1.0;
  return utility / oracle;
}

std::vector<MetricsRow> run_repetition(const ScenarioSpec& spec, const std::vector<std::string>& algorithms,
                                       const ExperimentOptions& options, const RadialNetwork& net,
                                       const std::shared_ptr<const RadialNetwork>& net_ptr) {
  const std::vector<Customer> customers = generate_scenario(spec, net);
  const SolverSettings& st = options.settings;
  const std::size_t n = customers.size();

  std::vector<Customer> inelastic = customers;
  for (Customer& c : inelastic) c.elastic = false;

  const PathIndex paths(net);
  const RatioBounds bounds = ratio_bounds(geometry(net, customers, paths), n);

  std::optional<SimplifiedLimits> simplified;
  std::optional<double> opt_s;
  std::optional<double> opt;

  std::vector<MetricsRow> rows;
  for (const std::string& alg : algorithms) {
    MetricsRow row;
    row.alg = alg;
    row.n = n;
    row.tag = spec.tag;
    row.seed = spec.seed;
    row.elastic_fraction = spec.elastic_fraction;
    row.alpha_bar = bounds.abar;
    row.oracle = std::numeric_limits<double>::quiet_NaN();

    Allocation x;
    const auto start = Clock::now();
    if (alg == "greedy" || alg == "inelas") {
      if (!simplified) simplified = make_limits(net_ptr, inelastic, st.loss_mode, options.limits, st.include_lower_voltage);
      const auto chosen = alg == "greedy" ? greedy_alloc(*simplified, inelastic)
                                          : inelas_dem_alloc(*simplified, inelastic).chosen;
      x = indicator(n, chosen);
      row.ms = elapsed_ms(start);
      if (options.run_oracle && n <= kSimplifiedOracleGuard) {
        if (!opt_s) opt_s = brute_force_smaxopf(*simplified, inelastic).best_utility;
        row.oracle = *opt_s;
      }
      row.utility = total_utility(inelastic, x);
    } else if (alg == "mix") {
      MixOptions mo;
      mo.epsilon = st.epsilon;
      mo.loss_mode = st.loss_mode;
      mo.include_lower_voltage = st.include_lower_voltage;
      const MixResult res = mix_dem_alloc(net_ptr, customers, options.limits, mo);
      row.ms = elapsed_ms(start);
      x = res.allocation;
      row.delta = res.delta;
      std::size_t inelastic_count = 0;
      for (const Customer& c : customers) inelastic_count += c.elastic ? 0 : 1;
      if (options.run_oracle && inelastic_count <= kExactOracleGuard) {
        if (!opt) {
          ExactOracleOptions eo;
          eo.epsilon = st.epsilon;
          eo.loss_mode = st.loss_mode;
          eo.include_lower_voltage = st.include_lower_voltage;
          opt = brute_force_maxopf(net_ptr, customers, options.limits, eo).best_utility;
        }
        row.oracle = *opt;
      }
      row.utility = total_utility(customers, x);
    } else {
      throw ValueError("unknown algorithm '" + alg + "'");
    }

    const FeasibilityCheck check = opf_feasible(net, customers, x, options.limits);
    row.feasible = check.feasible;
    row.beta_cap = check.report.capacity_beta;
    row.beta_volt = check.report.voltage_beta;
    row.ratio = ratio_of(row.utility, row.oracle);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<MetricsRow> run_experiment(const ScenarioSpec& spec, const std::vector<std::string>& algorithms,
                                       std::size_t repetitions, const ExperimentOptions& options) {
  spec.validate();
  if (repetitions < 1) throw ValueError("repetitions must be at least 1");
  const auto net = options.network ? options.network : std::make_shared<const RadialNetwork>(network38());

  std::vector<std::vector<MetricsRow>> per_rep(repetitions);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t r = next++; r < repetitions && !failed; r = next++) {
      try {
        ScenarioSpec rep = spec;
        rep.seed = split_seed(spec.seed, r);
        per_rep[r] = run_repetition(rep, algorithms, options, *net, net);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, repetitions));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<MetricsRow> rows;
  for (auto& rep : per_rep) {
    for (auto& row : rep) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::size_t, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<const MetricsRow*>> groups;
  for (const MetricsRow& r : rows) {
    Key key{r.alg, r.tag, r.n, r.elastic_fraction};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  auto mean_ci = [](const std::vector<double>& v) -> std::pair<double, double> {
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    double mean = 0.0;
    for (double d : v) mean += d;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double d : v) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return {mean, 1.96 * sd / std::sqrt(static_cast<double>(v.size()))};
  };

  std::vector<SummaryRow> out;
  for (const Key& key : order) {
    const auto& members = groups[key];
    SummaryRow s;
    std::tie(s.alg, s.tag, s.n, s.elastic_fraction) = key;
    s.count = members.size();
    std::vector<double> ratios;
    std::vector<double> utilities;
    for (const MetricsRow* r : members) {
      if (!std::isnan(r->ratio)) ratios.push_back(r->ratio);
      utilities.push_back(r->utility);
      s.max_delta = std::max(s.max_delta, r->delta);
      s.mean_ms += r->ms / static_cast<double>(members.size());
      if (!r->feasible) ++s.infeasible;
    }
    std::tie(s.mean_ratio, s.ci_ratio) = mean_ci(ratios);
    std::tie(s.mean_utility, s.ci_utility) = mean_ci(utilities);
    out.push_back(s);
  }
  return out;
}

}  // namespace maxopf
