#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "maxopf/alloc.hpp"
#include "maxopf/customer.hpp"
#include "maxopf/netmodel.hpp"

namespace maxopf {

enum class Correlation { correlated, uncorrelated };
enum class DemandType { residential, industrial, mixed };

struct ScenarioSpec {
  std::string tag = "CR";  ///< {C,U} x {R,I,M}
  std::size_t n = 0;
  double elastic_fraction = 0.0;
  std::uint64_t seed = 1;
  std::string network = "network38";

  Correlation correlation() const;
  DemandType type() const;
  /// Throws ValueError on an unknown tag or a fraction outside [0, 1].
  void validate() const;
};

/// splitmix64 step: derives independent stream seeds from one master seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

/// mt19937_64 with an explicit, library-independent mapping to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in [0, count).
  std::size_t index(std::size_t count);

 private:
  std::mt19937_64 engine_;
};

/// Demand classes in VA.
inline constexpr double kResidentialMinVa = 500.0;
inline constexpr double kResidentialMaxVa = 5000.0;
inline constexpr double kIndustrialMinVa = 300e3;
inline constexpr double kIndustrialMaxVa = 1e6;
inline constexpr double kMaxPhaseDeg = 36.0;

/// Random customers on non-root buses, deterministic in the spec.
std::vector<Customer> generate_scenario(const ScenarioSpec& spec, const RadialNetwork& net);

/// Per-scenario solver settings carried alongside customers.
struct SolverSettings {
  LossMode loss_mode = LossMode::aggregate;
  bool include_lower_voltage = true;
  double epsilon = 0.005;
};

struct MetricsRow {
  std::string alg;
  std::size_t n = 0;
  std::string tag;
  std::uint64_t seed = 0;
  double elastic_fraction = 0.0;
  double utility = 0.0;
  double oracle = 0.0;  ///< NaN when no oracle ran
  double ratio = 1.0;
  double alpha_bar = 0.0;
  double delta = 0.0;
  double beta_cap = 0.0;
  double beta_volt = 0.0;
  double ms = 0.0;
  bool feasible = true;  ///< exact power-flow check of the output
};

struct ExperimentOptions {
  std::shared_ptr<const RadialNetwork> network;  ///< defaults to the 38-node feeder
  OperatingLimits limits;
  SolverSettings settings;
  bool run_oracle = true;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// Algorithms: "greedy", "inelas", "mix". Repetition r uses seed
/// split_seed(spec.seed, r). Rows are ordered by repetition, then algorithm.
std::vector<MetricsRow> run_experiment(const ScenarioSpec& spec, const std::vector<std::string>& algorithms,
                                       std::size_t repetitions, const ExperimentOptions& options = {});

struct SummaryRow {
  std::string alg;
  std::string tag;
  std::size_t n = 0;
  double elastic_fraction = 0.0;
  std::size_t count = 0;
  double mean_ratio = 0.0;
  double ci_ratio = 0.0;  ///< 95% half-width, normal approximation
  double mean_utility = 0.0;
  double ci_utility = 0.0;
  double max_delta = 0.0;
  double mean_ms = 0.0;
  std::size_t infeasible = 0;
};

/// Groups by (alg, tag, n, elastic_fraction) in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows);

}  // namespace maxopf
