#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxopf/customer.hpp"
#include "maxopf/hardness.hpp"
#include "maxopf/netmodel.hpp"
#include "maxopf/scenarios.hpp"

namespace maxopf {

/// Customers plus optional embedded network, limits and solver settings.
struct Scenario {
  ScenarioSpec spec;
  std::vector<Customer> customers;
  std::shared_ptr<const RadialNetwork> network;  ///< null unless embedded
  std::optional<OperatingLimits> limits;
  std::optional<SolverSettings> settings;
};

std::string scenario_to_json(const Scenario& s);
/// Throws ParseError on malformed input.
Scenario parse_scenario_json(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

Scenario gadget_to_scenario(const GadgetInstance& g, const SubSumInstance& ss);

inline constexpr std::string_view kMetricsHeader = "alg,n,tag,seed,utility,oracle,ratio,alpha_bar,delta,beta_cap,beta_volt,ms";

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows);
/// Rows are marked feasible when both beta columns are at most 1.
std::vector<MetricsRow> parse_metrics_csv(std::string_view text);

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
/// Whitespace-separated columns for gnuplot: index, mean ratio, CI, mean ms.
void write_gnuplot_dat(std::ostream& os, const std::vector<SummaryRow>& rows);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace maxopf
