// Command-line front end: network validation, scenario generation, solving,
// benchmarking, hardness gadgets and experiment reporting.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxopf/alloc.hpp"
#include "maxopf/errors.hpp"
#include "maxopf/hardness.hpp"
#include "maxopf/io.hpp"
#include "maxopf/oracle.hpp"
#include "maxopf/powerflow.hpp"
#include "maxopf/scenarios.hpp"
#include "maxopf/theory.hpp"

using namespace maxopf;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitGuard = 3;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::shared_ptr<const RadialNetwork> network_from(const std::string& path) {
  if (path.empty() || path == "network38") return std::make_shared<const RadialNetwork>(network38());
  return std::make_shared<const RadialNetwork>(load_network_file(path));
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    std::size_t lo = std::stoul(text.substr(0, dots));
    const std::size_t hi = std::stoul(text.substr(dots + 2));
    if (lo == 0 || hi < lo) throw ValueError("size range must be 'a..b' with 0 < a <= b");
    for (; lo < hi; lo *= 2) out.push_back(lo);
    out.push_back(hi);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoul(item));
  }
  if (out.empty()) throw ValueError("no sizes given");
  return out;
}

// "TAG:n[:fraction[:seed]]" or a JSON file holding spec fields.
ScenarioSpec parse_spec(const std::string& text) {
  ScenarioSpec spec;
  if (text.find(':') != std::string::npos || text.size() == 2) {
    std::stringstream ss(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    spec.tag = parts.at(0);
    if (parts.size() > 1) spec.n = std::stoul(parts[1]);
    if (parts.size() > 2) spec.elastic_fraction = std::stod(parts[2]);
    if (parts.size() > 3) spec.seed = std::stoull(parts[3]);
    return spec;
  }
  Json doc;
  try {
    doc = Json::parse(read_text_file(text));
  } catch (const Json::exception& ex) {
    throw ParseError(std::string("invalid spec JSON: ") + ex.what());
  }
  const Json& sp = doc.contains("spec") ? doc["spec"] : doc;
  spec.tag = sp.value("tag", spec.tag);
  spec.n = sp.value("n", spec.n);
  spec.elastic_fraction = sp.value("elastic_fraction", spec.elastic_fraction);
  spec.seed = sp.value("seed", spec.seed);
  spec.network = sp.value("network", spec.network);
  return spec;
}

struct SolveArgs {
  std::string alg = "inelas";
  std::string network;
  std::string scenario;
  double epsilon = 0.005;
  std::string loss_mode;
  bool no_lower_voltage = false;
  std::string out;
};

int run_solve(const SolveArgs& a) {
  const Scenario sc = load_scenario_file(a.scenario);
  const auto net = a.network.empty() && sc.network ? sc.network : network_from(a.network);
  const OperatingLimits limits = sc.limits ? *sc.limits : net->limits().value_or(OperatingLimits{});
  SolverSettings st = sc.settings.value_or(SolverSettings{});
  if (!a.loss_mode.empty()) st.loss_mode = parse_loss_mode(a.loss_mode);
  if (a.no_lower_voltage) st.include_lower_voltage = false;
  st.epsilon = a.epsilon;

  const std::vector<Customer>& customers = sc.customers;
  const std::size_t n = customers.size();
  Json doc;
  doc["alg"] = a.alg;
  doc["n"] = n;

  Allocation x(n, 0.0);
  if (a.alg == "greedy" || a.alg == "inelas") {
    std::vector<Customer> inelastic = customers;
    for (Customer& c : inelastic) c.elastic = false;
    const SimplifiedLimits lim = make_limits(net, inelastic, st.loss_mode, limits, st.include_lower_voltage);
    if (a.alg == "greedy") {
      x = indicator(n, greedy_alloc(lim, inelastic));
    } else {
      const InelasResult r = inelas_dem_alloc(lim, inelastic);
      x = indicator(n, r.chosen);
      doc["groups"] = r.trace.groups.size();
      doc["winner"] = r.trace.winner;
      doc["degenerate"] = r.trace.degenerate;
    }
  } else if (a.alg == "mix") {
    MixOptions mo;
    mo.epsilon = st.epsilon;
    mo.loss_mode = st.loss_mode;
    mo.include_lower_voltage = st.include_lower_voltage;
    const MixResult r = mix_dem_alloc(net, customers, limits, mo);
    x = r.allocation;
    doc["delta"] = r.delta;
    doc["iterations"] = r.iterations;
    doc["exhausted"] = r.exhausted;
    doc["elastic_scale"] = r.elastic_scale;
  } else if (a.alg == "oracle-s") {
    const SimplifiedLimits lim = make_limits(net, customers, st.loss_mode, limits, st.include_lower_voltage);
    const OracleResult r = brute_force_smaxopf(lim, customers);
    x = r.best_allocation;
    doc["exact"] = r.exact;
    doc["nodes_explored"] = r.nodes_explored;
  } else if (a.alg == "oracle") {
    ExactOracleOptions eo;
    eo.epsilon = st.epsilon;
    eo.loss_mode = st.loss_mode;
    eo.include_lower_voltage = st.include_lower_voltage;
    const OracleResult r = brute_force_maxopf(net, customers, limits, eo);
    x = r.best_allocation;
    doc["exact"] = r.exact;
    doc["nodes_explored"] = r.nodes_explored;
  } else {
    throw ValueError("unknown algorithm '" + a.alg + "'");
  }

  const FeasibilityCheck check = opf_feasible(*net, customers, x, limits);
  doc["utility"] = total_utility(customers, x);
  doc["feasible"] = check.feasible;
  doc["beta_cap"] = std::isfinite(check.report.capacity_beta) ? Json(check.report.capacity_beta) : Json(nullptr);
  doc["beta_volt"] = std::isfinite(check.report.voltage_beta) ? Json(check.report.voltage_beta) : Json(nullptr);
  if (!check.reason.empty()) doc["reason"] = check.reason;
  doc["loss_mode"] = to_string(st.loss_mode);
  doc["include_lower_voltage"] = st.include_lower_voltage;
  doc["allocation"] = x;
  emit(a.out, doc.dump(2) + "\n");
  return 0;
}

int run_bench(const std::string& sizes_text, std::size_t reps, const std::string& tag, std::uint64_t seed,
              const std::string& network, const std::string& out) {
  const auto net = network_from(network);
  const OperatingLimits limits = net->limits().value_or(OperatingLimits{});
  std::ostringstream os;
  os << "n,rep,ms\n";
  for (std::size_t n : parse_sizes(sizes_text)) {
    for (std::size_t r = 0; r < reps; ++r) {
      ScenarioSpec spec;
      spec.tag = tag;
      spec.n = n;
      spec.seed = split_seed(seed, r);
      std::vector<Customer> cs = generate_scenario(spec, *net);
      const auto start = std::chrono::steady_clock::now();
      const SimplifiedLimits lim = make_limits(net, cs, LossMode::aggregate, limits);
      const InelasResult res = inelas_dem_alloc(lim, cs);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      os << n << ',' << r << ',' << ms << '\n';
      (void)res;
    }
  }
  emit(out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utility-maximizing power allocation on radial networks"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a network file and print its structure");
  validate->add_option("network", validate_path, "Network CSV or JSON (or 'network38')")->required();

  std::string gen_spec, gen_out, gen_network, gen_tag;
  std::size_t gen_n = 0;
  double gen_fraction = -1.0;
  std::uint64_t gen_seed = 0;
  bool gen_embed = false;
  auto* gen = app.add_subcommand("gen", "Generate a random scenario");
  gen->add_option("spec", gen_spec, "TAG:n[:fraction[:seed]] or a spec JSON file")->required();
  gen->add_option("--tag", gen_tag, "Override the case tag");
  gen->add_option("--n", gen_n, "Override the customer count");
  gen->add_option("--elastic", gen_fraction, "Override the elastic fraction");
  gen->add_option("--seed", gen_seed, "Override the seed");
  gen->add_option("--network", gen_network, "Network file (default: shipped 38-node feeder)");
  gen->add_flag("--embed-network", gen_embed, "Store the network inside the scenario");
  gen->add_option("-o,--out", gen_out, "Output path (default: stdout)");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Run an allocation algorithm on a scenario");
  solve->add_option("--alg", solve_args.alg, "greedy | inelas | mix | oracle-s | oracle")
      ->check(CLI::IsMember({"greedy", "inelas", "mix", "oracle-s", "oracle"}));
  solve->add_option("--network", solve_args.network, "Network file (default: embedded or 38-node)");
  solve->add_option("--scenario", solve_args.scenario, "Scenario JSON")->required();
  solve->add_option("--epsilon", solve_args.epsilon, "Capacity reduction step");
  solve->add_option("--loss-mode", solve_args.loss_mode, "zero | capacity | aggregate")
      ->check(CLI::IsMember({"zero", "capacity", "aggregate"}));
  solve->add_flag("--no-lower-voltage", solve_args.no_lower_voltage, "Drop the lower voltage constraint");
  solve->add_option("-o,--out", solve_args.out, "Output path (default: stdout)");

  std::string bench_sizes = "250,500,1000,2000", bench_out, bench_tag = "CR", bench_network;
  std::size_t bench_reps = 3;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Time the grouped greedy algorithm");
  bench->add_option("--sizes", bench_sizes, "'a,b,c' or 'a..b' (doubling)");
  bench->add_option("--reps", bench_reps, "Repetitions per size");
  bench->add_option("--tag", bench_tag, "Case tag");
  bench->add_option("--seed", bench_seed, "Master seed");
  bench->add_option("--network", bench_network, "Network file");
  bench->add_option("-o,--out", bench_out, "Output CSV (default: stdout)");

  std::string gadget_subsum, gadget_variant = "voltage", gadget_out;
  double gadget_alpha = 0.5, gadget_beta = 1.0, gadget_delta = 0.1;
  auto* gadget = app.add_subcommand("gadget", "Build a subset-sum reduction instance");
  gadget->add_option("--subsum", gadget_subsum, "'a1,a2,...:B'")->required();
  gadget->add_option("--variant", gadget_variant, "voltage | simplified")
      ->check(CLI::IsMember({"voltage", "simplified"}));
  gadget->add_option("--alpha", gadget_alpha, "Utility scale of the value customers");
  gadget->add_option("--beta", gadget_beta, "Violation factor");
  gadget->add_option("--delta", gadget_delta, "Voltage window half-width (voltage variant)");
  gadget->add_option("-o,--out", gadget_out, "Output scenario JSON (default: stdout)");

  std::string report_in, report_out, report_dat;
  auto* report = app.add_subcommand("report", "Aggregate metric rows into means and 95% intervals");
  report->add_option("--in", report_in, "Metrics CSV")->required();
  report->add_option("-o,--out", report_out, "Summary CSV (default: stdout)");
  report->add_option("--dat", report_dat, "Also write a gnuplot data file");

  std::string exp_tag = "CR", exp_algs = "greedy,inelas,mix", exp_out, exp_network, exp_loss = "aggregate";
  std::size_t exp_n = 12, exp_reps = 40;
  double exp_fraction = 0.0, exp_epsilon = 0.005;
  std::uint64_t exp_seed = 1;
  bool exp_no_oracle = false, exp_no_lower = false;
  auto* experiment = app.add_subcommand("experiment", "Run repeated scenarios and emit metric rows");
  experiment->add_option("--tag", exp_tag, "Case tag");
  experiment->add_option("--n", exp_n, "Customers per scenario");
  experiment->add_option("--elastic", exp_fraction, "Elastic fraction");
  experiment->add_option("--reps", exp_reps, "Repetitions");
  experiment->add_option("--seed", exp_seed, "Master seed");
  experiment->add_option("--algs", exp_algs, "Comma-separated algorithms");
  experiment->add_option("--epsilon", exp_epsilon, "Capacity reduction step");
  experiment->add_option("--loss-mode", exp_loss, "zero | capacity | aggregate");
  experiment->add_flag("--no-lower-voltage", exp_no_lower, "Drop the lower voltage constraint");
  experiment->add_flag("--no-oracle", exp_no_oracle, "Skip the exhaustive baselines");
  experiment->add_option("--network", exp_network, "Network file");
  experiment->add_option("-o,--out", exp_out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto net = network_from(validate_path);
      const PathIndex paths(*net);
      std::cout << "buses " << net->bus_count() << "\nedges " << net->edge_count() << "\ndepth " << paths.depth()
                << "\nleaves " << leaf_edges(*net).size() << "\n";
      return 0;
    }
    if (*gen) {
      ScenarioSpec spec = parse_spec(gen_spec);
      if (!gen_tag.empty()) spec.tag = gen_tag;
      if (gen->count("--n")) spec.n = gen_n;
      if (gen_fraction >= 0.0) spec.elastic_fraction = gen_fraction;
      if (gen->count("--seed")) spec.seed = gen_seed;
      const auto net = network_from(gen_network);
      if (!gen_network.empty()) spec.network = gen_network;
      Scenario sc;
      sc.spec = spec;
      sc.customers = generate_scenario(spec, *net);
      if (gen_embed) sc.network = net;
      emit(gen_out, scenario_to_json(sc));
      return 0;
    }
    if (*solve) return run_solve(solve_args);
    if (*bench) return run_bench(bench_sizes, bench_reps, bench_tag, bench_seed, bench_network, bench_out);
    if (*gadget) {
      const SubSumInstance ss = parse_subsum(gadget_subsum);
      const GadgetInstance g = parse_gadget_variant(gadget_variant) == GadgetVariant::voltage
                                   ? gadget_voltage(ss, gadget_alpha, gadget_beta, gadget_delta)
                                   : gadget_simplified_voltage(ss, gadget_alpha, gadget_beta);
      emit(gadget_out, scenario_to_json(gadget_to_scenario(g, ss)));
      return 0;
    }
    if (*report) {
      const auto rows = parse_metrics_csv(read_text_file(report_in));
      const auto summary = summarize(rows);
      std::ostringstream os;
      write_summary_csv(os, summary);
      emit(report_out, os.str());
      if (!report_dat.empty()) {
        std::ostringstream dat;
        write_gnuplot_dat(dat, summary);
        write_text_file(report_dat, dat.str());
      }
      return 0;
    }
    if (*experiment) {
      ScenarioSpec spec;
      spec.tag = exp_tag;
      spec.n = exp_n;
      spec.elastic_fraction = exp_fraction;
      spec.seed = exp_seed;
      std::vector<std::string> algs;
      std::stringstream ss(exp_algs);
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) algs.push_back(item);
      }
      ExperimentOptions opts;
      opts.network = network_from(exp_network);
      opts.limits = opts.network->limits().value_or(OperatingLimits{});
      opts.settings.loss_mode = parse_loss_mode(exp_loss);
      opts.settings.include_lower_voltage = !exp_no_lower;
      opts.settings.epsilon = exp_epsilon;
      opts.run_oracle = !exp_no_oracle;
      std::ostringstream os;
      write_metrics_csv(os, run_experiment(spec, algs, exp_reps, opts));
      emit(exp_out, os.str());
      return 0;
    }
  } catch (const TooLarge& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitGuard;
  } catch (const ParseError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const TopologyError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const ValueError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
