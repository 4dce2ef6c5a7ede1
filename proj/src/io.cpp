#include "maxopf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "maxopf/errors.hpp"

namespace maxopf {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(const std::string& field) {
  if (field == "nan") return std::nan("");
  if (field == "inf") return INFINITY;
  if (field == "-inf") return -INFINITY;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + field + "'");
  }
  if (used != field.size()) throw ParseError("not a number: '" + field + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  Json doc;
  doc["spec"] = {{"tag", s.spec.tag},
                 {"n", s.spec.n},
                 {"elastic_fraction", s.spec.elastic_fraction},
                 {"seed", s.spec.seed},
                 {"network", s.spec.network}};
  auto& arr = doc["customers"] = Json::array();
  for (const Customer& c : s.customers) {
    arr.push_back({{"bus", c.bus},
                   {"s_re_pu", c.s.real()},
                   {"s_im_pu", c.s.imag()},
                   {"u", c.utility},
                   {"kind", c.elastic ? "elastic" : "inelastic"}});
  }
  if (s.network) doc["network"] = Json::parse(network_to_json(*s.network));
  if (s.limits) doc["limits"] = {{"v0_sq", s.limits->v0}, {"vmin_sq", s.limits->vmin_sq}, {"vmax_sq", s.limits->vmax_sq}};
  if (s.settings) {
    doc["settings"] = {{"loss_mode", to_string(s.settings->loss_mode)},
                       {"include_lower_voltage", s.settings->include_lower_voltage},
                       {"epsilon", s.settings->epsilon}};
  }
  return doc.dump(2) + "\n";
}

Scenario parse_scenario_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& ex) {
    throw ParseError(std::string("invalid scenario JSON: ") + ex.what());
  }
  Scenario s;
  try {
    if (doc.contains("spec")) {
      const auto& sp = doc["spec"];
      s.spec.tag = sp.value("tag", s.spec.tag);
      s.spec.n = sp.value("n", s.spec.n);
      s.spec.elastic_fraction = sp.value("elastic_fraction", s.spec.elastic_fraction);
      s.spec.seed = sp.value("seed", s.spec.seed);
      s.spec.network = sp.value("network", s.spec.network);
    }
    for (const auto& item : doc.at("customers")) {
      Customer c;
      c.bus = item.at("bus").get<BusId>();
      c.s = {item.at("s_re_pu").get<double>(), item.at("s_im_pu").get<double>()};
      c.utility = item.at("u").get<double>();
      const std::string kind = item.value("kind", "inelastic");
      if (kind != "elastic" && kind != "inelastic") throw ParseError("customer kind must be elastic or inelastic");
      c.elastic = kind == "elastic";
      if (!(c.utility >= 0.0)) throw ParseError("customer utility must be non-negative");
      s.customers.push_back(c);
    }
    if (doc.contains("network")) {
      s.network = std::make_shared<const RadialNetwork>(parse_network_json(doc["network"].dump()));
    }
    if (doc.contains("limits")) {
      OperatingLimits l;
      l.v0 = doc["limits"].value("v0_sq", l.v0);
      l.vmin_sq = doc["limits"].value("vmin_sq", l.vmin_sq);
      l.vmax_sq = doc["limits"].value("vmax_sq", l.vmax_sq);
      l.validate();
      s.limits = l;
    }
    if (doc.contains("settings")) {
      SolverSettings st;
      st.loss_mode = parse_loss_mode(doc["settings"].value("loss_mode", to_string(st.loss_mode)));
      st.include_lower_voltage = doc["settings"].value("include_lower_voltage", st.include_lower_voltage);
      st.epsilon = doc["settings"].value("epsilon", st.epsilon);
      s.settings = st;
    }
  } catch (const Json::exception& ex) {
    throw ParseError(std::string("malformed scenario JSON: ") + ex.what());
  }
  s.spec.n = s.customers.size();
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) { return parse_scenario_json(read_text_file(path)); }

Scenario gadget_to_scenario(const GadgetInstance& g, const SubSumInstance& ss) {
  Scenario s;
  s.spec.tag = "CR";
  s.spec.n = g.customers.size();
  s.spec.network = "gadget-" + to_string(g.variant) + ":" + format_subsum(ss);
  s.customers = g.customers;
  s.network = g.network;
  s.limits = g.limits;
  s.settings = SolverSettings{g.loss_mode, g.include_lower_voltage, 0.005};
  return s;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  os << kMetricsHeader << '\n';
  for (const MetricsRow& r : rows) {
    os << r.alg << ',' << r.n << ',' << r.tag << ',' << r.seed << ',' << num(r.utility) << ',' << num(r.oracle)
       << ',' << num(r.ratio) << ',' << num(r.alpha_bar) << ',' << num(r.delta) << ',' << num(r.beta_cap) << ','
       << num(r.beta_volt) << ',' << num(r.ms) << '\n';
  }
}

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty metrics file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) throw ParseError("unexpected metrics header '" + line + "'");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 12) throw ParseError("metrics row must have 12 fields: '" + line + "'");
    MetricsRow r;
    r.alg = f[0];
    r.n = static_cast<std::size_t>(parse_num(f[1]));
    r.tag = f[2];
    try {
      r.seed = std::stoull(f[3]);
    } catch (const std::exception&) {
      throw ParseError("bad seed '" + f[3] + "'");
    }
    r.utility = parse_num(f[4]);
    r.oracle = parse_num(f[5]);
    r.ratio = parse_num(f[6]);
    r.alpha_bar = parse_num(f[7]);
    r.delta = parse_num(f[8]);
    r.beta_cap = parse_num(f[9]);
    r.beta_volt = parse_num(f[10]);
    r.ms = parse_num(f[11]);
    r.feasible = r.beta_cap <= 1.0 + 1e-9 && r.beta_volt <= 1.0 + 1e-9;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "alg,tag,n,elastic_fraction,count,mean_ratio,ci_ratio,mean_utility,ci_utility,max_delta,mean_ms,infeasible\n";
  for (const SummaryRow& r : rows) {
    os << r.alg << ',' << r.tag << ',' << r.n << ',' << num(r.elastic_fraction) << ',' << r.count << ','
       << num(r.mean_ratio) << ',' << num(r.ci_ratio) << ',' << num(r.mean_utility) << ',' << num(r.ci_utility)
       << ',' << num(r.max_delta) << ',' << num(r.mean_ms) << ',' << r.infeasible << '\n';
  }
}

void write_gnuplot_dat(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "# idx alg tag n mean_ratio ci_ratio mean_ms\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SummaryRow& r = rows[i];
    os << i << ' ' << r.alg << ' ' << r.tag << ' ' << r.n << ' ' << num(r.mean_ratio) << ' ' << num(r.ci_ratio)
       << ' ' << num(r.mean_ms) << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace maxopf
