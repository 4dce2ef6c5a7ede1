#include "maxopf/netmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "maxopf/errors.hpp"
#include "network38_data.hpp"

namespace maxopf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::string_view row) {
  field = trim(field);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw ParseError("invalid number '" + std::string(field) + "' in row '" + std::string(row) + "'");
  }
  return value;
}

BusId parse_bus(std::string_view field, std::string_view row) {
  field = trim(field);
  BusId value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw ParseError("invalid bus id '" + std::string(field) + "' in row '" + std::string(row) + "'");
  }
  if (value < 0) throw ParseError("negative bus id in row '" + std::string(row) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void validate_edge(const Edge& e) {
  if (!(e.r > 0.0) || !std::isfinite(e.r)) {
    throw ValueError("edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ") has non-positive resistance");
  }
  if (!(e.x > 0.0) || !std::isfinite(e.x)) {
    throw ValueError("edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ") has non-positive reactance");
  }
  if (!(e.capacity >= 0.0)) {
    throw ValueError("edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ") has negative capacity");
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void PerUnitBase::validate() const {
  if (!(s_va > 0.0) || !(v_v > 0.0)) throw ValueError("per-unit base quantities must be positive");
}

void OperatingLimits::validate() const {
  if (!(vmin_sq > 0.0) || !(vmin_sq <= v0) || !(v0 <= vmax_sq)) {
    throw ValueError("operating limits must satisfy 0 < vmin_sq <= v0 <= vmax_sq");
  }
}

RadialNetwork::RadialNetwork(std::vector<Edge> edges, PerUnitBase base, std::optional<OperatingLimits> limits)
    : base_(base), limits_(limits) {
  base_.validate();
  if (limits_) limits_->validate();
  if (edges.empty()) throw TopologyError("network has no edges");

  std::unordered_map<BusId, std::vector<std::size_t>> out;
  std::unordered_map<BusId, std::size_t> parent_row;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    validate_edge(e);
    if (e.from == e.to) throw TopologyError("self-loop at bus " + std::to_string(e.from));
    if (e.to == 0) throw TopologyError("root bus 0 cannot have a parent");
    if (!parent_row.emplace(e.to, i).second) {
      throw TopologyError("bus " + std::to_string(e.to) + " has multiple parents");
    }
    out[e.from].push_back(i);
  }
  if (!out.contains(0)) throw TopologyError("root bus 0 has no outgoing edge");
  if (out[0].size() != 1) throw TopologyError("root bus 0 must have exactly one child");

  // Breadth-first from the root, children in input order.
  bus_ids_.push_back(0);
  from_.reserve(edges.size());
  edges_.reserve(edges.size());
  std::deque<BusIndex> queue{0};
  while (!queue.empty()) {
    const BusIndex b = queue.front();
    queue.pop_front();
    const auto it = out.find(bus_ids_[b]);
    if (it == out.end()) continue;
    for (std::size_t row : it->second) {
      edges_.push_back(edges[row]);
      from_.push_back(b);
      bus_ids_.push_back(edges[row].to);
      queue.push_back(bus_ids_.size() - 1);
    }
  }
  if (edges_.size() != edges.size()) {
    throw TopologyError("network is disconnected or contains a cycle unreachable from bus 0");
  }
  for (BusIndex b = 0; b < bus_ids_.size(); ++b) index_.emplace(bus_ids_[b], b);
  children_.assign(bus_ids_.size(), {});
  for (EdgeIndex e = 0; e < edges_.size(); ++e) children_[from_[e]].push_back(e);
}

BusIndex RadialNetwork::index_of(BusId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw ValueError("unknown bus id " + std::to_string(id));
  return it->second;
}

bool RadialNetwork::operator==(const RadialNetwork& other) const {
  return edges_ == other.edges_ && base_ == other.base_ && limits_ == other.limits_;
}

PathIndex::PathIndex(const RadialNetwork& net) {
  const std::size_t m = net.edge_count();
  edge_paths_.resize(m);
  for (EdgeIndex e = 0; e < m; ++e) {
    auto& path = edge_paths_[e];
    path.push_back(e);
    const BusIndex from = net.from_index(e);
    if (from != 0) {
      const auto& up = edge_paths_[net.parent_edge(from)];
      path.insert(path.end(), up.begin(), up.end());
    }
    depth_ = std::max(depth_, path.size());
  }
  downstream_.resize(m);
  subtree_edges_.resize(m);
  for (EdgeIndex e = 0; e < m; ++e) {
    for (EdgeIndex up : edge_paths_[e]) {
      downstream_[up].push_back(net.to_index(e));
      subtree_edges_[up].push_back(e);
    }
  }
}

std::span<const EdgeIndex> PathIndex::bus_path(BusIndex b) const {
  if (b == 0) return {};
  return edge_paths_[b - 1];
}

std::vector<EdgeIndex> leaf_edges(const RadialNetwork& net) {
  std::vector<EdgeIndex> leaves;
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    if (net.child_edges(net.to_index(e)).empty()) leaves.push_back(e);
  }
  return leaves;
}

Edge parse_edge_row(std::string_view row) {
  std::string cleaned;
  cleaned.reserve(row.size());
  for (char c : row) {
    if (c != '(' && c != ')') cleaned.push_back(c);
  }
  const auto fields = split(cleaned, ',');
  if (fields.size() != 5) {
    throw ParseError("expected 5 fields (from,to,r,x,cap) in row '" + std::string(row) + "'");
  }
  Edge e;
  e.from = parse_bus(fields[0], row);
  e.to = parse_bus(fields[1], row);
  e.r = parse_double(fields[2], row);
  e.x = parse_double(fields[3], row);
  e.capacity = parse_double(fields[4], row);
  return e;
}

RadialNetwork parse_network_csv(std::string_view text) {
  PerUnitBase base;
  std::map<std::string, double, std::less<>> settings;
  std::vector<Edge> edges;
  bool header_seen = false;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto colon = body.find_first_of(":=");
      if (colon == std::string_view::npos) continue;
      const auto key = trim(body.substr(0, colon));
      const auto value = trim(body.substr(colon + 1));
      static constexpr std::string_view known[] = {"s_base_va", "v_base_v", "v0_sq", "vmin_sq", "vmax_sq"};
      if (std::find(std::begin(known), std::end(known), key) != std::end(known)) {
        settings[std::string(key)] = parse_double(value, line);
      }
      continue;
    }
    if (!header_seen) {
      std::string compact;
      for (char c : line) {
        if (c != ' ' && c != '\t') compact.push_back(c);
      }
      if (compact == "from,to,r_pu,x_pu,cap_pu") {
        header_seen = true;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(line.front())) && line.front() != '(') {
        throw ParseError("line " + std::to_string(line_no) + ": expected header 'from,to,r_pu,x_pu,cap_pu'");
      }
      header_seen = true;
    }
    edges.push_back(parse_edge_row(line));
  }
  if (auto it = settings.find("s_base_va"); it != settings.end()) base.s_va = it->second;
  if (auto it = settings.find("v_base_v"); it != settings.end()) base.v_v = it->second;
  std::optional<OperatingLimits> limits;
  if (settings.contains("v0_sq") || settings.contains("vmin_sq") || settings.contains("vmax_sq")) {
    OperatingLimits l;
    if (auto it = settings.find("v0_sq"); it != settings.end()) l.v0 = it->second;
    if (auto it = settings.find("vmin_sq"); it != settings.end()) l.vmin_sq = it->second;
    if (auto it = settings.find("vmax_sq"); it != settings.end()) l.vmax_sq = it->second;
    limits = l;
  }
  return RadialNetwork(std::move(edges), base, limits);
}

RadialNetwork parse_network_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("invalid network JSON: ") + ex.what());
  }
  try {
    PerUnitBase base;
    if (doc.contains("base")) {
      base.s_va = doc["base"].value("s_va", base.s_va);
      base.v_v = doc["base"].value("v_v", base.v_v);
    }
    std::optional<OperatingLimits> limits;
    if (doc.contains("v0_sq") || doc.contains("vmin_sq") || doc.contains("vmax_sq")) {
      OperatingLimits l;
      l.v0 = doc.value("v0_sq", l.v0);
      l.vmin_sq = doc.value("vmin_sq", l.vmin_sq);
      l.vmax_sq = doc.value("vmax_sq", l.vmax_sq);
      limits = l;
    }
    std::vector<Edge> edges;
    for (const auto& item : doc.at("edges")) {
      Edge e;
      e.from = item.at("from").get<BusId>();
      e.to = item.at("to").get<BusId>();
      e.r = item.at("r_pu").get<double>();
      e.x = item.at("x_pu").get<double>();
      e.capacity = item.at("cap_pu").get<double>();
      if (e.from < 0 || e.to < 0) throw ParseError("negative bus id in network JSON");
      edges.push_back(e);
    }
    return RadialNetwork(std::move(edges), base, limits);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed network JSON: ") + ex.what());
  }
}

RadialNetwork load_network(std::string_view text) {
  const auto body = trim(text);
  if (!body.empty() && body.front() == '{') return parse_network_json(body);
  return parse_network_csv(text);
}

RadialNetwork load_network_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open network file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_network(buf.str());
}

std::string network_to_csv(const RadialNetwork& net) {
  std::ostringstream os;
  os << "# s_base_va: " << format_number(net.base().s_va) << '\n';
  os << "# v_base_v: " << format_number(net.base().v_v) << '\n';
  if (const auto& l = net.limits()) {
    os << "# v0_sq: " << format_number(l->v0) << '\n';
    os << "# vmin_sq: " << format_number(l->vmin_sq) << '\n';
    os << "# vmax_sq: " << format_number(l->vmax_sq) << '\n';
  }
  os << "from,to,r_pu,x_pu,cap_pu\n";
  for (const Edge& e : net.edges()) {
    os << e.from << ',' << e.to << ',' << format_number(e.r) << ',' << format_number(e.x) << ','
       << format_number(e.capacity) << '\n';
  }
  return os.str();
}

std::string network_to_json(const RadialNetwork& net) {
  nlohmann::ordered_json doc;
  doc["base"] = {{"s_va", net.base().s_va}, {"v_v", net.base().v_v}};
  if (const auto& l = net.limits()) {
    doc["v0_sq"] = l->v0;
    doc["vmin_sq"] = l->vmin_sq;
    doc["vmax_sq"] = l->vmax_sq;
  }
  auto& arr = doc["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : net.edges()) {
    arr.push_back({{"from", e.from}, {"to", e.to}, {"r_pu", e.r}, {"x_pu", e.x}, {"cap_pu", e.capacity}});
  }
  return doc.dump(2);
}

RadialNetwork network38() { return parse_network_csv(detail::kNetwork38Csv); }

}  // namespace maxopf
