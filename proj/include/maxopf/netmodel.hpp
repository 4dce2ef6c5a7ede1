#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace maxopf {

using BusId = int;
using BusIndex = std::size_t;
using EdgeIndex = std::size_t;
using Complex = std::complex<double>;

/// Base quantities used to convert physical units to per-unit.
struct PerUnitBase {
  double s_va = 1e6;    ///< apparent power base (VA)
  double v_v = 12660.0; ///< line voltage base (V)

  void validate() const;
  bool operator==(const PerUnitBase&) const = default;
};

/// Source voltage and voltage window, all as magnitude squares in p.u.^2.
struct OperatingLimits {
  double v0 = 1.0;
  double vmin_sq = 0.81;
  double vmax_sq = 1.21;

  /// Throws ValueError unless 0 < vmin_sq <= v0 <= vmax_sq.
  void validate() const;
  bool operator==(const OperatingLimits&) const = default;
};

/// A distribution line from parent bus `from` to child bus `to`.
struct Edge {
  BusId from = 0;
  BusId to = 0;
  double r = 0.0;         ///< resistance (p.u.)
  double x = 0.0;         ///< reactance (p.u.)
  double capacity = 0.0;  ///< apparent-power limit (p.u.)

  Complex impedance() const { return {r, x}; }
  bool operator==(const Edge&) const = default;
};

/// Rooted tree of buses and lines. Immutable once constructed.
///
/// Edges are stored in breadth-first order from the root, so the parent edge of
/// any edge has a smaller index. Edge `e` enters bus `to_index(e)`; bus index 0
/// is always the root (bus id 0) and bus index `e + 1` is the head of edge `e`.
class RadialNetwork {
 public:
  /// Validates the edge list and builds the tree. Throws TopologyError or
  /// ValueError on invalid input.
  explicit RadialNetwork(std::vector<Edge> edges, PerUnitBase base = {},
                         std::optional<OperatingLimits> limits = std::nullopt);

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeIndex e) const { return edges_[e]; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t bus_count() const { return bus_ids_.size(); }

  BusId bus_id(BusIndex b) const { return bus_ids_[b]; }
  std::span<const BusId> bus_ids() const { return bus_ids_; }
  bool has_bus(BusId id) const { return index_.contains(id); }
  /// Throws ValueError for unknown ids.
  BusIndex index_of(BusId id) const;

  BusIndex from_index(EdgeIndex e) const { return from_[e]; }
  BusIndex to_index(EdgeIndex e) const { return e + 1; }
  /// Edge entering a non-root bus.
  EdgeIndex parent_edge(BusIndex b) const { return b - 1; }
  std::span<const EdgeIndex> child_edges(BusIndex b) const { return children_[b]; }

  const PerUnitBase& base() const { return base_; }
  const std::optional<OperatingLimits>& limits() const { return limits_; }

  bool operator==(const RadialNetwork& other) const;

 private:
  std::vector<Edge> edges_;
  std::vector<BusId> bus_ids_;
  std::unordered_map<BusId, BusIndex> index_;
  std::vector<BusIndex> from_;
  std::vector<std::vector<EdgeIndex>> children_;
  PerUnitBase base_;
  std::optional<OperatingLimits> limits_;
};

/// Root paths and subtrees of every edge and bus.
class PathIndex {
 public:
  explicit PathIndex(const RadialNetwork& net);

  /// Edges from `e` up to the root, `e` first.
  std::span<const EdgeIndex> edge_path(EdgeIndex e) const { return edge_paths_[e]; }
  /// Edges from bus `b` up to the root; empty for the root.
  std::span<const EdgeIndex> bus_path(BusIndex b) const;
  /// Buses at or below the head of `e`.
  std::span<const BusIndex> downstream(EdgeIndex e) const { return downstream_[e]; }
  /// Edges at or below `e` (those e' with e on their root path).
  std::span<const EdgeIndex> subtree_edges(EdgeIndex e) const { return subtree_edges_[e]; }
  /// Longest root path, counted in edges.
  std::size_t depth() const { return depth_; }

 private:
  std::vector<std::vector<EdgeIndex>> edge_paths_;
  std::vector<std::vector<BusIndex>> downstream_;
  std::vector<std::vector<EdgeIndex>> subtree_edges_;
  std::size_t depth_ = 0;
};

inline PathIndex build_paths(const RadialNetwork& net) { return PathIndex(net); }

/// Edges whose head bus has no children.
std::vector<EdgeIndex> leaf_edges(const RadialNetwork& net);

/// Parses a single table row such as "(0,2), 0.000574, 0.000293, 4.6" or
/// "0,2,0.000574,0.000293,4.6". Throws ParseError.
Edge parse_edge_row(std::string_view row);

/// CSV with header `from,to,r_pu,x_pu,cap_pu`. Leading `# key: value` lines may
/// set s_base_va, v_base_v, v0_sq, vmin_sq and vmax_sq.
RadialNetwork parse_network_csv(std::string_view text);
/// JSON form {"base":{"s_va","v_v"},"v0_sq","vmin_sq","vmax_sq","edges":[...]}.
RadialNetwork parse_network_json(std::string_view text);
/// Dispatches on content: JSON when the first non-blank character is '{'.
RadialNetwork load_network(std::string_view text);
RadialNetwork load_network_file(const std::filesystem::path& path);

std::string network_to_csv(const RadialNetwork& net);
std::string network_to_json(const RadialNetwork& net);

/// The shipped 38-node feeder.
RadialNetwork network38();

}  // namespace maxopf
