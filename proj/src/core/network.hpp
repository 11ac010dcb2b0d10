#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace score::net {

using NodeId = std::uint32_t;

inline constexpr double kDefaultSpeedKmh = 50.0;

struct Node {
  NodeId id = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::string label;
};

struct Edge {
  NodeId from_id = 0;
  NodeId to_id = 0;
  double length_m = 0.0;
  double speed_kmh = kDefaultSpeedKmh;
};

struct ParkingLot {
  std::uint32_t id = 0;
  NodeId node_id = 0;  // network node whose fused irradiance the lot uses
  double lat = 0.0;
  double lon = 0.0;
  std::optional<double> irradiance;  // static override; fusion store queried when absent
};

// Directed road graph. Immutable once built; adjacency lists are sorted by
// destination id so traversal order is deterministic.
class RoadNetwork {
 public:
  RoadNetwork() = default;

  // Validates and indexes; throws Error(Validation) naming the offending
  // node, edge or lot.
  static RoadNetwork build(std::vector<Node> nodes, std::vector<Edge> edges,
                           std::vector<ParkingLot> lots);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<ParkingLot>& lots() const { return lots_; }

  bool empty() const { return nodes_.empty(); }
  bool has_node(NodeId id) const { return index_.count(id) != 0; }
  const Node& node(NodeId id) const;
  std::size_t node_index(NodeId id) const;  // throws Error(UnknownNode)

  // Indices into edges() for edges leaving the node at node_index.
  const std::vector<std::size_t>& outgoing(std::size_t node_idx) const {
    return adjacency_[node_idx];
  }
  const Edge* find_edge(NodeId from, NodeId to) const;

 private:
  std::vector<Node> nodes_;  // sorted by id
  std::vector<Edge> edges_;  // sorted by (from_id, to_id)
  std::vector<ParkingLot> lots_;  // sorted by id
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

struct ParseContext {
  std::string origin;  // file name or stream label for messages
  std::size_t line_no = 0;

  std::string where() const;
};

// Record parsers shared by the network loader and the config loader.
Node parse_node_record(const std::vector<std::string_view>& fields, const ParseContext& ctx);
Edge parse_edge_record(const std::vector<std::string_view>& fields, const ParseContext& ctx);
ParkingLot parse_lot_record(const std::vector<std::string_view>& fields, const ParseContext& ctx);

// Line-oriented network file: N/E/P records plus '#' comments.
RoadNetwork load_network(const std::filesystem::path& path);
RoadNetwork parse_network(std::istream& in, const std::string& origin);
void write_network(const RoadNetwork& network, std::ostream& out);

// Lots-only file: P records.
std::vector<ParkingLot> load_lots(const std::filesystem::path& path);

// Id of the node with minimum great-circle distance to (lat, lon);
// ties resolved toward the smallest id.
NodeId nearest_node(const RoadNetwork& network, double lat, double lon);

}  // namespace score::net
