#include "core/network.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "core/error.hpp"
#include "core/geo.hpp"
#include "core/util.hpp"

namespace score::net {

namespace {

[[noreturn]] void parse_fail(const ParseContext& ctx, const std::string& what) {
  throw Error(ErrorKind::Parse, ctx.where() + ": " + what);
}

double require_double(std::string_view token, const ParseContext& ctx, const char* what) {
  auto v = util::parse_double(token);
  if (!v) parse_fail(ctx, std::string("bad ") + what + " '" + std::string(token) + "'");
  return *v;
}

NodeId require_id(std::string_view token, const ParseContext& ctx, const char* what) {
  auto v = util::parse_u32(token);
  if (!v || *v == 0)
    parse_fail(ctx, std::string(what) + " must be a positive integer, got '" + std::string(token) + "'");
  return *v;
}

}  // namespace

std::string ParseContext::where() const {
  return origin + ":" + std::to_string(line_no);
}

Node parse_node_record(const std::vector<std::string_view>& fields, const ParseContext& ctx) {
  if (fields.size() < 4) parse_fail(ctx, "node record needs 'N <id> <lat> <lon> [label]'");
  Node node;
  node.id = require_id(fields[1], ctx, "node id");
  node.lat = require_double(fields[2], ctx, "latitude");
  node.lon = require_double(fields[3], ctx, "longitude");
  for (std::size_t i = 4; i < fields.size(); ++i) {
    if (!node.label.empty()) node.label += ' ';
    node.label += std::string(fields[i]);
  }
  return node;
}

Edge parse_edge_record(const std::vector<std::string_view>& fields, const ParseContext& ctx) {
  if (fields.size() < 4 || fields.size() > 5)
    parse_fail(ctx, "edge record needs 'E <from> <to> <length_m> [speed_kmh]'");
  Edge edge;
  edge.from_id = require_id(fields[1], ctx, "edge endpoint");
  edge.to_id = require_id(fields[2], ctx, "edge endpoint");
  edge.length_m = require_double(fields[3], ctx, "length");
  edge.speed_kmh = fields.size() == 5 ? require_double(fields[4], ctx, "speed") : kDefaultSpeedKmh;
  return edge;
}

ParkingLot parse_lot_record(const std::vector<std::string_view>& fields, const ParseContext& ctx) {
  if (fields.size() < 5 || fields.size() > 6)
    parse_fail(ctx, "parking record needs 'P <id> <node_id> <lat> <lon> [irradiance]'");
  ParkingLot lot;
  lot.id = require_id(fields[1], ctx, "lot id");
  lot.node_id = require_id(fields[2], ctx, "lot node id");
  lot.lat = require_double(fields[3], ctx, "latitude");
  lot.lon = require_double(fields[4], ctx, "longitude");
  if (fields.size() == 6) lot.irradiance = require_double(fields[5], ctx, "irradiance");
  return lot;
}

RoadNetwork RoadNetwork::build(std::vector<Node> nodes, std::vector<Edge> edges,
                               std::vector<ParkingLot> lots) {
  if (nodes.empty()) throw Error(ErrorKind::Validation, "empty network");

  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  RoadNetwork net;
  net.index_.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (!net.index_.emplace(n.id, i).second)
      throw Error(ErrorKind::Validation, "duplicate node id " + std::to_string(n.id));
    if (n.lat < -90.0 || n.lat > 90.0)
      throw Error(ErrorKind::Validation, "node " + std::to_string(n.id) + ": latitude out of range");
    if (n.lon < -180.0 || n.lon > 180.0)
      throw Error(ErrorKind::Validation, "node " + std::to_string(n.id) + ": longitude out of range");
  }
  net.nodes_ = std::move(nodes);

  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.from_id != b.from_id ? a.from_id < b.from_id : a.to_id < b.to_id;
  });
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size());
  for (const Edge& e : edges) {
    const std::string name = "edge " + std::to_string(e.from_id) + "->" + std::to_string(e.to_id);
    if (e.from_id == e.to_id) throw Error(ErrorKind::Validation, name + ": self loop");
    if (!net.index_.count(e.from_id))
      throw Error(ErrorKind::Validation, name + ": dangling endpoint " + std::to_string(e.from_id));
    if (!net.index_.count(e.to_id))
      throw Error(ErrorKind::Validation, name + ": dangling endpoint " + std::to_string(e.to_id));
    if (!(e.length_m > 0.0)) throw Error(ErrorKind::Validation, name + ": non-positive length");
    if (!(e.speed_kmh > 0.0)) throw Error(ErrorKind::Validation, name + ": non-positive speed");
    const std::uint64_t key = (std::uint64_t(e.from_id) << 32) | e.to_id;
    if (!seen.insert(key).second) throw Error(ErrorKind::Validation, "duplicate " + name);
  }
  net.edges_ = std::move(edges);

  net.adjacency_.assign(net.nodes_.size(), {});
  for (std::size_t i = 0; i < net.edges_.size(); ++i)
    net.adjacency_[net.index_.at(net.edges_[i].from_id)].push_back(i);
  // edges_ is sorted by (from, to), so each adjacency list is already to-ordered

  std::sort(lots.begin(), lots.end(),
            [](const ParkingLot& a, const ParkingLot& b) { return a.id < b.id; });
  std::unordered_set<std::uint32_t> lot_ids;
  for (const ParkingLot& lot : lots) {
    const std::string name = "parking lot " + std::to_string(lot.id);
    if (!lot_ids.insert(lot.id).second)
      throw Error(ErrorKind::Validation, "duplicate parking lot id " + std::to_string(lot.id));
    if (!net.index_.count(lot.node_id))
      throw Error(ErrorKind::Validation, name + ": unknown node " + std::to_string(lot.node_id));
    if (lot.irradiance && (*lot.irradiance < 0.0 || *lot.irradiance > 1.0))
      throw Error(ErrorKind::Validation, name + ": irradiance out of range");
  }
  net.lots_ = std::move(lots);
  return net;
}

const Node& RoadNetwork::node(NodeId id) const { return nodes_[node_index(id)]; }

std::size_t RoadNetwork::node_index(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw Error(ErrorKind::UnknownNode, "unknown node " + std::to_string(id));
  return it->second;
}

const Edge* RoadNetwork::find_edge(NodeId from, NodeId to) const {
  auto it = index_.find(from);
  if (it == index_.end()) return nullptr;
  for (std::size_t ei : adjacency_[it->second])
    if (edges_[ei].to_id == to) return &edges_[ei];
  return nullptr;
}

RoadNetwork parse_network(std::istream& in, const std::string& origin) {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<ParkingLot> lots;
  std::string line;
  ParseContext ctx{origin, 0};
  while (std::getline(in, line)) {
    ++ctx.line_no;
    std::string_view text = util::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = util::split_ws(text);
    if (fields[0] == "N") {
      nodes.push_back(parse_node_record(fields, ctx));
    } else if (fields[0] == "E") {
      edges.push_back(parse_edge_record(fields, ctx));
    } else if (fields[0] == "P") {
      lots.push_back(parse_lot_record(fields, ctx));
    } else {
      parse_fail(ctx, "unknown record type '" + std::string(fields[0]) + "'");
    }
  }
  return RoadNetwork::build(std::move(nodes), std::move(edges), std::move(lots));
}

RoadNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open network file: " + path.string());
  return parse_network(in, path.filename().string());
}

void write_network(const RoadNetwork& network, std::ostream& out) {
  for (const Node& n : network.nodes()) {
    out << "N " << n.id << ' ' << util::format_decimal(n.lat) << ' '
        << util::format_decimal(n.lon);
    if (!n.label.empty()) out << ' ' << n.label;
    out << '\n';
  }
  for (const Edge& e : network.edges()) {
    out << "E " << e.from_id << ' ' << e.to_id << ' ' << util::format_decimal(e.length_m)
        << ' ' << util::format_decimal(e.speed_kmh) << '\n';
  }
  for (const ParkingLot& lot : network.lots()) {
    out << "P " << lot.id << ' ' << lot.node_id << ' ' << util::format_decimal(lot.lat)
        << ' ' << util::format_decimal(lot.lon);
    if (lot.irradiance) out << ' ' << util::format_decimal(*lot.irradiance);
    out << '\n';
  }
}

std::vector<ParkingLot> load_lots(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open lots file: " + path.string());
  std::vector<ParkingLot> lots;
  std::string line;
  ParseContext ctx{path.filename().string(), 0};
  while (std::getline(in, line)) {
    ++ctx.line_no;
    std::string_view text = util::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = util::split_ws(text);
    if (fields[0] != "P") parse_fail(ctx, "expected 'P' record in lots file");
    lots.push_back(parse_lot_record(fields, ctx));
  }
  return lots;
}

NodeId nearest_node(const RoadNetwork& network, double lat, double lon) {
  if (network.empty())
    throw Error(ErrorKind::State, "nearest_node queried on an empty network");
  const Node* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const Node& n : network.nodes()) {  // ascending id: first win keeps smallest id on ties
    const double d = geo::great_circle_m(lat, lon, n.lat, n.lon);
    if (d < best_dist) {
      best = &n;
      best_dist = d;
    }
  }
  return best->id;
}

}  // namespace score::net
