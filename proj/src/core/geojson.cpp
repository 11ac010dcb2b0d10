#include "core/geojson.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace score::geojson {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json position(const net::Node& node) {
  return ordered_json::array({node.lon, node.lat});
}

}  // namespace

std::string irradiance_color(double r) {
  r = std::clamp(r, 0.0, 1.0);
  const int red = static_cast<int>(std::lround(255.0 * r));
  const int green = static_cast<int>(std::lround(255.0 * (1.0 - r)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x00", red, green);
  return buf;
}

std::string route_geojson(const net::RoadNetwork& network, const routing::RoutePlan& plan,
                          const fusion::FusionView& view) {
  ordered_json features = ordered_json::array();
  for (const routing::RouteLeg& leg : plan.legs) {
    const net::Node& from = network.node(leg.edge.from_id);
    const net::Node& to = network.node(leg.edge.to_id);
    features.push_back(ordered_json{
        {"type", "Feature"},
        {"geometry",
         {{"type", "LineString"},
          {"coordinates", ordered_json::array({position(from), position(to)})}}},
        {"properties",
         {{"from", leg.edge.from_id},
          {"to", leg.edge.to_id},
          {"length_m", leg.edge.length_m},
          {"irradiance", leg.irradiance},
          {"net_wh", leg.energy.net_wh},
          {"weight", leg.weight},
          {"stroke", irradiance_color(leg.irradiance)}}},
    });
  }
  for (net::NodeId id : plan.nodes) {
    const net::Node& node = network.node(id);
    const double irr = view.node_irradiance(id, plan.computed_at);
    features.push_back(ordered_json{
        {"type", "Feature"},
        {"geometry", {{"type", "Point"}, {"coordinates", position(node)}}},
        {"properties",
         {{"id", id}, {"irradiance", irr}, {"marker-color", irradiance_color(irr)}}},
    });
  }
  ordered_json collection{{"type", "FeatureCollection"}, {"features", features}};
  return collection.dump(2) + "\n";
}

}  // namespace score::geojson
