#pragma once

#include <string>

#include "core/fusion.hpp"
#include "core/network.hpp"
#include "core/routing.hpp"

namespace score::geojson {

// "#rrggbb" sweeping green (r = 0) to red (r = 1).
std::string irradiance_color(double r);

// FeatureCollection for a route: one LineString feature per leg with its
// fused irradiance and energy, plus one Point feature per route node.
// Node irradiance is evaluated at the plan's computation time.
std::string route_geojson(const net::RoadNetwork& network, const routing::RoutePlan& plan,
                          const fusion::FusionView& view);

}  // namespace score::geojson
