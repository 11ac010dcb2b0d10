#pragma once

#include <vector>

#include "core/energy.hpp"
#include "core/fusion.hpp"
#include "core/network.hpp"

namespace score::routing {

struct WeightConfig {
  double alpha = 0.0;      // weight per meter
  double beta = 1.0;       // weight per watt-hour of net energy
  double floor_wh = 0.001; // minimum per-edge weight

  void validate() const;  // throws Error(Validation)
};

// max(floor_wh, alpha * length + beta * net_wh); the floor keeps weights
// strictly positive even when harvest exceeds consumption.
double edge_weight(const WeightConfig& cfg, const net::Edge& edge,
                   const energy::EdgeEnergy& energy);

struct RouteLeg {
  net::Edge edge;
  energy::EdgeEnergy energy;
  double irradiance = 0.0;  // fused edge irradiance the weight was built from
  double weight = 0.0;
};

struct RoutePlan {
  std::vector<net::NodeId> nodes;
  std::vector<RouteLeg> legs;  // legs[i] connects nodes[i] -> nodes[i+1]
  double total_weight = 0.0;
  double computed_at = 0.0;  // hours since the start of the year

  net::NodeId destination() const { return nodes.back(); }
};

// Minimum-total-weight path under edge_weight, with per-edge irradiance,
// energy and weight frozen at t_curr for the whole search. Among
// equal-weight paths returns the lexicographically smallest node sequence.
// src == dst yields the single-node plan with weight 0.
RoutePlan shortest_route(const net::RoadNetwork& network, const fusion::FusionView& view,
                         const energy::VehicleSpec& spec, const WeightConfig& cfg,
                         net::NodeId src, net::NodeId dst, double t_curr);

struct ReplanResult {
  bool replanned = false;
  RoutePlan plan;
};

// Recomputes current_node -> plan destination once interval_h hours have
// elapsed since the plan was computed; otherwise returns the plan unchanged.
ReplanResult replan(const RoutePlan& plan, const net::RoadNetwork& network,
                    const fusion::FusionView& view, const energy::VehicleSpec& spec,
                    const WeightConfig& cfg, net::NodeId current_node, double t_curr,
                    double interval_h);

}  // namespace score::routing
