#include "core/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <utility>

#include "core/error.hpp"

namespace score::routing {

void WeightConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw Error(ErrorKind::Validation, "weight coefficients must be non-negative");
  if (!(alpha + beta > 0.0))
    throw Error(ErrorKind::Validation, "alpha + beta must be positive");
  if (!(floor_wh > 0.0))
    throw Error(ErrorKind::Validation, "weight floor must be positive");
}

double edge_weight(const WeightConfig& cfg, const net::Edge& edge,
                   const energy::EdgeEnergy& energy) {
  return std::max(cfg.floor_wh, cfg.alpha * edge.length_m + cfg.beta * energy.net_wh);
}

RoutePlan shortest_route(const net::RoadNetwork& network, const fusion::FusionView& view,
                         const energy::VehicleSpec& spec, const WeightConfig& cfg,
                         net::NodeId src, net::NodeId dst, double t_curr) {
  cfg.validate();
  spec.validate();
  const std::size_t s = network.node_index(src);
  const std::size_t d = network.node_index(dst);

  RoutePlan plan;
  plan.computed_at = t_curr;
  if (s == d) {
    plan.nodes = {src};
    return plan;
  }

  // Freeze irradiance, energy and weight per edge for the whole search.
  const auto& edges = network.edges();
  std::vector<double> irr(edges.size());
  std::vector<energy::EdgeEnergy> en(edges.size());
  std::vector<double> weight(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    irr[i] = view.edge_irradiance(edges[i], t_curr);
    en[i] = energy::edge_energy(spec, edges[i], irr[i]);
    weight[i] = edge_weight(cfg, edges[i], en[i]);
  }

  const std::size_t n = network.nodes().size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
  dist[s] = 0.0;
  frontier.emplace(0.0, s);
  while (!frontier.empty()) {
    const auto [du, u] = frontier.top();
    frontier.pop();
    if (du > dist[u]) continue;
    for (std::size_t ei : network.outgoing(u)) {
      const std::size_t v = network.node_index(edges[ei].to_id);
      const double dv = du + weight[ei];
      if (dv < dist[v]) {
        dist[v] = dv;
        frontier.emplace(dv, v);
      }
    }
  }
  if (!(dist[d] < inf))
    throw Error(ErrorKind::NoPath, "no path from node " + std::to_string(src) +
                                       " to node " + std::to_string(dst));

  // Tight edges (dist[u] + w == dist[v]) span exactly the minimum-weight
  // paths; positive weights make this subgraph acyclic.
  std::vector<std::vector<std::size_t>> tight(n);  // node -> out edge indices, to-id order
  std::vector<std::vector<std::size_t>> tight_rev(n);
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const std::size_t u = network.node_index(edges[ei].from_id);
    const std::size_t v = network.node_index(edges[ei].to_id);
    if (dist[u] < inf && dist[u] + weight[ei] == dist[v]) {
      tight[u].push_back(ei);
      tight_rev[v].push_back(u);
    }
  }
  std::vector<char> reaches_dst(n, 0);
  std::vector<std::size_t> stack{d};
  reaches_dst[d] = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : tight_rev[v]) {
      if (!reaches_dst[u]) {
        reaches_dst[u] = 1;
        stack.push_back(u);
      }
    }
  }

  // Walk the tight subgraph greedily: the smallest next node id that can
  // still reach dst gives the lexicographically smallest optimal sequence.
  plan.nodes.push_back(src);
  std::size_t u = s;
  while (u != d) {
    std::size_t chosen = edges.size();
    for (std::size_t ei : tight[u]) {  // ascending to_id
      if (reaches_dst[network.node_index(edges[ei].to_id)]) {
        chosen = ei;
        break;
      }
    }
    if (chosen == edges.size())
      throw Error(ErrorKind::NoPath, "route reconstruction failed");  // unreachable
    plan.legs.push_back(RouteLeg{edges[chosen], en[chosen], irr[chosen], weight[chosen]});
    plan.nodes.push_back(edges[chosen].to_id);
    u = network.node_index(edges[chosen].to_id);
  }
  double total = 0.0;
  for (const RouteLeg& leg : plan.legs) total += leg.weight;
  plan.total_weight = total;
  return plan;
}

ReplanResult replan(const RoutePlan& plan, const net::RoadNetwork& network,
                    const fusion::FusionView& view, const energy::VehicleSpec& spec,
                    const WeightConfig& cfg, net::NodeId current_node, double t_curr,
                    double interval_h) {
  if (plan.nodes.empty())
    throw Error(ErrorKind::InvalidArgument, "cannot replan an empty plan");
  if (!(interval_h >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "replan interval must be non-negative");
  if (std::find(plan.nodes.begin(), plan.nodes.end(), current_node) == plan.nodes.end())
    throw Error(ErrorKind::Validation,
                "current node " + std::to_string(current_node) + " is not on the plan");
  if (t_curr - plan.computed_at < interval_h) return ReplanResult{false, plan};
  return ReplanResult{
      true, shortest_route(network, view, spec, cfg, current_node, plan.destination(), t_curr)};
}

}  // namespace score::routing
