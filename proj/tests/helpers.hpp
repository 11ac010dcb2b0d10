// Shared test utilities: temp files, random network generation, and the
// independent oracles (extended-precision fusion math, exhaustive path and
// parking search) the unit and acceptance suites check against.
#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "core/energy.hpp"
#include "core/fusion.hpp"
#include "core/network.hpp"
#include "core/routing.hpp"

namespace testutil {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    dir_ = std::filesystem::temp_directory_path() /
           ("score-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = dir_ / name;
    std::ofstream out(p);
    out << content;
    return p;
  }

 private:
  std::filesystem::path dir_;
};

// ---- extended-precision fusion oracle --------------------------------------
// exp via argument reduction and a Taylor series in long double; independent
// of libm's exp and of the implementation under test.

inline long double oracle_exp(long double x) {
  const long double ln2 = 0.693147180559945309417232121458176568L;
  const long double k = floorl(x / ln2 + 0.5L);
  const long double r = x - k * ln2;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int i = 1; i <= 48; ++i) {
    term *= r / i;
    sum += term;
    if (fabsl(term) < 1e-26L * fabsl(sum)) break;
  }
  return ldexpl(sum, static_cast<int>(k));
}

inline long double oracle_temporal_weight(long double t_curr, long double t_meas,
                                          long double denominator) {
  const long double dt = t_curr - t_meas;
  return oracle_exp(-(dt * dt) / denominator);
}

inline long double oracle_fuse(long double r_on, long double r_off, long double t_curr,
                               long double t_meas, long double denominator) {
  const long double a = oracle_temporal_weight(t_curr, t_meas, denominator);
  return r_on * a + r_off * (1.0L - a);
}

// ---- exhaustive route oracle ------------------------------------------------

using WeightAdjacency =
    std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, double>>>;

struct OraclePath {
  bool found = false;
  std::vector<std::uint32_t> nodes;
  double weight = 0.0;
};

inline void enumerate_paths(const WeightAdjacency& adj, std::uint32_t u, std::uint32_t dst,
                            std::vector<std::uint32_t>& path, std::set<std::uint32_t>& seen,
                            double weight, OraclePath& best) {
  if (u == dst) {
    const bool better =
        !best.found || weight < best.weight ||
        (weight == best.weight &&
         std::lexicographical_compare(path.begin(), path.end(), best.nodes.begin(),
                                      best.nodes.end()));
    if (better) best = OraclePath{true, path, weight};
    return;
  }
  const auto it = adj.find(u);
  if (it == adj.end()) return;
  for (const auto& [v, w] : it->second) {
    if (seen.count(v)) continue;
    seen.insert(v);
    path.push_back(v);
    enumerate_paths(adj, v, dst, path, seen, weight + w, best);
    path.pop_back();
    seen.erase(v);
  }
}

inline OraclePath brute_force_route(const WeightAdjacency& adj, std::uint32_t src,
                                    std::uint32_t dst) {
  if (src == dst) return OraclePath{true, {src}, 0.0};
  OraclePath best;
  std::vector<std::uint32_t> path{src};
  std::set<std::uint32_t> seen{src};
  enumerate_paths(adj, src, dst, path, seen, 0.0, best);
  return best;
}

// The same frozen per-edge weights shortest_route evaluates, as a plain
// adjacency map for the enumerator.
inline WeightAdjacency weight_adjacency(const score::net::RoadNetwork& network,
                                        const score::fusion::FusionView& view,
                                        const score::energy::VehicleSpec& spec,
                                        const score::routing::WeightConfig& cfg,
                                        double t_curr) {
  WeightAdjacency adj;
  for (const score::net::Edge& edge : network.edges()) {
    const double r = view.edge_irradiance(edge, t_curr);
    const auto energy = score::energy::edge_energy(spec, edge, r);
    adj[edge.from_id].emplace_back(edge.to_id, score::routing::edge_weight(cfg, edge, energy));
  }
  return adj;
}

// ---- random inputs ----------------------------------------------------------

inline score::net::RoadNetwork random_network(std::mt19937& rng, int max_nodes,
                                              bool integer_lengths) {
  std::uniform_int_distribution<int> node_count(2, max_nodes);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  std::bernoulli_distribution has_edge(0.45);
  std::uniform_real_distribution<double> real_len(100.0, 5000.0);
  std::uniform_int_distribution<int> int_len(1, 4);

  const int n = node_count(rng);
  std::vector<score::net::Node> nodes;
  for (int i = 1; i <= n; ++i)
    nodes.push_back({std::uint32_t(i), 43.85 + jitter(rng), 18.40 + jitter(rng), ""});
  std::vector<score::net::Edge> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j || !has_edge(rng)) continue;
      const double length = integer_lengths ? double(int_len(rng)) : real_len(rng);
      edges.push_back({std::uint32_t(i), std::uint32_t(j), length, 50.0});
    }
  return score::net::RoadNetwork::build(std::move(nodes), std::move(edges), {});
}

inline score::fusion::OfflineTable flat_offline(const score::net::RoadNetwork& network,
                                                double r) {
  score::fusion::OfflineTable table;
  for (const score::net::Node& node : network.nodes()) table.add(node.id, 0.0, r);
  return table;
}

inline score::fusion::OfflineTable random_offline(std::mt19937& rng,
                                                  const score::net::RoadNetwork& network) {
  std::uniform_real_distribution<double> r(0.0, 1.0);
  score::fusion::OfflineTable table;
  for (const score::net::Node& node : network.nodes()) table.add(node.id, 0.0, r(rng));
  return table;
}

}  // namespace testutil
