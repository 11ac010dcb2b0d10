#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/energy.hpp"
#include "core/error.hpp"
#include "core/fusion.hpp"
#include "core/network.hpp"
#include "core/parking.hpp"
#include "core/routing.hpp"
#include "core/sensor.hpp"

namespace score::app {

struct AppConfig {
  routing::WeightConfig weights;
  double p_irr = 1.0;
  double p_dist = 1.0;
  double epsilon_m = 1.0;
  double replan_interval_h = 0.25;
  double decay_denominator = fusion::kDefaultDecayDenominator;
  int ingest_port = -1;  // -1 = not configured
  int query_port = -1;
};

// Wire token for an error kind in 'ERR <kind>' replies.
std::string_view error_token(ErrorKind kind);

// Facade over the whole pipeline: owns the network, fusion store, vehicle
// spec, parking lots and tunables, and speaks the line protocol used by the
// service and the replay tests. Loading and tuning are setup-time,
// single-threaded; ingest and queries may then run concurrently under the
// fusion store's reader/writer contract.
class Engine {
 public:
  Engine() = default;
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // --- setup -------------------------------------------------------------
  void load_network_file(const std::filesystem::path& path);
  void load_offline_file(const std::filesystem::path& path);
  void load_vehicle_file(const std::filesystem::path& path);
  void load_lots_file(const std::filesystem::path& path);
  void load_observations_file(const std::filesystem::path& path);

  // key=value lines plus inline N/E/P/O/V/B records; referenced paths are
  // resolved relative to the config file.
  void load_config_file(const std::filesystem::path& path);

  void set_weight_config(const routing::WeightConfig& weights);
  void set_parking_params(double p_irr, double p_dist, double epsilon_m);
  void set_decay_denominator(double denominator);
  void set_replan_interval(double hours);

  const AppConfig& config() const { return config_; }
  bool has_network() const { return network_.has_value(); }
  const net::RoadNetwork& network() const;
  const energy::VehicleSpec& vehicle() const { return vehicle_; }
  const std::vector<net::ParkingLot>& lots() const { return lots_; }
  fusion::FusionStore& store() { return store_; }
  const fusion::FusionStore& store() const { return store_; }

  // Network loaded, offline table non-empty and covering every node.
  void require_route_ready() const;

  // --- queries -----------------------------------------------------------
  net::NodeId nearest(double lat, double lon) const;
  double node_irradiance(net::NodeId node_id, double t_curr) const;
  double edge_irradiance(net::NodeId from, net::NodeId to, double t_curr) const;
  routing::RoutePlan route(net::NodeId src, net::NodeId dst, double t_curr) const;
  routing::ReplanResult replan(const routing::RoutePlan& plan, net::NodeId current_node,
                               double t_curr, double interval_h) const;
  std::vector<parking::ParkingChoice> park(double dest_lat, double dest_lon,
                                           double t_curr) const;
  std::string route_geojson(const routing::RoutePlan& plan) const;

  // --- ingest ------------------------------------------------------------
  sensor::IngestLineResult ingest_line(std::string_view line);
  fusion::IngestOutcome ingest_observation(const fusion::IrradianceObservation& obs);
  fusion::CalibrationResult calibrate(double r_predicted, double r_measured);
  sensor::IngestReport ingest_totals() const;
  void dump_observations(const std::filesystem::path& path) const;

  // --- line protocol -----------------------------------------------------
  // 'ROUTE <src> <dst> <t>' -> node ids then total weight;
  // 'PARK <lat> <lon> <t>'  -> winning lot id then score;
  // failures -> 'ERR <kind>'. Blank lines get no answer.
  std::optional<std::string> answer_query(std::string_view line) const;
  // Sensor line -> 'OK accepted' | 'OK superseded' | 'ERR <kind>'.
  std::optional<std::string> answer_ingest(std::string_view line);

  static std::string route_answer_line(const routing::RoutePlan& plan);
  static std::string park_answer_line(const parking::ParkingChoice& choice);

 private:
  void add_lots(std::vector<net::ParkingLot> lots);
  void apply_config_value(const std::string& key, const std::string& value,
                          const std::filesystem::path& base_dir, const std::string& where);

  std::optional<net::RoadNetwork> network_;
  fusion::FusionStore store_;
  energy::VehicleSpec vehicle_;
  std::vector<net::ParkingLot> lots_;
  AppConfig config_;

  mutable std::mutex totals_mutex_;
  sensor::IngestReport totals_;
};

}  // namespace score::app
