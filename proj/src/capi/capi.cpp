#include "score/score.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <new>
#include <string>

#include "core/engine.hpp"
#include "core/error.hpp"
#include "core/geo.hpp"
#include "core/sensor.hpp"
#include "core/server.hpp"
#include "core/util.hpp"

struct score_engine {
  score::app::Engine impl;
  mutable std::mutex error_mutex;
  std::string last_error;
};

struct score_route {
  score::routing::RoutePlan plan;
};

struct score_ranking {
  std::vector<score::parking::ParkingChoice> entries;
};

struct score_server {
  std::unique_ptr<score::app::Server> impl;
};

namespace {

constexpr const char* kVersion = "1.0.0";

score_status status_for(score::ErrorKind kind) {
  using score::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument: return SCORE_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return SCORE_ERR_PARSE;
    case ErrorKind::Validation: return SCORE_ERR_VALIDATION;
    case ErrorKind::Io: return SCORE_ERR_IO;
    case ErrorKind::UnknownNode: return SCORE_ERR_UNKNOWN_NODE;
    case ErrorKind::NoPath: return SCORE_ERR_NO_PATH;
    case ErrorKind::NoLots: return SCORE_ERR_NO_LOTS;
    case ErrorKind::OutOfRange: return SCORE_ERR_OUT_OF_RANGE;
    case ErrorKind::State: return SCORE_ERR_STATE;
  }
  return SCORE_ERR_INTERNAL;
}

void set_error(score_engine* engine, const std::string& message) {
  if (!engine) return;
  std::lock_guard lock(engine->error_mutex);
  engine->last_error = message;
}

// Runs fn, translating exceptions into status codes and the engine's
// last-error slot.
template <typename Fn>
score_status guarded(score_engine* engine, Fn&& fn) {
  set_error(engine, "");
  try {
    return fn();
  } catch (const score::Error& e) {
    set_error(engine, e.what());
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    set_error(engine, "out of memory");
    return SCORE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(engine, e.what());
    return SCORE_ERR_INTERNAL;
  } catch (...) {
    set_error(engine, "unknown error");
    return SCORE_ERR_INTERNAL;
  }
}

// Same translation for engine-free functions.
template <typename Fn>
score_status guarded_plain(Fn&& fn) {
  return guarded(nullptr, std::forward<Fn>(fn));
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

score::energy::VehicleSpec to_core(const score_vehicle_spec& spec) {
  score::energy::VehicleSpec core;
  core.motor_power_w = spec.motor_power_w;
  core.panel_area_m2 = spec.panel_area_m2;
  core.panel_efficiency = spec.panel_efficiency;
  core.max_incident_wm2 = spec.max_incident_wm2;
  core.cruise_power_w = spec.cruise_power_w;
  return core;
}

void fill_report(const score::sensor::IngestReport& in, score_ingest_report* out) {
  using score::sensor::PacketErrorKind;
  out->accepted = in.accepted;
  out->superseded = in.superseded;
  out->rejected = in.rejected;
  out->rejected_malformed_header =
      in.rejected_by_kind[std::size_t(PacketErrorKind::MalformedHeader)];
  out->rejected_bad_coordinate =
      in.rejected_by_kind[std::size_t(PacketErrorKind::BadCoordinate)];
  out->rejected_out_of_range = in.rejected_by_kind[std::size_t(PacketErrorKind::OutOfRange)];
  out->rejected_missing_field =
      in.rejected_by_kind[std::size_t(PacketErrorKind::MissingField)];
}

int outcome_for(score::sensor::IngestLineResult::Status status) {
  using Status = score::sensor::IngestLineResult::Status;
  switch (status) {
    case Status::Accepted: return SCORE_INGEST_ACCEPTED;
    case Status::Superseded: return SCORE_INGEST_SUPERSEDED;
    case Status::Rejected: return SCORE_INGEST_REJECTED;
  }
  return SCORE_INGEST_REJECTED;
}

}  // namespace

extern "C" {

const char* score_version(void) { return kVersion; }

void score_string_free(char* str) { std::free(str); }

score_engine* score_engine_new(void) {
  try {
    return new score_engine();
  } catch (...) {
    return nullptr;
  }
}

void score_engine_free(score_engine* engine) { delete engine; }

const char* score_last_error(const score_engine* engine) {
  if (!engine) return "";
  std::lock_guard lock(engine->error_mutex);
  return engine->last_error.c_str();
}

#define SCORE_REQUIRE(engine, cond, message)            \
  do {                                                  \
    if (!(cond)) {                                      \
      set_error((engine), (message));                   \
      return SCORE_ERR_INVALID_ARGUMENT;                \
    }                                                   \
  } while (0)

score_status score_load_network(score_engine* engine, const char* path) {
  SCORE_REQUIRE(engine, engine && path, "null argument");
  return guarded(engine, [&] {
    engine->impl.load_network_file(path);
    return SCORE_OK;
  });
}

score_status score_load_offline(score_engine* engine, const char* path) {
  SCORE_REQUIRE(engine, engine && path, "null argument");
  return guarded(engine, [&] {
    engine->impl.load_offline_file(path);
    return SCORE_OK;
  });
}

score_status score_load_vehicle(score_engine* engine, const char* path) {
  SCORE_REQUIRE(engine, engine && path, "null argument");
  return guarded(engine, [&] {
    engine->impl.load_vehicle_file(path);
    return SCORE_OK;
  });
}

score_status score_load_lots(score_engine* engine, const char* path) {
  SCORE_REQUIRE(engine, engine && path, "null argument");
  return guarded(engine, [&] {
    engine->impl.load_lots_file(path);
    return SCORE_OK;
  });
}

score_status score_load_observations(score_engine* engine, const char* path) {
  SCORE_REQUIRE(engine, engine && path, "null argument");
  return guarded(engine, [&] {
    engine->impl.load_observations_file(path);
    return SCORE_OK;
  });
}

score_status score_load_config(score_engine* engine, const char* path) {
  SCORE_REQUIRE(engine, engine && path, "null argument");
  return guarded(engine, [&] {
    engine->impl.load_config_file(path);
    return SCORE_OK;
  });
}

score_status score_set_weight_config(score_engine* engine, double alpha, double beta,
                                     double floor_wh) {
  SCORE_REQUIRE(engine, engine, "null engine");
  return guarded(engine, [&] {
    engine->impl.set_weight_config(score::routing::WeightConfig{alpha, beta, floor_wh});
    return SCORE_OK;
  });
}

score_status score_set_parking_params(score_engine* engine, double p_irr, double p_dist,
                                      double epsilon_m) {
  SCORE_REQUIRE(engine, engine, "null engine");
  return guarded(engine, [&] {
    engine->impl.set_parking_params(p_irr, p_dist, epsilon_m);
    return SCORE_OK;
  });
}

score_status score_set_decay_denominator(score_engine* engine, double denominator) {
  SCORE_REQUIRE(engine, engine, "null engine");
  return guarded(engine, [&] {
    engine->impl.set_decay_denominator(denominator);
    return SCORE_OK;
  });
}

score_status score_set_replan_interval(score_engine* engine, double hours) {
  SCORE_REQUIRE(engine, engine, "null engine");
  return guarded(engine, [&] {
    engine->impl.set_replan_interval(hours);
    return SCORE_OK;
  });
}

score_status score_config_ports(const score_engine* engine, int* ingest_port,
                                int* query_port) {
  if (!engine) return SCORE_ERR_INVALID_ARGUMENT;
  if (ingest_port) *ingest_port = engine->impl.config().ingest_port;
  if (query_port) *query_port = engine->impl.config().query_port;
  return SCORE_OK;
}

void score_vehicle_spec_defaults(score_vehicle_spec* spec) {
  if (!spec) return;
  const score::energy::VehicleSpec core;
  spec->motor_power_w = core.motor_power_w;
  spec->panel_area_m2 = core.panel_area_m2;
  spec->panel_efficiency = core.panel_efficiency;
  spec->max_incident_wm2 = core.max_incident_wm2;
  spec->cruise_power_w = core.cruise_power_w;
}

score_status score_temporal_weight(double t_curr, double t_meas, double denominator,
                                   double* out) {
  if (!out) return SCORE_ERR_INVALID_ARGUMENT;
  return guarded_plain([&] {
    *out = score::fusion::temporal_weight(
        t_curr, t_meas,
        denominator == 0.0 ? score::fusion::kDefaultDecayDenominator : denominator);
    return SCORE_OK;
  });
}

score_status score_fuse(double r_on, double r_off, double t_curr, double t_meas,
                        double denominator, double* out) {
  if (!out) return SCORE_ERR_INVALID_ARGUMENT;
  return guarded_plain([&] {
    *out = score::fusion::fuse(
        r_on, r_off, t_curr, t_meas,
        denominator == 0.0 ? score::fusion::kDefaultDecayDenominator : denominator);
    return SCORE_OK;
  });
}

score_status score_harvest_power(const score_vehicle_spec* spec, double r,
                                 double* watts_out) {
  if (!spec || !watts_out) return SCORE_ERR_INVALID_ARGUMENT;
  return guarded_plain([&] {
    *watts_out = score::energy::harvest_power(to_core(*spec), r);
    return SCORE_OK;
  });
}

score_status score_edge_energy_compute(const score_vehicle_spec* spec, double length_m,
                                       double speed_kmh, double r, score_edge_energy* out) {
  if (!spec || !out) return SCORE_ERR_INVALID_ARGUMENT;
  return guarded_plain([&] {
    score::net::Edge edge;
    edge.from_id = 1;
    edge.to_id = 2;
    edge.length_m = length_m;
    edge.speed_kmh = speed_kmh;
    const auto e = score::energy::edge_energy(to_core(*spec), edge, r);
    out->travel_time_s = e.travel_time_s;
    out->consumed_wh = e.consumed_wh;
    out->harvested_wh = e.harvested_wh;
    out->net_wh = e.net_wh;
    return SCORE_OK;
  });
}

score_status score_edge_weight(double alpha, double beta, double floor_wh, double length_m,
                               double net_wh, double* out) {
  if (!out) return SCORE_ERR_INVALID_ARGUMENT;
  return guarded_plain([&] {
    const score::routing::WeightConfig cfg{alpha, beta, floor_wh};
    cfg.validate();
    score::net::Edge edge;
    edge.from_id = 1;
    edge.to_id = 2;
    edge.length_m = length_m;
    edge.speed_kmh = score::net::kDefaultSpeedKmh;
    score::energy::EdgeEnergy energy;
    energy.net_wh = net_wh;
    *out = score::routing::edge_weight(cfg, edge, energy);
    return SCORE_OK;
  });
}

score_status score_parking_score(double irr, double dist_m, double p_irr, double p_dist,
                                 double epsilon_m, double* out) {
  if (!out) return SCORE_ERR_INVALID_ARGUMENT;
  return guarded_plain([&] {
    *out = score::parking::parking_score(irr, dist_m, p_irr, p_dist, epsilon_m);
    return SCORE_OK;
  });
}

score_status score_great_circle_m(double lat1, double lon1, double lat2, double lon2,
                                  double* meters_out) {
  if (!meters_out) return SCORE_ERR_INVALID_ARGUMENT;
  *meters_out = score::geo::great_circle_m(lat1, lon1, lat2, lon2);
  return SCORE_OK;
}

score_status score_nearest_node(score_engine* engine, double lat, double lon,
                                uint32_t* node_id_out) {
  SCORE_REQUIRE(engine, engine && node_id_out, "null argument");
  return guarded(engine, [&] {
    *node_id_out = engine->impl.nearest(lat, lon);
    return SCORE_OK;
  });
}

score_status score_node_irradiance(score_engine* engine, uint32_t node_id, double t_hours,
                                   double* out) {
  SCORE_REQUIRE(engine, engine && out, "null argument");
  return guarded(engine, [&] {
    *out = engine->impl.node_irradiance(node_id, t_hours);
    return SCORE_OK;
  });
}

score_status score_edge_irradiance(score_engine* engine, uint32_t from_node,
                                   uint32_t to_node, double t_hours, double* out) {
  SCORE_REQUIRE(engine, engine && out, "null argument");
  return guarded(engine, [&] {
    *out = engine->impl.edge_irradiance(from_node, to_node, t_hours);
    return SCORE_OK;
  });
}

score_status score_route_compute(score_engine* engine, uint32_t src, uint32_t dst,
                                 double t_hours, score_route** route_out) {
  SCORE_REQUIRE(engine, engine && route_out, "null argument");
  *route_out = nullptr;
  return guarded(engine, [&] {
    auto route = std::make_unique<score_route>();
    route->plan = engine->impl.route(src, dst, t_hours);
    *route_out = route.release();
    return SCORE_OK;
  });
}

void score_route_free(score_route* route) { delete route; }

size_t score_route_node_count(const score_route* route) {
  return route ? route->plan.nodes.size() : 0;
}

uint32_t score_route_node_at(const score_route* route, size_t index) {
  if (!route || index >= route->plan.nodes.size()) return 0;
  return route->plan.nodes[index];
}

double score_route_total_weight(const score_route* route) {
  return route ? route->plan.total_weight : 0.0;
}

double score_route_computed_at(const score_route* route) {
  return route ? route->plan.computed_at : 0.0;
}

size_t score_route_leg_count(const score_route* route) {
  return route ? route->plan.legs.size() : 0;
}

score_status score_route_leg_at(const score_route* route, size_t index,
                                score_route_leg* leg_out) {
  if (!route || !leg_out || index >= route->plan.legs.size())
    return SCORE_ERR_INVALID_ARGUMENT;
  const score::routing::RouteLeg& leg = route->plan.legs[index];
  leg_out->from_id = leg.edge.from_id;
  leg_out->to_id = leg.edge.to_id;
  leg_out->length_m = leg.edge.length_m;
  leg_out->speed_kmh = leg.edge.speed_kmh;
  leg_out->travel_time_s = leg.energy.travel_time_s;
  leg_out->consumed_wh = leg.energy.consumed_wh;
  leg_out->harvested_wh = leg.energy.harvested_wh;
  leg_out->net_wh = leg.energy.net_wh;
  leg_out->irradiance = leg.irradiance;
  leg_out->weight = leg.weight;
  return SCORE_OK;
}

score_status score_route_format_line(const score_route* route, char** line_out) {
  if (!route || !line_out) return SCORE_ERR_INVALID_ARGUMENT;
  return guarded_plain([&] {
    *line_out = dup_string(score::app::Engine::route_answer_line(route->plan));
    return SCORE_OK;
  });
}

score_status score_route_replan(score_engine* engine, const score_route* route,
                                uint32_t current_node, double t_hours, double interval_h,
                                int* replanned_out, score_route** route_out) {
  SCORE_REQUIRE(engine, engine && route && route_out, "null argument");
  *route_out = nullptr;
  return guarded(engine, [&] {
    const double interval =
        interval_h < 0.0 ? engine->impl.config().replan_interval_h : interval_h;
    auto result = engine->impl.replan(route->plan, current_node, t_hours, interval);
    if (replanned_out) *replanned_out = result.replanned ? 1 : 0;
    auto fresh = std::make_unique<score_route>();
    fresh->plan = std::move(result.plan);
    *route_out = fresh.release();
    return SCORE_OK;
  });
}

score_status score_route_geojson(score_engine* engine, const score_route* route,
                                 char** json_out) {
  SCORE_REQUIRE(engine, engine && route && json_out, "null argument");
  return guarded(engine, [&] {
    *json_out = dup_string(engine->impl.route_geojson(route->plan));
    return SCORE_OK;
  });
}

score_status score_park_rank(score_engine* engine, double dest_lat, double dest_lon,
                             double t_hours, score_ranking** ranking_out) {
  SCORE_REQUIRE(engine, engine && ranking_out, "null argument");
  *ranking_out = nullptr;
  return guarded(engine, [&] {
    auto ranking = std::make_unique<score_ranking>();
    ranking->entries = engine->impl.park(dest_lat, dest_lon, t_hours);
    *ranking_out = ranking.release();
    return SCORE_OK;
  });
}

void score_ranking_free(score_ranking* ranking) { delete ranking; }

size_t score_ranking_count(const score_ranking* ranking) {
  return ranking ? ranking->entries.size() : 0;
}

score_status score_ranking_at(const score_ranking* ranking, size_t index,
                              score_parking_entry* entry_out) {
  if (!ranking || !entry_out || index >= ranking->entries.size())
    return SCORE_ERR_INVALID_ARGUMENT;
  const score::parking::ParkingChoice& choice = ranking->entries[index];
  entry_out->lot_id = choice.lot.id;
  entry_out->node_id = choice.lot.node_id;
  entry_out->score = choice.score;
  entry_out->irradiance = choice.irradiance_used;
  entry_out->distance_m = choice.distance_m;
  return SCORE_OK;
}

score_status score_ranking_format_line(const score_ranking* ranking, char** line_out) {
  if (!ranking || !line_out || ranking->entries.empty())
    return SCORE_ERR_INVALID_ARGUMENT;
  return guarded_plain([&] {
    *line_out = dup_string(score::app::Engine::park_answer_line(ranking->entries.front()));
    return SCORE_OK;
  });
}

score_status score_parse_sensor_line(const char* line, score_sensor_packet* packet_out,
                                     score_packet_error* error_out) {
  if (!line || !packet_out) return SCORE_ERR_INVALID_ARGUMENT;
  const auto result = score::sensor::parse_sensor_packet(line);
  if (const auto* err = std::get_if<score::sensor::PacketError>(&result)) {
    if (error_out) {
      error_out->kind = static_cast<score_packet_error_kind>(err->kind);
      error_out->offset = err->offset;
    }
    return SCORE_ERR_PARSE;
  }
  const auto& packet = std::get<score::sensor::SensorPacket>(result);
  std::snprintf(packet_out->callsign, sizeof packet_out->callsign, "%s",
                packet.callsign.c_str());
  packet_out->lat = packet.lat;
  packet_out->lon = packet.lon;
  packet_out->irr = packet.irr;
  packet_out->t_meas = packet.t_meas;
  return SCORE_OK;
}

score_status score_format_sensor_line(const score_sensor_packet* packet, char** line_out) {
  if (!packet || !line_out) return SCORE_ERR_INVALID_ARGUMENT;
  return guarded_plain([&] {
    score::sensor::SensorPacket core;
    core.callsign = packet->callsign;
    core.lat = packet->lat;
    core.lon = packet->lon;
    core.irr = packet->irr;
    core.t_meas = packet->t_meas;
    *line_out = dup_string(score::sensor::format_sensor_packet(core));
    return SCORE_OK;
  });
}

score_status score_ingest_line(score_engine* engine, const char* line, int* outcome_out) {
  SCORE_REQUIRE(engine, engine && line, "null argument");
  return guarded(engine, [&] {
    const auto result = engine->impl.ingest_line(line);
    if (outcome_out) *outcome_out = outcome_for(result.status);
    return SCORE_OK;
  });
}

score_status score_ingest_observation(score_engine* engine, uint32_t node_id, double r_on,
                                      double t_meas, const char* source, int* outcome_out) {
  SCORE_REQUIRE(engine, engine, "null engine");
  return guarded(engine, [&] {
    score::fusion::IrradianceObservation obs;
    obs.node_id = node_id;
    obs.r_on = r_on;
    obs.t_meas = t_meas;
    obs.source = source ? source : "";
    const auto outcome = engine->impl.ingest_observation(obs);
    if (outcome_out)
      *outcome_out = outcome == score::fusion::IngestOutcome::Accepted
                         ? SCORE_INGEST_ACCEPTED
                         : SCORE_INGEST_SUPERSEDED;
    return SCORE_OK;
  });
}

score_status score_ingest_file(score_engine* engine, const char* path,
                               score_ingest_report* report_out) {
  SCORE_REQUIRE(engine, engine && path, "null argument");
  return guarded(engine, [&] {
    std::ifstream in(path);
    if (!in) throw score::Error(score::ErrorKind::Io,
                                "cannot open ingest file: " + std::string(path));
    score::sensor::IngestReport report;
    std::string line;
    while (std::getline(in, line)) {
      if (score::util::trim(line).empty()) continue;
      const auto result = engine->impl.ingest_line(line);
      switch (result.status) {
        case score::sensor::IngestLineResult::Status::Accepted: ++report.accepted; break;
        case score::sensor::IngestLineResult::Status::Superseded:
          ++report.superseded;
          break;
        case score::sensor::IngestLineResult::Status::Rejected:
          ++report.rejected;
          ++report.rejected_by_kind[std::size_t(result.error->kind)];
          break;
      }
    }
    if (report_out) fill_report(report, report_out);
    return SCORE_OK;
  });
}

score_status score_ingest_totals(score_engine* engine, score_ingest_report* report_out) {
  SCORE_REQUIRE(engine, engine && report_out, "null argument");
  fill_report(engine->impl.ingest_totals(), report_out);
  return SCORE_OK;
}

score_status score_dump_observations(score_engine* engine, const char* path) {
  SCORE_REQUIRE(engine, engine && path, "null argument");
  return guarded(engine, [&] {
    engine->impl.dump_observations(path);
    return SCORE_OK;
  });
}

score_status score_calibrate(score_engine* engine, double r_predicted, double r_measured,
                             int* applied_out, double* factor_out) {
  SCORE_REQUIRE(engine, engine, "null engine");
  return guarded(engine, [&] {
    const auto result = engine->impl.calibrate(r_predicted, r_measured);
    if (applied_out) *applied_out = result.applied ? 1 : 0;
    if (factor_out) *factor_out = result.factor;
    return SCORE_OK;
  });
}

score_status score_answer_query(score_engine* engine, const char* line, char** answer_out) {
  SCORE_REQUIRE(engine, engine && line && answer_out, "null argument");
  *answer_out = nullptr;
  return guarded(engine, [&] {
    const auto answer = engine->impl.answer_query(line);
    if (answer) *answer_out = dup_string(*answer);
    return SCORE_OK;
  });
}

score_status score_answer_ingest(score_engine* engine, const char* line, char** answer_out) {
  SCORE_REQUIRE(engine, engine && line && answer_out, "null argument");
  *answer_out = nullptr;
  return guarded(engine, [&] {
    const auto answer = engine->impl.answer_ingest(line);
    if (answer) *answer_out = dup_string(*answer);
    return SCORE_OK;
  });
}

score_status score_server_start(score_engine* engine, int ingest_port, int query_port,
                                score_server** server_out) {
  SCORE_REQUIRE(engine, engine && server_out, "null argument");
  *server_out = nullptr;
  return guarded(engine, [&] {
    auto server = std::make_unique<score_server>();
    server->impl = std::make_unique<score::app::Server>(
        engine->impl, score::app::Server::Options{ingest_port, query_port});
    *server_out = server.release();
    return SCORE_OK;
  });
}

score_status score_server_ports(const score_server* server, int* ingest_port,
                                int* query_port) {
  if (!server || !server->impl) return SCORE_ERR_INVALID_ARGUMENT;
  if (ingest_port) *ingest_port = server->impl->ingest_port();
  if (query_port) *query_port = server->impl->query_port();
  return SCORE_OK;
}

score_status score_server_stop(score_server* server) {
  if (!server || !server->impl) return SCORE_ERR_INVALID_ARGUMENT;
  server->impl->stop();
  return SCORE_OK;
}

void score_server_free(score_server* server) { delete server; }

} /* extern "C" */
