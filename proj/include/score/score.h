/* score.h - C API for the solar-aware routing engine.
 *
 * The library fuses time-stamped irradiance observations with offline
 * irradiance tables, computes energy-aware shortest routes over a road
 * graph, and ranks parking lots by their irradiation/distance ratio.
 *
 * All functions returning score_status report SCORE_OK on success; engine
 * functions leave a human-readable message retrievable with
 * score_last_error(). Strings returned through char** are heap-allocated
 * and must be released with score_string_free(). Handles are opaque and
 * freed with their matching *_free function.
 */
#ifndef SCORE_SCORE_H
#define SCORE_SCORE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define SCORE_API
#elif defined(SCORE_BUILD_SHARED)
#  define SCORE_API __attribute__((visibility("default")))
#else
#  define SCORE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum score_status {
  SCORE_OK = 0,
  SCORE_ERR_INVALID_ARGUMENT = 1,
  SCORE_ERR_PARSE = 2,
  SCORE_ERR_VALIDATION = 3,
  SCORE_ERR_IO = 4,
  SCORE_ERR_UNKNOWN_NODE = 5,
  SCORE_ERR_NO_PATH = 6,
  SCORE_ERR_NO_LOTS = 7,
  SCORE_ERR_OUT_OF_RANGE = 8,
  SCORE_ERR_STATE = 9,
  SCORE_ERR_INTERNAL = 10
} score_status;

typedef struct score_engine score_engine;
typedef struct score_route score_route;
typedef struct score_ranking score_ranking;
typedef struct score_server score_server;

SCORE_API const char* score_version(void);
SCORE_API void score_string_free(char* str);

/* ---- engine lifecycle --------------------------------------------------- */

SCORE_API score_engine* score_engine_new(void);
SCORE_API void score_engine_free(score_engine* engine);

/* Message for the last failed call on this engine ("" if none). The
 * pointer stays valid until the next call on the same engine. */
SCORE_API const char* score_last_error(const score_engine* engine);

/* ---- data loading (line-oriented text files) ----------------------------
 * network:      N <id> <lat> <lon> [label] / E <from> <to> <length_m>
 *               [speed_kmh] / P <id> <node_id> <lat> <lon> [irradiance]
 * offline:      O <node_id> <hour_of_day> <r_off>
 * vehicle:      V key=value ...
 * lots:         P records only
 * observations: B <node_id> <r_on> <t_meas> <source>
 * config:       key=value lines plus any of the records above inline.
 */
SCORE_API score_status score_load_network(score_engine* engine, const char* path);
SCORE_API score_status score_load_offline(score_engine* engine, const char* path);
SCORE_API score_status score_load_vehicle(score_engine* engine, const char* path);
SCORE_API score_status score_load_lots(score_engine* engine, const char* path);
SCORE_API score_status score_load_observations(score_engine* engine, const char* path);
SCORE_API score_status score_load_config(score_engine* engine, const char* path);

/* ---- tunables ------------------------------------------------------------ */

/* Edge weight = max(floor_wh, alpha * length_m + beta * net_wh). */
SCORE_API score_status score_set_weight_config(score_engine* engine, double alpha,
                                               double beta, double floor_wh);
SCORE_API score_status score_set_parking_params(score_engine* engine, double p_irr,
                                                double p_dist, double epsilon_m);
SCORE_API score_status score_set_decay_denominator(score_engine* engine, double denominator);
SCORE_API score_status score_set_replan_interval(score_engine* engine, double hours);
SCORE_API score_status score_config_ports(const score_engine* engine, int* ingest_port,
                                          int* query_port);

/* ---- pure model functions ------------------------------------------------ */

typedef struct score_vehicle_spec {
  double motor_power_w;
  double panel_area_m2;
  double panel_efficiency;
  double max_incident_wm2;
  double cruise_power_w;
} score_vehicle_spec;

SCORE_API void score_vehicle_spec_defaults(score_vehicle_spec* spec);

/* a = exp(-(t_curr - t_meas)^2 / denominator); pass 0 for the default
 * denominator of 100000. */
SCORE_API score_status score_temporal_weight(double t_curr, double t_meas,
                                             double denominator, double* out);

/* r_on * a + r_off * (1 - a), clamped to the input envelope. */
SCORE_API score_status score_fuse(double r_on, double r_off, double t_curr, double t_meas,
                                  double denominator, double* out);

SCORE_API score_status score_harvest_power(const score_vehicle_spec* spec, double r,
                                           double* watts_out);

typedef struct score_edge_energy {
  double travel_time_s;
  double consumed_wh;
  double harvested_wh;
  double net_wh;
} score_edge_energy;

SCORE_API score_status score_edge_energy_compute(const score_vehicle_spec* spec,
                                                 double length_m, double speed_kmh, double r,
                                                 score_edge_energy* out);

SCORE_API score_status score_edge_weight(double alpha, double beta, double floor_wh,
                                         double length_m, double net_wh, double* out);

/* irr^p_irr / max(dist_m, epsilon_m)^p_dist */
SCORE_API score_status score_parking_score(double irr, double dist_m, double p_irr,
                                           double p_dist, double epsilon_m, double* out);

SCORE_API score_status score_great_circle_m(double lat1, double lon1, double lat2,
                                            double lon2, double* meters_out);

/* ---- engine queries ------------------------------------------------------ */

SCORE_API score_status score_nearest_node(score_engine* engine, double lat, double lon,
                                          uint32_t* node_id_out);
SCORE_API score_status score_node_irradiance(score_engine* engine, uint32_t node_id,
                                             double t_hours, double* out);
SCORE_API score_status score_edge_irradiance(score_engine* engine, uint32_t from_node,
                                             uint32_t to_node, double t_hours, double* out);

/* ---- routing ------------------------------------------------------------- */

SCORE_API score_status score_route_compute(score_engine* engine, uint32_t src, uint32_t dst,
                                           double t_hours, score_route** route_out);
SCORE_API void score_route_free(score_route* route);

SCORE_API size_t score_route_node_count(const score_route* route);
SCORE_API uint32_t score_route_node_at(const score_route* route, size_t index);
SCORE_API double score_route_total_weight(const score_route* route);
SCORE_API double score_route_computed_at(const score_route* route);

typedef struct score_route_leg {
  uint32_t from_id;
  uint32_t to_id;
  double length_m;
  double speed_kmh;
  double travel_time_s;
  double consumed_wh;
  double harvested_wh;
  double net_wh;
  double irradiance;
  double weight;
} score_route_leg;

SCORE_API size_t score_route_leg_count(const score_route* route);
SCORE_API score_status score_route_leg_at(const score_route* route, size_t index,
                                          score_route_leg* leg_out);

/* Canonical answer line: node ids then total weight. */
SCORE_API score_status score_route_format_line(const score_route* route, char** line_out);

/* Recompute from current_node to the plan's destination once interval_h
 * hours have elapsed since the plan was computed. A negative interval_h
 * uses the engine's configured replan_interval_h. *replanned_out is 1
 * when a new route was computed, 0 when the plan was returned unchanged. */
SCORE_API score_status score_route_replan(score_engine* engine, const score_route* route,
                                          uint32_t current_node, double t_hours,
                                          double interval_h, int* replanned_out,
                                          score_route** route_out);

/* GeoJSON FeatureCollection: one LineString per leg, one Point per node. */
SCORE_API score_status score_route_geojson(score_engine* engine, const score_route* route,
                                           char** json_out);

/* ---- parking ------------------------------------------------------------- */

typedef struct score_parking_entry {
  uint32_t lot_id;
  uint32_t node_id;
  double score;
  double irradiance;
  double distance_m;
} score_parking_entry;

SCORE_API score_status score_park_rank(score_engine* engine, double dest_lat,
                                       double dest_lon, double t_hours,
                                       score_ranking** ranking_out);
SCORE_API void score_ranking_free(score_ranking* ranking);
SCORE_API size_t score_ranking_count(const score_ranking* ranking);
SCORE_API score_status score_ranking_at(const score_ranking* ranking, size_t index,
                                        score_parking_entry* entry_out);
/* Canonical answer line for the winner: lot id then score. */
SCORE_API score_status score_ranking_format_line(const score_ranking* ranking,
                                                 char** line_out);

/* ---- sensor packets and ingest ------------------------------------------- */

typedef struct score_sensor_packet {
  char callsign[16];
  double lat;
  double lon;
  double irr;
  double t_meas;
} score_sensor_packet;

typedef enum score_packet_error_kind {
  SCORE_PACKET_ERR_MALFORMED_HEADER = 0,
  SCORE_PACKET_ERR_BAD_COORDINATE = 1,
  SCORE_PACKET_ERR_OUT_OF_RANGE = 2,
  SCORE_PACKET_ERR_MISSING_FIELD = 3
} score_packet_error_kind;

typedef struct score_packet_error {
  score_packet_error_kind kind;
  size_t offset; /* byte offset into the line */
} score_packet_error;

/* Returns SCORE_ERR_PARSE on a malformed line; error_out (optional) then
 * carries the error kind and byte offset. */
SCORE_API score_status score_parse_sensor_line(const char* line,
                                               score_sensor_packet* packet_out,
                                               score_packet_error* error_out);
SCORE_API score_status score_format_sensor_line(const score_sensor_packet* packet,
                                                char** line_out);

typedef enum score_ingest_outcome {
  SCORE_INGEST_ACCEPTED = 0,
  SCORE_INGEST_SUPERSEDED = 1,
  SCORE_INGEST_REJECTED = 2
} score_ingest_outcome;

/* Parse one sensor line, map it to the nearest node and store it.
 * Malformed lines yield SCORE_OK with *outcome_out = REJECTED. */
SCORE_API score_status score_ingest_line(score_engine* engine, const char* line,
                                         int* outcome_out);

/* Store an observation directly (source may be NULL). */
SCORE_API score_status score_ingest_observation(score_engine* engine, uint32_t node_id,
                                                double r_on, double t_meas,
                                                const char* source, int* outcome_out);

typedef struct score_ingest_report {
  uint64_t accepted;
  uint64_t superseded;
  uint64_t rejected;
  uint64_t rejected_malformed_header;
  uint64_t rejected_bad_coordinate;
  uint64_t rejected_out_of_range;
  uint64_t rejected_missing_field;
} score_ingest_report;

SCORE_API score_status score_ingest_file(score_engine* engine, const char* path,
                                         score_ingest_report* report_out);
/* Cumulative counters across every ingest on this engine. */
SCORE_API score_status score_ingest_totals(score_engine* engine,
                                           score_ingest_report* report_out);
SCORE_API score_status score_dump_observations(score_engine* engine, const char* path);

/* factor <- clamp(measured / predicted, 0.5, 2.0); *applied_out is 0 when
 * predicted == 0 (calibration skipped). */
SCORE_API score_status score_calibrate(score_engine* engine, double r_predicted,
                                       double r_measured, int* applied_out,
                                       double* factor_out);

/* ---- line protocol -------------------------------------------------------
 * Same strings the TCP service sends. Blank input lines produce
 * *answer_out == NULL (no reply). */
SCORE_API score_status score_answer_query(score_engine* engine, const char* line,
                                          char** answer_out);
SCORE_API score_status score_answer_ingest(score_engine* engine, const char* line,
                                           char** answer_out);

/* ---- TCP service ---------------------------------------------------------
 * Sensor lines on the ingest port, ROUTE/PARK lines on the query port, one
 * reply per line. Port 0 binds an ephemeral port; query_port < 0 disables
 * the query listener. The engine must outlive the server. */
SCORE_API score_status score_server_start(score_engine* engine, int ingest_port,
                                          int query_port, score_server** server_out);
SCORE_API score_status score_server_ports(const score_server* server, int* ingest_port,
                                          int* query_port);
SCORE_API score_status score_server_stop(score_server* server);
SCORE_API void score_server_free(score_server* server);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SCORE_SCORE_H */
