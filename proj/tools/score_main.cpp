// score - solar-aware routing CLI.
//
// Subcommands: route, park, ingest, serve. Everything goes through the
// C API in score/score.h; this file only handles flags, printing and
// process plumbing.

#include <csignal>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "score/score.h"

namespace {

volatile std::sig_atomic_t g_stop_requested = 0;

void handle_stop_signal(int) { g_stop_requested = 1; }

int exit_code_for(score_status status) {
  switch (status) {
    case SCORE_OK: return 0;
    case SCORE_ERR_INVALID_ARGUMENT: return 1;
    case SCORE_ERR_NO_PATH: return 3;
    default: return 2;
  }
}

// Prints the engine's message and returns the command exit code.
int fail(score_engine* engine, score_status status, const char* what) {
  const char* message = score_last_error(engine);
  std::cerr << "score: " << what;
  if (message && *message) std::cerr << ": " << message;
  std::cerr << "\n";
  return exit_code_for(status);
}

double now_hours_from_year_start() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::tm year_start = utc;
  year_start.tm_mon = 0;
  year_start.tm_mday = 1;
  year_start.tm_hour = 0;
  year_start.tm_min = 0;
  year_start.tm_sec = 0;
  year_start.tm_isdst = 0;
  return double(now - timegm(&year_start)) / 3600.0;
}

struct EngineHandle {
  score_engine* ptr = score_engine_new();
  ~EngineHandle() { score_engine_free(ptr); }
};

void print_report(const score_ingest_report& report) {
  std::cout << "accepted " << report.accepted << " superseded " << report.superseded
            << " rejected " << report.rejected << "\n";
  if (report.rejected_malformed_header)
    std::cout << "  malformed-header " << report.rejected_malformed_header << "\n";
  if (report.rejected_bad_coordinate)
    std::cout << "  bad-coordinate " << report.rejected_bad_coordinate << "\n";
  if (report.rejected_out_of_range)
    std::cout << "  out-of-range " << report.rejected_out_of_range << "\n";
  if (report.rejected_missing_field)
    std::cout << "  missing-field " << report.rejected_missing_field << "\n";
}

struct RouteArgs {
  std::string net, offline, spec, obs, geojson;
  std::uint32_t from = 0, to = 0;
  double time = 0.0;
  bool use_now = false;
  double alpha = 0.0, beta = 1.0, floor_wh = 0.001;
  std::optional<double> decay;
};

int run_route(const RouteArgs& args) {
  EngineHandle engine;
  score_status status;
  if ((status = score_load_network(engine.ptr, args.net.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading network");
  if ((status = score_load_offline(engine.ptr, args.offline.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading offline table");
  if (!args.spec.empty() &&
      (status = score_load_vehicle(engine.ptr, args.spec.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading vehicle spec");
  if (!args.obs.empty() &&
      (status = score_load_observations(engine.ptr, args.obs.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading observations");
  if ((status = score_set_weight_config(engine.ptr, args.alpha, args.beta, args.floor_wh)) !=
      SCORE_OK)
    return fail(engine.ptr, status, "setting weights");
  if (args.decay &&
      (status = score_set_decay_denominator(engine.ptr, *args.decay)) != SCORE_OK)
    return fail(engine.ptr, status, "setting decay denominator");

  const double t = args.use_now ? now_hours_from_year_start() : args.time;
  score_route* route = nullptr;
  if ((status = score_route_compute(engine.ptr, args.from, args.to, t, &route)) != SCORE_OK)
    return fail(engine.ptr, status, "computing route");

  char* line = nullptr;
  score_route_format_line(route, &line);
  std::cout << line << "\n";
  score_string_free(line);

  const size_t legs = score_route_leg_count(route);
  double consumed = 0.0, harvested = 0.0;
  for (size_t i = 0; i < legs; ++i) {
    score_route_leg leg{};
    score_route_leg_at(route, i, &leg);
    std::printf("  leg %u->%u length %.1f m time %.1f s irr %.3f consumed %.3f Wh "
                "harvested %.3f Wh net %.3f Wh weight %.6g\n",
                leg.from_id, leg.to_id, leg.length_m, leg.travel_time_s, leg.irradiance,
                leg.consumed_wh, leg.harvested_wh, leg.net_wh, leg.weight);
    consumed += leg.consumed_wh;
    harvested += leg.harvested_wh;
  }
  if (legs > 0)
    std::printf("  total consumed %.3f Wh harvested %.3f Wh net %.3f Wh\n", consumed,
                harvested, consumed - harvested);

  if (!args.geojson.empty()) {
    char* json = nullptr;
    if ((status = score_route_geojson(engine.ptr, route, &json)) != SCORE_OK) {
      score_route_free(route);
      return fail(engine.ptr, status, "building GeoJSON");
    }
    std::ofstream out(args.geojson);
    out << json;
    score_string_free(json);
    if (!out) {
      score_route_free(route);
      std::cerr << "score: cannot write " << args.geojson << "\n";
      return 2;
    }
  }
  score_route_free(route);
  return 0;
}

struct ParkArgs {
  std::string lots, net, offline, obs;
  double lat = 0.0, lon = 0.0, time = 0.0;
  bool use_now = false;
  double p_irr = 1.0, p_dist = 1.0, epsilon_m = 1.0;
};

int run_park(const ParkArgs& args) {
  EngineHandle engine;
  score_status status;
  if (!args.net.empty() &&
      (status = score_load_network(engine.ptr, args.net.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading network");
  if (!args.offline.empty() &&
      (status = score_load_offline(engine.ptr, args.offline.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading offline table");
  if (!args.obs.empty() &&
      (status = score_load_observations(engine.ptr, args.obs.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading observations");
  if ((status = score_load_lots(engine.ptr, args.lots.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading lots");
  if ((status = score_set_parking_params(engine.ptr, args.p_irr, args.p_dist,
                                         args.epsilon_m)) != SCORE_OK)
    return fail(engine.ptr, status, "setting parking parameters");

  const double t = args.use_now ? now_hours_from_year_start() : args.time;
  score_ranking* ranking = nullptr;
  if ((status = score_park_rank(engine.ptr, args.lat, args.lon, t, &ranking)) != SCORE_OK)
    return fail(engine.ptr, status, "ranking lots");

  char* line = nullptr;
  score_ranking_format_line(ranking, &line);
  std::cout << line << "\n";
  score_string_free(line);

  const size_t count = score_ranking_count(ranking);
  for (size_t i = 0; i < count; ++i) {
    score_parking_entry entry{};
    score_ranking_at(ranking, i, &entry);
    std::printf("%s lot %u node %u score %.6g irr %.3f dist %.1f m\n",
                i == 0 ? "*" : " ", entry.lot_id, entry.node_id, entry.score,
                entry.irradiance, entry.distance_m);
  }
  score_ranking_free(ranking);
  return 0;
}

struct IngestArgs {
  std::string net, file, dump;
  int listen_port = -1;
};

int run_ingest(const IngestArgs& args) {
  EngineHandle engine;
  score_status status;
  if ((status = score_load_network(engine.ptr, args.net.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading network");

  if (args.listen_port >= 0) {
    score_server* server = nullptr;
    if ((status = score_server_start(engine.ptr, args.listen_port, -1, &server)) != SCORE_OK)
      return fail(engine.ptr, status, "starting listener");
    int port = 0;
    score_server_ports(server, &port, nullptr);
    std::cout << "listening ingest=" << port << "\n" << std::flush;
    std::signal(SIGINT, handle_stop_signal);
    std::signal(SIGTERM, handle_stop_signal);
    while (!g_stop_requested) {
      struct timespec nap = {0, 100 * 1000 * 1000};
      nanosleep(&nap, nullptr);
    }
    score_server_stop(server);
    score_server_free(server);
  } else if (!args.file.empty()) {
    score_ingest_report report{};
    if ((status = score_ingest_file(engine.ptr, args.file.c_str(), &report)) != SCORE_OK)
      return fail(engine.ptr, status, "ingesting file");
  } else {
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      int outcome = 0;
      if ((status = score_ingest_line(engine.ptr, line.c_str(), &outcome)) != SCORE_OK)
        return fail(engine.ptr, status, "ingesting line");
    }
  }

  score_ingest_report totals{};
  score_ingest_totals(engine.ptr, &totals);
  print_report(totals);
  if (!args.dump.empty() &&
      (status = score_dump_observations(engine.ptr, args.dump.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "writing observation dump");
  return 0;
}

int run_serve(const std::string& config_path) {
  EngineHandle engine;
  score_status status;
  if ((status = score_load_config(engine.ptr, config_path.c_str())) != SCORE_OK)
    return fail(engine.ptr, status, "loading config");
  int ingest_port = -1, query_port = -1;
  score_config_ports(engine.ptr, &ingest_port, &query_port);
  if (ingest_port < 0 || query_port < 0) {
    std::cerr << "score: config must set ingest_port and query_port\n";
    return 2;
  }
  score_server* server = nullptr;
  if ((status = score_server_start(engine.ptr, ingest_port, query_port, &server)) !=
      SCORE_OK)
    return fail(engine.ptr, status, "starting server");
  int bound_ingest = 0, bound_query = 0;
  score_server_ports(server, &bound_ingest, &bound_query);
  std::cout << "listening ingest=" << bound_ingest << " query=" << bound_query << "\n"
            << std::flush;
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  while (!g_stop_requested) {
    struct timespec nap = {0, 100 * 1000 * 1000};
    nanosleep(&nap, nullptr);
  }
  score_server_stop(server);
  score_server_free(server);
  score_ingest_report totals{};
  score_ingest_totals(engine.ptr, &totals);
  print_report(totals);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solar-aware route and parking planner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(score_version()));

  RouteArgs route_args;
  auto* route = app.add_subcommand("route", "compute an energy-aware route");
  route->add_option("--net", route_args.net, "network file")->required();
  route->add_option("--offline", route_args.offline, "offline irradiance table")->required();
  route->add_option("--spec", route_args.spec, "vehicle spec file");
  route->add_option("--obs", route_args.obs, "observation dump to preload");
  route->add_option("--from", route_args.from, "source node id")->required();
  route->add_option("--to", route_args.to, "destination node id")->required();
  auto* route_time = route->add_option("--time", route_args.time, "hours since year start");
  route->add_flag("--now", route_args.use_now, "use the current UTC time");
  route->add_option("--alpha", route_args.alpha, "weight per meter");
  route->add_option("--beta", route_args.beta, "weight per watt-hour");
  route->add_option("--floor", route_args.floor_wh, "minimum edge weight");
  double route_decay = 0.0;
  auto* route_decay_opt =
      route->add_option("--decay", route_decay, "temporal decay denominator");
  route->add_option("--geojson", route_args.geojson, "write the route as GeoJSON");

  ParkArgs park_args;
  auto* park = app.add_subcommand("park", "rank parking lots near a destination");
  park->add_option("--lots", park_args.lots, "parking lots file")->required();
  park->add_option("--net", park_args.net, "network file");
  park->add_option("--offline", park_args.offline, "offline irradiance table");
  park->add_option("--obs", park_args.obs, "observation dump to preload");
  park->add_option("--lat", park_args.lat, "destination latitude")->required();
  park->add_option("--lon", park_args.lon, "destination longitude")->required();
  auto* park_time = park->add_option("--time", park_args.time, "hours since year start");
  park->add_flag("--now", park_args.use_now, "use the current UTC time");
  park->add_option("--p-irr", park_args.p_irr, "irradiance exponent");
  park->add_option("--p-dist", park_args.p_dist, "distance exponent");
  park->add_option("--epsilon", park_args.epsilon_m, "distance floor in meters");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "ingest sensor report lines");
  ingest->add_option("--net", ingest_args.net, "network file")->required();
  ingest->add_option("--file", ingest_args.file, "read lines from a file");
  ingest->add_option("--listen", ingest_args.listen_port, "accept lines on a TCP port");
  ingest->add_option("--dump", ingest_args.dump, "write surviving observations to a file");

  std::string config_path;
  auto* serve = app.add_subcommand("serve", "run the ingest + query service");
  serve->add_option("--config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (route->parsed()) {
    if (!route_args.use_now && route_time->count() == 0) {
      std::cerr << "score: route needs --time or --now\n";
      return 1;
    }
    if (route_decay_opt->count() > 0) route_args.decay = route_decay;
    return run_route(route_args);
  }
  if (park->parsed()) {
    if (!park_args.use_now && park_time->count() == 0) {
      std::cerr << "score: park needs --time or --now\n";
      return 1;
    }
    return run_park(park_args);
  }
  if (ingest->parsed()) return run_ingest(ingest_args);
  if (serve->parsed()) return run_serve(config_path);
  return 1;
}
