#include "core/engine.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "core/error.hpp"
#include "core/geojson.hpp"
#include "core/util.hpp"

namespace score::app {

namespace {

bool is_record_tag(std::string_view token) {
  return token == "N" || token == "E" || token == "P" || token == "O" || token == "V" ||
         token == "B";
}

int require_port(const std::string& value, const std::string& where) {
  auto port = util::parse_int(value);
  if (!port || *port < 0 || *port > 65535)
    throw Error(ErrorKind::Parse, where + ": bad port '" + value + "'");
  return *port;
}

double require_number(const std::string& value, const std::string& where) {
  auto v = util::parse_double(value);
  if (!v || !std::isfinite(*v))
    throw Error(ErrorKind::Parse, where + ": bad numeric value '" + value + "'");
  return *v;
}

}  // namespace

std::string_view error_token(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "usage";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "data";
    case ErrorKind::Io: return "io";
    case ErrorKind::UnknownNode: return "unknown-node";
    case ErrorKind::NoPath: return "no-path";
    case ErrorKind::NoLots: return "no-lots";
    case ErrorKind::OutOfRange: return "range";
    case ErrorKind::State: return "data";
  }
  return "internal";
}

const net::RoadNetwork& Engine::network() const {
  if (!network_) throw Error(ErrorKind::State, "no network loaded");
  return *network_;
}

void Engine::add_lots(std::vector<net::ParkingLot> lots) {
  for (net::ParkingLot& lot : lots) {
    for (const net::ParkingLot& existing : lots_)
      if (existing.id == lot.id)
        throw Error(ErrorKind::Validation,
                    "duplicate parking lot id " + std::to_string(lot.id));
    if (network_ && !network_->has_node(lot.node_id))
      throw Error(ErrorKind::Validation, "parking lot " + std::to_string(lot.id) +
                                             ": unknown node " + std::to_string(lot.node_id));
    if (lot.irradiance && (*lot.irradiance < 0.0 || *lot.irradiance > 1.0))
      throw Error(ErrorKind::Validation,
                  "parking lot " + std::to_string(lot.id) + ": irradiance out of range");
    lots_.push_back(std::move(lot));
  }
}

void Engine::load_network_file(const std::filesystem::path& path) {
  network_ = net::load_network(path);
  add_lots(network_->lots());
}

void Engine::load_offline_file(const std::filesystem::path& path) {
  store_.set_offline(fusion::load_offline_table(path));
}

void Engine::load_vehicle_file(const std::filesystem::path& path) {
  vehicle_ = energy::load_vehicle_spec(path);
}

void Engine::load_lots_file(const std::filesystem::path& path) {
  add_lots(net::load_lots(path));
}

void Engine::load_observations_file(const std::filesystem::path& path) {
  for (const fusion::IrradianceObservation& obs : fusion::load_observations(path))
    store_.ingest(obs);
}

void Engine::load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file: " + path.string());
  const std::filesystem::path base_dir = path.has_parent_path()
                                             ? path.parent_path()
                                             : std::filesystem::path(".");

  std::vector<net::Node> nodes;
  std::vector<net::Edge> edges;
  std::vector<net::ParkingLot> inline_lots;
  fusion::OfflineTable inline_offline;
  bool has_offline_records = false;
  bool has_vehicle_records = false;
  energy::VehicleSpec inline_vehicle = vehicle_;
  std::vector<fusion::IrradianceObservation> inline_obs;
  std::vector<std::pair<std::string, std::string>> keys;  // in file order

  std::string line;
  net::ParseContext ctx{path.filename().string(), 0};
  while (std::getline(in, line)) {
    ++ctx.line_no;
    std::string_view text = util::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = util::split_ws(text);
    if (is_record_tag(fields[0])) {
      if (fields[0] == "N") {
        nodes.push_back(net::parse_node_record(fields, ctx));
      } else if (fields[0] == "E") {
        edges.push_back(net::parse_edge_record(fields, ctx));
      } else if (fields[0] == "P") {
        inline_lots.push_back(net::parse_lot_record(fields, ctx));
      } else if (fields[0] == "O") {
        fusion::parse_offline_record(inline_offline, fields, ctx);
        has_offline_records = true;
      } else if (fields[0] == "V") {
        energy::apply_vehicle_record(inline_vehicle, fields, ctx);
        has_vehicle_records = true;
      } else {
        inline_obs.push_back(fusion::parse_observation_record(fields, ctx));
      }
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Parse, ctx.where() + ": expected key=value or record line");
    const std::string key{util::trim(text.substr(0, eq))};
    const std::string value{util::trim(text.substr(eq + 1))};
    if (key.empty() || value.empty())
      throw Error(ErrorKind::Parse, ctx.where() + ": expected key=value or record line");
    keys.emplace_back(key, value);
  }

  auto path_key = [&](const char* name) -> std::optional<std::filesystem::path> {
    std::optional<std::filesystem::path> found;
    for (const auto& [k, v] : keys)
      if (k == name) found = base_dir / v;
    return found;
  };
  const std::string origin = path.filename().string();

  if (auto p = path_key("network")) {
    if (!nodes.empty() || !edges.empty())
      throw Error(ErrorKind::Validation,
                  origin + ": network given both inline and as network=");
    load_network_file(*p);
  } else if (!nodes.empty() || !edges.empty()) {
    network_ = net::RoadNetwork::build(std::move(nodes), std::move(edges), {});
  }

  if (auto p = path_key("offline")) {
    if (has_offline_records)
      throw Error(ErrorKind::Validation,
                  origin + ": offline table given both inline and as offline=");
    load_offline_file(*p);
  } else if (has_offline_records) {
    store_.set_offline(std::move(inline_offline));
  }

  if (auto p = path_key("vehicle")) {
    if (has_vehicle_records)
      throw Error(ErrorKind::Validation,
                  origin + ": vehicle spec given both inline and as vehicle=");
    load_vehicle_file(*p);
  } else if (has_vehicle_records) {
    inline_vehicle.validate();
    vehicle_ = inline_vehicle;
  }

  if (auto p = path_key("lots")) load_lots_file(*p);
  if (!inline_lots.empty()) add_lots(std::move(inline_lots));

  for (const auto& [key, value] : keys)
    apply_config_value(key, value, base_dir, origin);

  if (auto p = path_key("observations")) {
    if (!inline_obs.empty())
      throw Error(ErrorKind::Validation,
                  origin + ": observations given both inline and as observations=");
    load_observations_file(*p);
  } else {
    for (const fusion::IrradianceObservation& obs : inline_obs) store_.ingest(obs);
  }
}

void Engine::apply_config_value(const std::string& key, const std::string& value,
                                const std::filesystem::path&, const std::string& where) {
  if (key == "network" || key == "offline" || key == "vehicle" || key == "lots" ||
      key == "observations")
    return;  // handled by the loader
  if (key == "alpha") {
    routing::WeightConfig w = config_.weights;
    w.alpha = require_number(value, where);
    set_weight_config(w);
  } else if (key == "beta") {
    routing::WeightConfig w = config_.weights;
    w.beta = require_number(value, where);
    set_weight_config(w);
  } else if (key == "floor_wh") {
    routing::WeightConfig w = config_.weights;
    w.floor_wh = require_number(value, where);
    set_weight_config(w);
  } else if (key == "p_irr") {
    set_parking_params(require_number(value, where), config_.p_dist, config_.epsilon_m);
  } else if (key == "p_dist") {
    set_parking_params(config_.p_irr, require_number(value, where), config_.epsilon_m);
  } else if (key == "epsilon_m") {
    set_parking_params(config_.p_irr, config_.p_dist, require_number(value, where));
  } else if (key == "replan_interval_h") {
    set_replan_interval(require_number(value, where));
  } else if (key == "decay_denominator") {
    set_decay_denominator(require_number(value, where));
  } else if (key == "ingest_port") {
    config_.ingest_port = require_port(value, where);
  } else if (key == "query_port") {
    config_.query_port = require_port(value, where);
  } else {
    throw Error(ErrorKind::Parse, where + ": unknown config key '" + key + "'");
  }
}

void Engine::set_weight_config(const routing::WeightConfig& weights) {
  weights.validate();
  config_.weights = weights;
}

void Engine::set_parking_params(double p_irr, double p_dist, double epsilon_m) {
  if (!(p_irr >= 0.0) || !(p_dist >= 0.0))
    throw Error(ErrorKind::Validation, "parking exponents must be non-negative");
  if (!(p_irr + p_dist > 0.0))
    throw Error(ErrorKind::Validation, "at least one parking exponent must be positive");
  if (!(epsilon_m > 0.0))
    throw Error(ErrorKind::Validation, "distance floor must be positive");
  config_.p_irr = p_irr;
  config_.p_dist = p_dist;
  config_.epsilon_m = epsilon_m;
}

void Engine::set_decay_denominator(double denominator) {
  store_.set_decay_denominator(denominator);  // validates
  config_.decay_denominator = denominator;
}

void Engine::set_replan_interval(double hours) {
  if (!(hours >= 0.0))
    throw Error(ErrorKind::Validation, "replan interval must be non-negative");
  config_.replan_interval_h = hours;
}

void Engine::require_route_ready() const {
  const net::RoadNetwork& network = this->network();
  const fusion::FusionView view = store_.view();
  if (view.offline().empty())
    throw Error(ErrorKind::State, "no offline irradiance table loaded");
  for (const net::Node& node : network.nodes())
    if (!view.offline().has_node(node.id))
      throw Error(ErrorKind::Validation, "node " + std::to_string(node.id) +
                                             " has no offline irradiance data");
}

net::NodeId Engine::nearest(double lat, double lon) const {
  return net::nearest_node(network(), lat, lon);
}

double Engine::node_irradiance(net::NodeId node_id, double t_curr) const {
  return store_.view().node_irradiance(node_id, t_curr);
}

double Engine::edge_irradiance(net::NodeId from, net::NodeId to, double t_curr) const {
  const fusion::FusionView view = store_.view();
  return (view.node_irradiance(from, t_curr) + view.node_irradiance(to, t_curr)) / 2.0;
}

routing::RoutePlan Engine::route(net::NodeId src, net::NodeId dst, double t_curr) const {
  return routing::shortest_route(network(), store_.view(), vehicle_, config_.weights, src,
                                 dst, t_curr);
}

routing::ReplanResult Engine::replan(const routing::RoutePlan& plan, net::NodeId current_node,
                                     double t_curr, double interval_h) const {
  return routing::replan(plan, network(), store_.view(), vehicle_, config_.weights,
                         current_node, t_curr, interval_h);
}

std::vector<parking::ParkingChoice> Engine::park(double dest_lat, double dest_lon,
                                                 double t_curr) const {
  parking::ParkingQuery query{dest_lat, dest_lon, config_.p_irr, config_.p_dist,
                              config_.epsilon_m};
  return parking::rank_parking(store_.view(), lots_, query, t_curr);
}

std::string Engine::route_geojson(const routing::RoutePlan& plan) const {
  return geojson::route_geojson(network(), plan, store_.view());
}

sensor::IngestLineResult Engine::ingest_line(std::string_view line) {
  const net::RoadNetwork& network = this->network();
  const sensor::IngestLineResult result = sensor::ingest_line(line, network, store_);
  std::lock_guard lock(totals_mutex_);
  switch (result.status) {
    case sensor::IngestLineResult::Status::Accepted: ++totals_.accepted; break;
    case sensor::IngestLineResult::Status::Superseded: ++totals_.superseded; break;
    case sensor::IngestLineResult::Status::Rejected:
      ++totals_.rejected;
      ++totals_.rejected_by_kind[std::size_t(result.error->kind)];
      break;
  }
  return result;
}

fusion::IngestOutcome Engine::ingest_observation(const fusion::IrradianceObservation& obs) {
  const fusion::IngestOutcome outcome = store_.ingest(obs);
  std::lock_guard lock(totals_mutex_);
  if (outcome == fusion::IngestOutcome::Accepted)
    ++totals_.accepted;
  else
    ++totals_.superseded;
  return outcome;
}

fusion::CalibrationResult Engine::calibrate(double r_predicted, double r_measured) {
  return store_.calibrate(r_predicted, r_measured);
}

sensor::IngestReport Engine::ingest_totals() const {
  std::lock_guard lock(totals_mutex_);
  return totals_;
}

void Engine::dump_observations(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write observation dump: " + path.string());
  fusion::write_observations(store_.view(), out);
  if (!out) throw Error(ErrorKind::Io, "failed writing observation dump: " + path.string());
}

std::string Engine::route_answer_line(const routing::RoutePlan& plan) {
  std::string out;
  for (net::NodeId id : plan.nodes) {
    out += std::to_string(id);
    out += ' ';
  }
  out += util::format_number(plan.total_weight);
  return out;
}

std::string Engine::park_answer_line(const parking::ParkingChoice& choice) {
  return std::to_string(choice.lot.id) + " " + util::format_number(choice.score);
}

std::optional<std::string> Engine::answer_query(std::string_view line) const {
  const std::string_view text = util::trim(util::strip_cr(line));
  if (text.empty()) return std::nullopt;
  const auto tokens = util::split_ws(text);
  try {
    if (tokens[0] == "ROUTE") {
      if (tokens.size() != 4)
        throw Error(ErrorKind::InvalidArgument, "usage: ROUTE <src> <dst> <t>");
      const auto src = util::parse_u32(tokens[1]);
      const auto dst = util::parse_u32(tokens[2]);
      const auto t = util::parse_double(tokens[3]);
      if (!src || *src == 0 || !dst || *dst == 0 || !t || !(*t >= 0.0) || !std::isfinite(*t))
        throw Error(ErrorKind::InvalidArgument, "usage: ROUTE <src> <dst> <t>");
      return route_answer_line(route(*src, *dst, *t));
    }
    if (tokens[0] == "PARK") {
      if (tokens.size() != 4)
        throw Error(ErrorKind::InvalidArgument, "usage: PARK <lat> <lon> <t>");
      const auto lat = util::parse_double(tokens[1]);
      const auto lon = util::parse_double(tokens[2]);
      const auto t = util::parse_double(tokens[3]);
      if (!lat || !lon || !t || !(*t >= 0.0) || !std::isfinite(*t))
        throw Error(ErrorKind::InvalidArgument, "usage: PARK <lat> <lon> <t>");
      return park_answer_line(park(*lat, *lon, *t).front());
    }
    throw Error(ErrorKind::InvalidArgument, "unknown command");
  } catch (const Error& e) {
    return "ERR " + std::string(error_token(e.kind()));
  } catch (const std::exception&) {
    return std::string("ERR internal");
  }
}

std::optional<std::string> Engine::answer_ingest(std::string_view line) {
  const std::string_view text = util::strip_cr(line);
  if (util::trim(text).empty()) return std::nullopt;
  try {
    const sensor::IngestLineResult result = ingest_line(text);
    switch (result.status) {
      case sensor::IngestLineResult::Status::Accepted: return std::string("OK accepted");
      case sensor::IngestLineResult::Status::Superseded: return std::string("OK superseded");
      case sensor::IngestLineResult::Status::Rejected:
        return "ERR " + std::string(sensor::packet_error_token(result.error->kind));
    }
    return std::string("ERR internal");
  } catch (const Error& e) {
    return "ERR " + std::string(error_token(e.kind()));
  } catch (const std::exception&) {
    return std::string("ERR internal");
  }
}

}  // namespace score::app
