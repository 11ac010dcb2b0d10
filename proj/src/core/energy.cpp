#include "core/energy.hpp"

#include <fstream>

#include "core/error.hpp"
#include "core/util.hpp"

namespace score::energy {

namespace {

constexpr double kSecondsPerHour = 3600.0;
constexpr double kMetersPerKm = 1000.0;

}  // namespace

void VehicleSpec::validate() const {
  if (!(motor_power_w > 0.0))
    throw Error(ErrorKind::Validation, "motor power must be positive");
  if (!(panel_area_m2 > 0.0))
    throw Error(ErrorKind::Validation, "panel area must be positive");
  if (!(panel_efficiency > 0.0 && panel_efficiency < 1.0))
    throw Error(ErrorKind::Validation, "panel efficiency must lie in (0, 1)");
  if (!(max_incident_wm2 > 0.0))
    throw Error(ErrorKind::Validation, "max incident power must be positive");
  if (!(cruise_power_w > 0.0))
    throw Error(ErrorKind::Validation, "cruise power must be positive");
}

double harvest_power(const VehicleSpec& spec, double r) {
  if (!(r >= 0.0 && r <= 1.0))
    throw Error(ErrorKind::OutOfRange, "irradiance outside [0, 1]");
  return r * spec.max_incident_wm2 * spec.panel_area_m2 * spec.panel_efficiency;
}

EdgeEnergy edge_energy(const VehicleSpec& spec, const net::Edge& edge, double r) {
  if (!(edge.length_m > 0.0))
    throw Error(ErrorKind::InvalidArgument, "edge length must be positive");
  if (!(edge.speed_kmh > 0.0))
    throw Error(ErrorKind::InvalidArgument, "edge speed must be positive");
  EdgeEnergy e;
  const double travel_time_h = (edge.length_m / kMetersPerKm) / edge.speed_kmh;
  e.travel_time_s = travel_time_h * kSecondsPerHour;
  e.consumed_wh = spec.cruise_power_w * travel_time_h;
  e.harvested_wh = harvest_power(spec, r) * travel_time_h;
  e.net_wh = e.consumed_wh - e.harvested_wh;
  return e;
}

void apply_vehicle_record(VehicleSpec& spec, const std::vector<std::string_view>& fields,
                          const net::ParseContext& ctx) {
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const std::string_view field = fields[i];
    const std::size_t eq = field.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Parse,
                  ctx.where() + ": vehicle record fields must look like key=value");
    const std::string_view key = field.substr(0, eq);
    auto value = util::parse_double(field.substr(eq + 1));
    if (!value)
      throw Error(ErrorKind::Parse, ctx.where() + ": bad numeric value in '" +
                                        std::string(field) + "'");
    if (key == "motor_power_w") {
      spec.motor_power_w = *value;
    } else if (key == "panel_area_m2") {
      spec.panel_area_m2 = *value;
    } else if (key == "panel_efficiency") {
      spec.panel_efficiency = *value;
    } else if (key == "max_incident_wm2") {
      spec.max_incident_wm2 = *value;
    } else if (key == "cruise_power_w") {
      spec.cruise_power_w = *value;
    } else {
      throw Error(ErrorKind::Parse,
                  ctx.where() + ": unknown vehicle key '" + std::string(key) + "'");
    }
  }
}

VehicleSpec load_vehicle_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open vehicle spec: " + path.string());
  VehicleSpec spec;
  std::string line;
  net::ParseContext ctx{path.filename().string(), 0};
  while (std::getline(in, line)) {
    ++ctx.line_no;
    std::string_view text = util::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = util::split_ws(text);
    if (fields[0] != "V")
      throw Error(ErrorKind::Parse, ctx.where() + ": expected 'V' record in vehicle spec");
    apply_vehicle_record(spec, fields, ctx);
  }
  spec.validate();
  return spec;
}

}  // namespace score::energy
