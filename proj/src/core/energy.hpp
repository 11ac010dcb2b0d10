#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "core/network.hpp"

namespace score::energy {

struct VehicleSpec {
  double motor_power_w = 11000.0;
  double panel_area_m2 = 1.452;  // two panels of 0.726 m^2
  double panel_efficiency = 0.18;
  double max_incident_wm2 = 957.0;  // incident power at full irradiance
  double cruise_power_w = 5500.0;   // steady drive draw

  void validate() const;  // throws Error(Validation)
};

// Electrical power harvested by the panels at normalized irradiance r.
double harvest_power(const VehicleSpec& spec, double r);

struct EdgeEnergy {
  double travel_time_s = 0.0;
  double consumed_wh = 0.0;
  double harvested_wh = 0.0;
  double net_wh = 0.0;  // consumed - harvested; may be negative
};

// Traversal energy for one road segment at constant speed and fixed
// irradiance r.
EdgeEnergy edge_energy(const VehicleSpec& spec, const net::Edge& edge, double r);

// 'V key=value ...' record; later records override earlier ones.
void apply_vehicle_record(VehicleSpec& spec, const std::vector<std::string_view>& fields,
                          const net::ParseContext& ctx);
VehicleSpec load_vehicle_spec(const std::filesystem::path& path);

}  // namespace score::energy
