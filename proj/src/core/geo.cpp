#include "core/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace score::geo {

double deg_to_rad(double degrees) { return degrees * std::numbers::pi / 180.0; }

double great_circle_m(double lat1, double lon1, double lat2, double lon2) {
  const double phi1 = deg_to_rad(lat1);
  const double phi2 = deg_to_rad(lat2);
  const double dphi = deg_to_rad(lat2 - lat1);
  const double dlambda = deg_to_rad(lon2 - lon1);
  const double sp = std::sin(dphi / 2.0);
  const double sl = std::sin(dlambda / 2.0);
  const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace score::geo
