#pragma once

namespace score::geo {

inline constexpr double kEarthRadiusM = 6371000.0;

double deg_to_rad(double degrees);

// Great-circle distance in meters between two WGS84 points (haversine).
double great_circle_m(double lat1, double lon1, double lat2, double lon2);

}  // namespace score::geo
