#include "core/parking.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/geo.hpp"

namespace score::parking {

void ParkingQuery::validate() const {
  if (dest_lat < -90.0 || dest_lat > 90.0)
    throw Error(ErrorKind::Validation, "destination latitude out of range");
  if (dest_lon < -180.0 || dest_lon > 180.0)
    throw Error(ErrorKind::Validation, "destination longitude out of range");
  if (!(p_irr >= 0.0) || !(p_dist >= 0.0))
    throw Error(ErrorKind::Validation, "parking exponents must be non-negative");
  if (!(p_irr + p_dist > 0.0))
    throw Error(ErrorKind::Validation, "at least one parking exponent must be positive");
  if (!(epsilon_m > 0.0))
    throw Error(ErrorKind::Validation, "distance floor must be positive");
}

double parking_score(double irr, double dist_m, double p_irr, double p_dist,
                     double epsilon_m) {
  if (!(irr >= 0.0 && irr <= 1.0))
    throw Error(ErrorKind::OutOfRange, "irradiance outside [0, 1]");
  if (!(dist_m >= 0.0))
    throw Error(ErrorKind::OutOfRange, "distance must be non-negative");
  if (!(p_irr >= 0.0) || !(p_dist >= 0.0) || !(p_irr + p_dist > 0.0))
    throw Error(ErrorKind::Validation, "bad parking exponents");
  if (!(epsilon_m > 0.0))
    throw Error(ErrorKind::Validation, "distance floor must be positive");
  return std::pow(irr, p_irr) / std::pow(std::max(dist_m, epsilon_m), p_dist);
}

std::vector<ParkingChoice> rank_parking(const fusion::FusionView& view,
                                        std::span<const net::ParkingLot> lots,
                                        const ParkingQuery& query, double t_curr) {
  query.validate();
  if (lots.empty()) throw Error(ErrorKind::NoLots, "no parking lots to rank");
  std::vector<ParkingChoice> ranked;
  ranked.reserve(lots.size());
  for (const net::ParkingLot& lot : lots) {
    ParkingChoice choice;
    choice.lot = lot;
    choice.irradiance_used =
        lot.irradiance ? *lot.irradiance : view.node_irradiance(lot.node_id, t_curr);
    choice.distance_m =
        geo::great_circle_m(query.dest_lat, query.dest_lon, lot.lat, lot.lon);
    choice.score = parking_score(choice.irradiance_used, choice.distance_m, query.p_irr,
                                 query.p_dist, query.epsilon_m);
    ranked.push_back(choice);
  }
  std::sort(ranked.begin(), ranked.end(), [](const ParkingChoice& a, const ParkingChoice& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.lot.id < b.lot.id;
  });
  return ranked;
}

ParkingChoice select_parking(const fusion::FusionView& view,
                             std::span<const net::ParkingLot> lots,
                             const ParkingQuery& query, double t_curr) {
  return rank_parking(view, lots, query, t_curr).front();
}

}  // namespace score::parking
