#pragma once

#include <span>
#include <vector>

#include "core/fusion.hpp"
#include "core/network.hpp"

namespace score::parking {

struct ParkingQuery {
  double dest_lat = 0.0;
  double dest_lon = 0.0;
  double p_irr = 1.0;      // irradiance emphasis exponent
  double p_dist = 1.0;     // distance emphasis exponent
  double epsilon_m = 1.0;  // distance floor guarding the ratio at 0 m

  void validate() const;  // throws Error(Validation)
};

// irr^p_irr / max(dist_m, epsilon_m)^p_dist
double parking_score(double irr, double dist_m, double p_irr, double p_dist,
                     double epsilon_m);

struct ParkingChoice {
  net::ParkingLot lot;
  double score = 0.0;
  double irradiance_used = 0.0;
  double distance_m = 0.0;
};

// All lots scored against the destination, best first (ties toward the
// smaller lot id). Lot irradiance comes from the fusion store at the lot's
// node unless the lot carries a static override.
std::vector<ParkingChoice> rank_parking(const fusion::FusionView& view,
                                        std::span<const net::ParkingLot> lots,
                                        const ParkingQuery& query, double t_curr);

// Front of the ranking; throws Error(NoLots) when lots is empty.
ParkingChoice select_parking(const fusion::FusionView& view,
                             std::span<const net::ParkingLot> lots,
                             const ParkingQuery& query, double t_curr);

}  // namespace score::parking
