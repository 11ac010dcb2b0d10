#include <doctest.h>

#include <algorithm>
#include <random>

#include "core/error.hpp"
#include "core/geo.hpp"
#include "core/parking.hpp"
#include "helpers.hpp"

using namespace score;
using parking::ParkingQuery;
using parking::parking_score;

namespace {

// Places a lot `meters` due north of the destination.
net::ParkingLot lot_at(std::uint32_t id, double dest_lat, double dest_lon, double meters,
                       double irradiance) {
  const double dlat = meters / 111194.92664455873;  // meters per degree of latitude
  net::ParkingLot lot;
  lot.id = id;
  lot.node_id = 1;
  lot.lat = dest_lat + dlat;
  lot.lon = dest_lon;
  lot.irradiance = irradiance;
  return lot;
}

struct OracleChoice {
  std::uint32_t id = 0;
  double score = -1.0;
};

OracleChoice exhaustive_best(const std::vector<net::ParkingLot>& lots, double dest_lat,
                             double dest_lon, double p_irr, double p_dist, double eps) {
  OracleChoice best;
  for (const auto& lot : lots) {
    const double dist = geo::great_circle_m(dest_lat, dest_lon, lot.lat, lot.lon);
    const double s = std::pow(*lot.irradiance, p_irr) / std::pow(std::max(dist, eps), p_dist);
    if (s > best.score || (s == best.score && lot.id < best.id)) best = {lot.id, s};
  }
  return best;
}

}  // namespace

TEST_SUITE("parking") {

TEST_CASE("score is the irradiance/distance ratio") {
  CHECK(parking_score(0.9, 300.0, 1.0, 1.0, 1.0) == doctest::Approx(0.003).epsilon(1e-12));
  CHECK(parking_score(0.5, 100.0, 1.0, 1.0, 1.0) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(parking_score(0.9, 0.0, 1.0, 1.0, 1.0) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("score validates its inputs") {
  CHECK_THROWS_AS(parking_score(1.5, 10.0, 1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(parking_score(0.5, -1.0, 1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(parking_score(0.5, 10.0, 0.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(parking_score(0.5, 10.0, 1.0, 1.0, 0.0), Error);
}

TEST_CASE("worked two-lot example: ratio favors B, cubed irradiance favors A") {
  const double dest_lat = 43.85, dest_lon = 18.40;
  const std::vector<net::ParkingLot> lots = {
      lot_at(1, dest_lat, dest_lon, 300.0, 0.9),  // A
      lot_at(2, dest_lat, dest_lon, 100.0, 0.5),  // B
  };
  fusion::FusionView view;  // overrides make the store irrelevant

  ParkingQuery ratio{dest_lat, dest_lon, 1.0, 1.0, 1.0};
  const auto plain = parking::select_parking(view, lots, ratio, 0.0);
  CHECK(plain.lot.id == 2);
  CHECK(plain.score == doctest::Approx(0.005).epsilon(1e-6));

  ParkingQuery cubed{dest_lat, dest_lon, 3.0, 1.0, 1.0};
  const auto sunny = parking::select_parking(view, lots, cubed, 0.0);
  CHECK(sunny.lot.id == 1);
  CHECK(sunny.score == doctest::Approx(0.729 / 300.0).epsilon(1e-6));
}

TEST_CASE("single lot wins regardless of score") {
  const std::vector<net::ParkingLot> lots = {lot_at(9, 43.85, 18.40, 5000.0, 0.0)};
  fusion::FusionView view;
  const auto choice = parking::select_parking(view, lots, ParkingQuery{43.85, 18.40}, 0.0);
  CHECK(choice.lot.id == 9);
}

TEST_CASE("empty lot list raises") {
  fusion::FusionView view;
  CHECK_THROWS_AS(
      parking::select_parking(view, std::vector<net::ParkingLot>{}, ParkingQuery{}, 0.0),
      Error);
}

TEST_CASE("selection equals the exhaustive argmax on random lot sets") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> irr(0.0, 1.0);
  std::uniform_real_distribution<double> dist(5.0, 2000.0);
  std::uniform_int_distribution<int> count(1, 20);
  fusion::FusionView view;
  const double dest_lat = 43.85, dest_lon = 18.40;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<net::ParkingLot> lots;
    const int n = count(rng);
    for (int i = 0; i < n; ++i)
      lots.push_back(lot_at(std::uint32_t(i + 1), dest_lat, dest_lon, dist(rng), irr(rng)));
    for (double p_irr : {0.0, 1.0, 3.0}) {
      const double p_dist = 1.0;
      ParkingQuery q{dest_lat, dest_lon, p_irr, p_dist, 1.0};
      const auto choice = parking::select_parking(view, lots, q, 0.0);
      const auto oracle = exhaustive_best(lots, dest_lat, dest_lon, p_irr, p_dist, 1.0);
      CHECK(choice.lot.id == oracle.id);
      CHECK(choice.score == doctest::Approx(oracle.score).epsilon(1e-12));
    }
  }
}

TEST_CASE("exponent degenerate modes: nearest lot and sunniest lot") {
  std::mt19937 rng(62);
  std::uniform_real_distribution<double> irr(0.05, 1.0);
  std::uniform_real_distribution<double> dist(5.0, 2000.0);
  fusion::FusionView view;
  const double dest_lat = 43.85, dest_lon = 18.40;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<net::ParkingLot> lots;
    for (int i = 0; i < 10; ++i)
      lots.push_back(lot_at(std::uint32_t(i + 1), dest_lat, dest_lon, dist(rng), irr(rng)));

    ParkingQuery nearest{dest_lat, dest_lon, 0.0, 1.0, 1.0};
    const auto near_choice = parking::select_parking(view, lots, nearest, 0.0);
    const auto by_dist = *std::min_element(
        lots.begin(), lots.end(), [&](const auto& a, const auto& b) {
          return geo::great_circle_m(dest_lat, dest_lon, a.lat, a.lon) <
                 geo::great_circle_m(dest_lat, dest_lon, b.lat, b.lon);
        });
    CHECK(near_choice.lot.id == by_dist.id);

    ParkingQuery sunniest{dest_lat, dest_lon, 1.0, 0.0, 1.0};
    const auto sun_choice = parking::select_parking(view, lots, sunniest, 0.0);
    double best_irr = -1.0;
    std::uint32_t best_id = 0;
    for (const auto& lot : lots)
      if (*lot.irradiance > best_irr) {
        best_irr = *lot.irradiance;
        best_id = lot.id;
      }
    CHECK(sun_choice.lot.id == best_id);
  }
}

TEST_CASE("scaling all distances preserves the winner") {
  std::mt19937 rng(63);
  std::uniform_real_distribution<double> irr(0.0, 1.0);
  std::uniform_real_distribution<double> dist(50.0, 2000.0);
  fusion::FusionView view;
  const double dest_lat = 43.85, dest_lon = 18.40;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<net::ParkingLot> lots, scaled;
    for (int i = 0; i < 8; ++i) {
      const double d = dist(rng);
      const double r = irr(rng);
      lots.push_back(lot_at(std::uint32_t(i + 1), dest_lat, dest_lon, d, r));
      scaled.push_back(lot_at(std::uint32_t(i + 1), dest_lat, dest_lon, 3.0 * d, r));
    }
    ParkingQuery q{dest_lat, dest_lon, 1.0, 1.0, 1.0};
    CHECK(parking::select_parking(view, lots, q, 0.0).lot.id ==
          parking::select_parking(view, scaled, q, 0.0).lot.id);
  }
}

TEST_CASE("raising the winner's irradiance never demotes it") {
  std::mt19937 rng(64);
  std::uniform_real_distribution<double> irr(0.0, 0.8);
  std::uniform_real_distribution<double> dist(50.0, 2000.0);
  fusion::FusionView view;
  const double dest_lat = 43.85, dest_lon = 18.40;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<net::ParkingLot> lots;
    for (int i = 0; i < 8; ++i)
      lots.push_back(lot_at(std::uint32_t(i + 1), dest_lat, dest_lon, dist(rng), irr(rng)));
    ParkingQuery q{dest_lat, dest_lon, 1.0, 1.0, 1.0};
    const auto before = parking::select_parking(view, lots, q, 0.0);
    for (auto& lot : lots)
      if (lot.id == before.lot.id)
        lot.irradiance = std::min(1.0, *lot.irradiance + 0.15);
    const auto after = parking::select_parking(view, lots, q, 0.0);
    CHECK(after.lot.id == before.lot.id);
  }
}

TEST_CASE("ties break toward the smaller lot id") {
  fusion::FusionView view;
  const double dest_lat = 43.85, dest_lon = 18.40;
  std::vector<net::ParkingLot> lots = {
      lot_at(7, dest_lat, dest_lon, 100.0, 0.5),
      lot_at(3, dest_lat, dest_lon, 100.0, 0.5),
  };
  const auto choice =
      parking::select_parking(view, lots, ParkingQuery{dest_lat, dest_lon}, 0.0);
  CHECK(choice.lot.id == 3);
}

TEST_CASE("store-backed lots read the fusion store at their node") {
  std::istringstream in("N 1 43.85 18.40\nN 2 43.86 18.41\n");
  const auto network = net::parse_network(in, "net");
  fusion::OfflineTable table;
  table.add(1, 0.0, 0.25);
  table.add(2, 0.0, 0.75);
  fusion::FusionStore store(std::move(table));

  net::ParkingLot stored;  // no override: node 2's fused value
  stored.id = 1;
  stored.node_id = 2;
  stored.lat = 43.851;
  stored.lon = 18.401;
  net::ParkingLot overridden = stored;
  overridden.id = 2;
  overridden.node_id = 1;
  overridden.irradiance = 0.95;

  const std::vector<net::ParkingLot> lots = {stored, overridden};
  const auto ranked =
      parking::rank_parking(store.view(), lots, ParkingQuery{43.851, 18.401}, 0.0);
  REQUIRE(ranked.size() == 2);
  for (const auto& choice : ranked) {
    if (choice.lot.id == 1) CHECK(choice.irradiance_used == 0.75);
    if (choice.lot.id == 2) CHECK(choice.irradiance_used == 0.95);
  }
}

}  // TEST_SUITE
