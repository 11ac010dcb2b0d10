#include <doctest.h>

#include <cmath>
#include <random>

#include "core/geo.hpp"

using score::geo::great_circle_m;

TEST_SUITE("geo") {

TEST_CASE("zero distance at identical points") {
  CHECK(great_circle_m(43.85, 18.40, 43.85, 18.40) == 0.0);
}

TEST_CASE("one degree of latitude is about 111.2 km") {
  const double d = great_circle_m(0.0, 0.0, 1.0, 0.0);
  CHECK(d == doctest::Approx(111194.9).epsilon(1e-3));
}

TEST_CASE("symmetry and positivity over random pairs") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> lat(-80.0, 80.0);
  std::uniform_real_distribution<double> lon(-179.0, 179.0);
  for (int i = 0; i < 500; ++i) {
    const double a1 = lat(rng), o1 = lon(rng), a2 = lat(rng), o2 = lon(rng);
    const double d12 = great_circle_m(a1, o1, a2, o2);
    const double d21 = great_circle_m(a2, o2, a1, o1);
    CHECK(d12 == doctest::Approx(d21).epsilon(1e-12));
    CHECK(d12 >= 0.0);
  }
}

TEST_CASE("mirrored longitudes are exactly equidistant") {
  const double east = great_circle_m(43.85, 0.0, 43.85, 0.01);
  const double west = great_circle_m(43.85, 0.0, 43.85, -0.01);
  CHECK(east == west);
}

}  // TEST_SUITE
