#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "core/error.hpp"
#include "core/fusion.hpp"
#include "helpers.hpp"

using namespace score;
using fusion::FusionStore;
using fusion::IrradianceObservation;
using fusion::OfflineTable;

TEST_SUITE("fusion") {

TEST_CASE("temporal weight at zero elapsed time is exactly 1") {
  CHECK(fusion::temporal_weight(4000.0, 4000.0) == 1.0);
}

TEST_CASE("temporal weight matches the extended-precision oracle") {
  // dt = 100 h -> exp(-0.1), dt = 1000 h -> exp(-10)
  const double w100 = fusion::temporal_weight(4100.0, 4000.0);
  CHECK(w100 == doctest::Approx(0.904837).epsilon(1e-6));
  CHECK(std::abs(w100 - double(testutil::oracle_temporal_weight(4100.0L, 4000.0L, 100000.0L))) <
        1e-14);
  const double w1000 = fusion::temporal_weight(5000.0, 4000.0);
  CHECK(w1000 == doctest::Approx(4.53999e-5).epsilon(1e-5));
  CHECK(std::abs(w1000 - double(testutil::oracle_temporal_weight(5000.0L, 4000.0L, 100000.0L))) <
        1e-14);
}

TEST_CASE("temporal weight honors a custom denominator") {
  CHECK(fusion::temporal_weight(10.0, 0.0, 100.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("temporal weight rejects bad inputs") {
  CHECK_THROWS_AS(fusion::temporal_weight(100.0, 200.0), Error);  // future measurement
  CHECK_THROWS_AS(fusion::temporal_weight(100.0, -1.0), Error);
  CHECK_THROWS_AS(fusion::temporal_weight(100.0, 50.0, 0.0), Error);
  try {
    fusion::temporal_weight(100.0, 200.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("temporal weight is strictly decreasing and in (0, 1]") {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> dt_dist(0.0, 8000.0);
  std::vector<double> dts(10000);
  for (double& dt : dts) dt = dt_dist(rng);
  std::sort(dts.begin(), dts.end());
  double prev = 2.0;
  for (double dt : dts) {
    const double w = fusion::temporal_weight(10000.0, 10000.0 - dt);
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
    if (prev <= 1.0) CHECK(w <= prev);
    prev = w;
  }
  // strict decrease on well-separated points
  CHECK(fusion::temporal_weight(1000.0, 900.0) > fusion::temporal_weight(1000.0, 800.0));
}

TEST_CASE("fuse reproduces its defining examples") {
  CHECK(fusion::fuse(0.8, 0.3, 4000.0, 4000.0) == 0.8);            // a = 1
  CHECK(fusion::fuse(0.42, 0.42, 9999.0, 0.0) == 0.42);            // equal inputs
  CHECK(fusion::fuse(1.0, 0.0, 4100.0, 4000.0) ==
        doctest::Approx(0.904837).epsilon(1e-6));                  // a itself
}

TEST_CASE("fuse validates ranges") {
  CHECK_THROWS_AS(fusion::fuse(1.2, 0.5, 10.0, 0.0), Error);
  CHECK_THROWS_AS(fusion::fuse(0.5, -0.1, 10.0, 0.0), Error);
}

TEST_CASE("fuse stays inside the envelope of its inputs") {
  std::mt19937 rng(202);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  std::uniform_real_distribution<double> dt(0.0, 5000.0);
  for (int i = 0; i < 20000; ++i) {
    const double r_on = r(rng), r_off = r(rng);
    const double t_meas = dt(rng);
    const double t_curr = t_meas + dt(rng);
    const double fused = fusion::fuse(r_on, r_off, t_curr, t_meas);
    CHECK(fused >= std::min(r_on, r_off));
    CHECK(fused <= std::max(r_on, r_off));
  }
}

TEST_CASE("offline interpolation is exact at breakpoints and wraps at 24h") {
  OfflineTable table;
  table.add(1, 6.0, 0.2);
  table.add(1, 12.0, 0.9);
  table.add(1, 18.0, 0.4);

  CHECK(table.value_at(1, 6.0) == 0.2);
  CHECK(table.value_at(1, 12.0) == 0.9);
  CHECK(table.value_at(1, 18.0) == 0.4);
  CHECK(table.value_at(1, 9.0) == doctest::Approx(0.55).epsilon(1e-12));
  // wrap segment 18h -> 6h(+24): value at 0h is halfway
  CHECK(table.value_at(1, 0.0) == doctest::Approx(0.3).epsilon(1e-12));
  // continuity across midnight
  const double before = table.value_at(1, 23.999999);
  const double after = table.value_at(1, 0.000001);
  CHECK(before == doctest::Approx(after).epsilon(1e-4));
  // day offsets do not matter
  CHECK(table.value_at(1, 9.0 + 24.0 * 170) == doctest::Approx(table.value_at(1, 9.0)));
}

TEST_CASE("offline table with one breakpoint is constant") {
  OfflineTable table;
  table.add(3, 10.0, 0.6);
  CHECK(table.value_at(3, 0.0) == 0.6);
  CHECK(table.value_at(3, 13.37) == 0.6);
}

TEST_CASE("offline table validation") {
  OfflineTable table;
  table.add(1, 6.0, 0.2);
  CHECK_THROWS_AS(table.add(1, 6.0, 0.3), Error);    // duplicate hour
  CHECK_THROWS_AS(table.add(1, 24.0, 0.3), Error);   // hour out of range
  CHECK_THROWS_AS(table.add(1, 5.0, 1.5), Error);    // irradiance out of range
  CHECK_THROWS_AS(table.value_at(9, 0.0), Error);    // unknown node
  try {
    table.value_at(9, 0.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownNode);
  }
}

TEST_CASE("offline table file parsing") {
  std::istringstream in(
      "# table\n"
      "O 1 0 0.1\n"
      "O 1 12 0.9\n"
      "O 2 0 0.5\n");
  const OfflineTable table = fusion::parse_offline_table(in, "test");
  CHECK(table.value_at(1, 12.0) == 0.9);
  CHECK(table.value_at(2, 7.0) == 0.5);
  std::istringstream bad("O 1 0\n");
  CHECK_THROWS_AS(fusion::parse_offline_table(bad, "test"), Error);
}

TEST_CASE("node irradiance: offline fallback, fresh observation, calibration clamp") {
  OfflineTable table;
  table.add(1, 0.0, 0.6);
  table.add(2, 0.0, 0.0);
  FusionStore store(std::move(table));

  CHECK(store.view().node_irradiance(1, 4000.0) == 0.6);  // no observation

  store.ingest(IrradianceObservation{1, 1.0, 4000.0, "T9ABC"});
  CHECK(store.view().node_irradiance(1, 4000.0) == 1.0);  // a = 1

  store.ingest(IrradianceObservation{2, 1.0, 4000.0, "T9ABC"});
  const double aged = store.view().node_irradiance(2, 4100.0);
  CHECK(aged == doctest::Approx(0.904837).epsilon(1e-6));

  store.calibrate(0.5, 0.6);  // factor 1.2: 1.2 * 0.904837 > 1 clamps to 1
  CHECK(store.view().node_irradiance(2, 4100.0) == 1.0);
  store.calibrate(0.5, 0.25);  // factor 0.5 scales below the clamp
  CHECK(store.view().node_irradiance(2, 4100.0) ==
        doctest::Approx(0.5 * 0.904837).epsilon(1e-6));
  store.calibrate(0.5, 1.0);  // factor 2.0
  CHECK(store.view().node_irradiance(1, 4000.0) == 1.0);  // clamped to 1
}

TEST_CASE("node irradiance stays in [0,1] for any calibration factor") {
  std::mt19937 rng(303);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  std::uniform_real_distribution<double> factor_seed(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    OfflineTable table;
    table.add(1, 0.0, r(rng));
    FusionStore store(std::move(table));
    if (i % 2 == 0) store.ingest(IrradianceObservation{1, r(rng), 1000.0 * r(rng), "S"});
    store.calibrate(std::max(1e-3, factor_seed(rng)), factor_seed(rng));
    const double v = store.view().node_irradiance(1, 1000.0 + 500.0 * r(rng));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("edge irradiance is the mean of the endpoints") {
  OfflineTable table;
  table.add(1, 0.0, 0.4);
  table.add(2, 0.0, 0.8);
  table.add(3, 0.0, 0.55);
  FusionStore store(std::move(table));
  const auto view = store.view();
  net::Edge e12{1, 2, 100.0, 50.0};
  net::Edge e33{3, 3, 100.0, 50.0};
  CHECK(view.edge_irradiance(e12, 0.0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(view.edge_irradiance(e33, 0.0) == 0.55);
  net::Edge unknown{1, 9, 100.0, 50.0};
  CHECK_THROWS_AS(view.edge_irradiance(unknown, 0.0), Error);
}

TEST_CASE("ingest keeps the most recent observation") {
  FusionStore store(testutil::flat_offline(
      net::RoadNetwork::build({{1, 0, 0, ""}}, {}, {}), 0.0));
  CHECK(store.ingest(IrradianceObservation{1, 0.5, 100.0, "A"}) ==
        fusion::IngestOutcome::Accepted);
  CHECK(store.ingest(IrradianceObservation{1, 0.9, 50.0, "B"}) ==
        fusion::IngestOutcome::Superseded);
  CHECK(store.view().observations().at(1).r_on == 0.5);  // unchanged
  // ties replace
  CHECK(store.ingest(IrradianceObservation{1, 0.7, 100.0, "C"}) ==
        fusion::IngestOutcome::Accepted);
  CHECK(store.view().observations().at(1).r_on == 0.7);
}

TEST_CASE("ingest of a random sequence keeps the max-time observation") {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> t(0.0, 1000.0);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    OfflineTable table;
    table.add(1, 0.0, 0.0);
    FusionStore store(std::move(table));
    double max_t = -1.0;
    for (int i = 0; i < 10; ++i) {
      IrradianceObservation obs{1, r(rng), t(rng), "S"};
      store.ingest(obs);
      max_t = std::max(max_t, obs.t_meas);
    }
    CHECK(store.view().observations().at(1).t_meas == max_t);
  }
}

TEST_CASE("ingest outcome is permutation-insensitive") {
  std::mt19937 rng(505);
  std::uniform_real_distribution<double> t(0.0, 1000.0);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  std::uniform_int_distribution<net::NodeId> node(1, 4);
  std::vector<IrradianceObservation> multiset;
  for (int i = 0; i < 24; ++i)
    multiset.push_back(IrradianceObservation{node(rng), r(rng), t(rng), "S"});

  OfflineTable proto;
  for (net::NodeId id = 1; id <= 4; ++id) proto.add(id, 0.0, 0.0);

  std::map<net::NodeId, double> expected_max;
  for (const auto& obs : multiset)
    expected_max[obs.node_id] =
        std::max(obs.t_meas, expected_max.count(obs.node_id) ? expected_max[obs.node_id]
                                                             : -1.0);

  for (int perm = 0; perm < 30; ++perm) {
    std::shuffle(multiset.begin(), multiset.end(), rng);
    OfflineTable table = proto;
    FusionStore store(std::move(table));
    for (const auto& obs : multiset) store.ingest(obs);
    const auto view = store.view();
    for (const auto& [id, max_t] : expected_max) {
      CHECK(view.observations().at(id).t_meas == max_t);
      // the stored r_on belongs to a max-time element of the multiset
      bool matches = false;
      for (const auto& obs : multiset)
        if (obs.node_id == id && obs.t_meas == max_t &&
            obs.r_on == view.observations().at(id).r_on)
          matches = true;
      CHECK(matches);
    }
  }
}

TEST_CASE("ingest validates observation fields") {
  FusionStore store;
  CHECK_THROWS_AS(store.ingest(IrradianceObservation{1, 1.5, 0.0, "S"}), Error);
  CHECK_THROWS_AS(store.ingest(IrradianceObservation{1, -0.1, 0.0, "S"}), Error);
  CHECK_THROWS_AS(store.ingest(IrradianceObservation{1, 0.5, -1.0, "S"}), Error);
  CHECK_THROWS_AS(store.ingest(IrradianceObservation{0, 0.5, 1.0, "S"}), Error);
}

TEST_CASE("calibration ratio and clamping") {
  FusionStore store;
  auto result = store.calibrate(0.5, 0.5);
  CHECK(result.applied);
  CHECK(result.factor == 1.0);
  result = store.calibrate(0.5, 0.25);
  CHECK(result.factor == 0.5);  // exactly at the lower clamp
  result = store.calibrate(0.1, 0.9);
  CHECK(result.factor == 2.0);  // clamped from 9
  result = store.calibrate(0.9, 0.1);
  CHECK(result.factor == 0.5);  // clamped from 1/9
}

TEST_CASE("calibration with zero prediction is a signaled no-op") {
  FusionStore store;
  store.calibrate(0.5, 0.6);
  const auto result = store.calibrate(0.0, 0.9);
  CHECK_FALSE(result.applied);
  CHECK(result.factor == doctest::Approx(1.2).epsilon(1e-12));
  CHECK_THROWS_AS(store.calibrate(1.5, 0.5), Error);
  CHECK_THROWS_AS(store.calibrate(0.5, 1.5), Error);
}

TEST_CASE("observation dump round-trips through the B record parser") {
  OfflineTable table;
  table.add(1, 0.0, 0.0);
  table.add(2, 0.0, 0.0);
  FusionStore store(std::move(table));
  store.ingest(IrradianceObservation{2, 0.75, 4350.5, "T9ABC"});
  store.ingest(IrradianceObservation{1, 0.25, 4351.25, "T9XYZ-1"});
  std::ostringstream out;
  fusion::write_observations(store.view(), out);

  testutil::TempDir dir;
  const auto path = dir.write("obs.txt", out.str());
  const auto parsed = fusion::load_observations(path);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].node_id == 1);
  CHECK(parsed[0].r_on == 0.25);
  CHECK(parsed[0].t_meas == 4351.25);
  CHECK(parsed[0].source == "T9XYZ-1");
  CHECK(parsed[1].node_id == 2);
}

TEST_CASE("concurrent readers and writers do not tear") {
  OfflineTable table;
  for (net::NodeId id = 1; id <= 4; ++id) table.add(id, 0.0, 0.5);
  FusionStore store(std::move(table));
  std::atomic<bool> failed{false};
  std::vector<std::thread> threads;
  for (int w = 0; w < 2; ++w)
    threads.emplace_back([&store, w] {
      for (int i = 0; i < 2000; ++i)
        store.ingest(IrradianceObservation{net::NodeId(1 + (i % 4)),
                                           (i % 100) / 100.0, double(i + w), "S"});
    });
  for (int r = 0; r < 3; ++r)
    threads.emplace_back([&store, &failed] {
      for (int i = 0; i < 2000; ++i) {
        const double v = store.view().node_irradiance(net::NodeId(1 + (i % 4)), 5000.0);
        if (v < 0.0 || v > 1.0) failed = true;
      }
    });
  for (auto& t : threads) t.join();
  CHECK_FALSE(failed.load());
}

}  // TEST_SUITE
