#include <doctest.h>

#include <fstream>
#include <sstream>

#include "core/engine.hpp"
#include "core/error.hpp"
#include "core/util.hpp"
#include "helpers.hpp"

using namespace score;
using app::Engine;

namespace {

const char* kNetworkText =
    "N 1 43.85 18.40\nN 2 43.86 18.41\nN 3 43.84 18.41\nN 4 43.85 18.42\n"
    "E 1 2 1\nE 2 4 1\nE 1 3 1\nE 3 4 3\nE 1 4 5\n";

const char* kOfflineText = "O 1 0 0.5\nO 2 0 0.5\nO 3 0 0.5\nO 4 0 0.5\n";

void setup_diamond(Engine& engine, const testutil::TempDir& dir) {
  engine.load_network_file(dir.write("net.txt", kNetworkText));
  engine.load_offline_file(dir.write("offline.txt", kOfflineText));
  engine.set_weight_config(routing::WeightConfig{1.0, 0.0, 0.001});
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("canonical number formatting always shows a decimal point") {
  CHECK(util::format_number(0.0) == "0.0");
  CHECK(util::format_number(2.0) == "2.0");
  CHECK(util::format_number(0.005) == "0.005");
  CHECK(util::format_number(110.5) == "110.5");
  CHECK(util::format_number(-3.25) == "-3.25");
}

TEST_CASE("route and park answers match the library calls they wrap") {
  testutil::TempDir dir;
  Engine engine;
  setup_diamond(engine, dir);
  engine.load_lots_file(dir.write("lots.txt",
                                  "P 1 1 43.852697971328635 18.40 0.9\n"
                                  "P 2 1 43.85089932377621 18.40 0.5\n"));

  const auto plan = engine.route(1, 4, 100.0);
  CHECK(Engine::route_answer_line(plan) == "1 2 4 2.0");
  CHECK(engine.answer_query("ROUTE 1 4 100") == "1 2 4 2.0");
  CHECK(engine.answer_query("ROUTE 1 1 100") == "1 0.0");

  const auto ranked = engine.park(43.85, 18.40, 100.0);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked.front().lot.id == 2);  // 0.5/100 beats 0.9/300
  const auto answer = engine.answer_query("PARK 43.85 18.40 100");
  REQUIRE(answer.has_value());
  CHECK(*answer == Engine::park_answer_line(ranked.front()));

  engine.set_parking_params(3.0, 1.0, 1.0);
  CHECK(engine.park(43.85, 18.40, 100.0).front().lot.id == 1);
}

TEST_CASE("query protocol errors") {
  testutil::TempDir dir;
  Engine engine;
  setup_diamond(engine, dir);

  CHECK(engine.answer_query("PARK") == "ERR usage");
  CHECK(engine.answer_query("PARK 43.85 18.40 100") == "ERR no-lots");
  CHECK(engine.answer_query("ROUTE 1 4") == "ERR usage");
  CHECK(engine.answer_query("ROUTE one 4 100") == "ERR usage");
  CHECK(engine.answer_query("ROUTE 1 4 -5") == "ERR usage");
  CHECK(engine.answer_query("FLY 1 4 100") == "ERR usage");
  CHECK(engine.answer_query("ROUTE 1 99 100") == "ERR unknown-node");
  CHECK(engine.answer_query("ROUTE 4 1 100") == "ERR no-path");
  CHECK_FALSE(engine.answer_query("").has_value());
  CHECK_FALSE(engine.answer_query("   \r").has_value());
}

TEST_CASE("ingest protocol answers and cumulative totals") {
  testutil::TempDir dir;
  Engine engine;
  setup_diamond(engine, dir);

  CHECK(engine.answer_ingest("T9ABC>SCORE:!4351.00N/01824.00E#IRR=0.9,T=100") ==
        "OK accepted");
  CHECK(engine.answer_ingest("T9ABC>SCORE:!4351.00N/01824.00E#IRR=0.4,T=50") ==
        "OK superseded");
  CHECK(engine.answer_ingest("nonsense") == "ERR malformed-header");
  CHECK(engine.answer_ingest("T9ABC>SCORE:!4351.00N/01824.00E#IRR=1.4,T=50") ==
        "ERR out-of-range");
  CHECK_FALSE(engine.answer_ingest("").has_value());

  const auto totals = engine.ingest_totals();
  CHECK(totals.accepted == 1);
  CHECK(totals.superseded == 1);
  CHECK(totals.rejected == 2);

  // an engine without a network answers with a data error, not a crash
  Engine bare;
  CHECK(bare.answer_ingest("T9ABC>SCORE:!4351.00N/01824.00E#IRR=0.9,T=100") == "ERR data");
}

TEST_CASE("config file: key=value plus inline records") {
  testutil::TempDir dir;
  const auto offline = dir.write("offline.txt", kOfflineText);
  const auto config = dir.write("score.cfg",
                                "# engine config\n"
                                "N 1 43.85 18.40\nN 2 43.86 18.41\nN 3 43.84 18.41\n"
                                "N 4 43.85 18.42\n"
                                "E 1 2 1\nE 2 4 1\nE 1 3 1\nE 3 4 3\nE 1 4 5\n"
                                "P 7 4 43.851 18.401 0.8\n"
                                "B 2 0.9 40 T9ABC\n"
                                "offline=offline.txt\n"
                                "alpha=1\n"
                                "beta=0\n"
                                "p_irr = 3\n"
                                "replan_interval_h=0.5\n"
                                "decay_denominator=50000\n"
                                "ingest_port=0\n"
                                "query_port=0\n");
  Engine engine;
  engine.load_config_file(config);
  CHECK(engine.network().nodes().size() == 4);
  CHECK(engine.lots().size() == 1);
  CHECK(engine.config().weights.alpha == 1.0);
  CHECK(engine.config().weights.beta == 0.0);
  CHECK(engine.config().p_irr == 3.0);
  CHECK(engine.config().replan_interval_h == 0.5);
  CHECK(engine.config().decay_denominator == 50000.0);
  CHECK(engine.store().decay_denominator() == 50000.0);
  CHECK(engine.config().ingest_port == 0);
  CHECK(engine.config().query_port == 0);
  CHECK(engine.store().view().observations().at(2).r_on == 0.9);
  CHECK(engine.answer_query("ROUTE 1 4 100") == "1 2 4 2.0");
}

TEST_CASE("config file conflicts and unknown keys are rejected") {
  testutil::TempDir dir;
  const auto net_file = dir.write("net.txt", kNetworkText);
  Engine engine;

  const auto both = dir.write("both.cfg",
                              "N 1 43.85 18.40\n"
                              "network=net.txt\n");
  CHECK_THROWS_AS(engine.load_config_file(both), Error);

  const auto unknown = dir.write("unknown.cfg", "turbo=yes\n");
  CHECK_THROWS_AS(engine.load_config_file(unknown), Error);

  const auto bad_line = dir.write("bad.cfg", "this is not a record\n");
  CHECK_THROWS_AS(engine.load_config_file(bad_line), Error);

  const auto bad_port = dir.write("port.cfg", "ingest_port=99999\n");
  CHECK_THROWS_AS(engine.load_config_file(bad_port), Error);
}

TEST_CASE("route readiness checks name the gap") {
  testutil::TempDir dir;
  Engine engine;
  CHECK_THROWS_AS(engine.require_route_ready(), Error);
  engine.load_network_file(dir.write("net.txt", kNetworkText));
  CHECK_THROWS_AS(engine.require_route_ready(), Error);
  engine.load_offline_file(dir.write("partial.txt", "O 1 0 0.5\n"));
  try {
    engine.require_route_ready();
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("node 2") != std::string::npos);
  }
  engine.load_offline_file(dir.write("full.txt", kOfflineText));
  CHECK_NOTHROW(engine.require_route_ready());
}

TEST_CASE("replan and geojson are reachable through the engine") {
  testutil::TempDir dir;
  Engine engine;
  setup_diamond(engine, dir);
  const auto plan = engine.route(1, 4, 100.0);
  const auto unchanged = engine.replan(plan, 1, 100.1, 0.25);
  CHECK_FALSE(unchanged.replanned);
  const auto moved = engine.replan(plan, 2, 100.5, 0.25);
  CHECK(moved.replanned);
  CHECK(moved.plan.nodes == std::vector<net::NodeId>{2, 4});
  const std::string json = engine.route_geojson(plan);
  CHECK(json.find("FeatureCollection") != std::string::npos);
}

TEST_CASE("observation dump from the engine reloads cleanly") {
  testutil::TempDir dir;
  Engine engine;
  setup_diamond(engine, dir);
  engine.ingest_observation(fusion::IrradianceObservation{2, 0.75, 4350.5, "T9ABC"});
  engine.ingest_observation(fusion::IrradianceObservation{1, 0.25, 4351.0, ""});
  const auto dump = dir.path("dump.txt");
  engine.dump_observations(dump);

  Engine fresh;
  setup_diamond(fresh, dir);
  fresh.load_observations_file(dump);
  CHECK(fresh.store().view().observations().at(2).r_on == 0.75);
  CHECK(fresh.store().view().observations().at(1).source == "-");
}

TEST_CASE("calibration flows through to query results") {
  testutil::TempDir dir;
  Engine engine;
  setup_diamond(engine, dir);
  const auto result = engine.calibrate(0.5, 0.25);
  CHECK(result.applied);
  CHECK(result.factor == 0.5);
  CHECK(engine.node_irradiance(1, 100.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(engine.edge_irradiance(1, 2, 100.0) == doctest::Approx(0.25).epsilon(1e-12));
}

}  // TEST_SUITE
