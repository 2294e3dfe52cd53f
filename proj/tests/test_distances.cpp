#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chargecast/distances.hpp"
#include "chargecast/errors.hpp"
#include "support.hpp"

using namespace chargecast;
using namespace chargecast::distances;

namespace {

std::vector<Zone> row_of_zones(const std::vector<std::string>& ids) {
  std::vector<Zone> zones;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const double x = 4.30 + 0.02 * static_cast<double>(k);
    zones.push_back(testing::zone(ids[k], testing::rect(x, 50.80, x + 0.015, 50.81)));
  }
  return zones;
}

// Fails the first `failures` calls for every pair, then answers 1 km.
class FlakyBackend final : public RoutingBackend {
 public:
  explicit FlakyBackend(int failures) : failures_(failures) {}
  double route_km(const RouteQuery& q) const override {
    if (q.origin_zone == "bad") throw BackendFailure("always down");
    if (calls_++ < failures_) throw BackendFailure("transient");
    return 1.0;
  }
  std::string name() const override { return "flaky"; }
  int calls() const { return calls_; }

 private:
  int failures_;
  mutable std::atomic<int> calls_{0};
};

class NegativeBackend final : public RoutingBackend {
 public:
  double route_km(const RouteQuery&) const override { return -1.0; }
  std::string name() const override { return "negative"; }
};

}  // namespace

TEST_CASE("offline routing is haversine times the detour index") {
  const GeoPoint a{4.35, 50.84}, b{4.40, 50.86};
  CHECK(offline_route_km(a, b, {}) == doctest::Approx(geometry::haversine_km(a, b) * 1.417).epsilon(1e-15));
  CHECK(offline_route_km(a, b, {1.0}) == geometry::haversine_km(a, b));
  CHECK(offline_route_km(a, a, {}) == 0.0);
  CHECK_THROWS_AS(OfflineBackend({0.9}), ConfigError);
}

TEST_CASE("weekday names") {
  CHECK(weekday_from_string("Monday") == Weekday::Monday);
  CHECK(weekday_from_string("fri") == Weekday::Friday);
  CHECK(std::string(to_string(Weekday::Sunday)) == "sunday");
  CHECK_THROWS_AS(weekday_from_string("someday"), ConfigError);
}

TEST_CASE("fixture replays recorded routes without symmetrising") {
  const auto fx = FixtureBackend::load(std::string(CHARGECAST_DATA_DIR) + "/table1_routes.json");
  const std::vector<std::string> ids{"Altitude 100", "Boondael", "Vivier d'oie", "Université", "Observatoire"};
  const auto zones = row_of_zones(ids);
  const auto m = build_distance_matrix(zones, fx, {Weekday::Monday, 7});
  CHECK(m.zone_ids == ids);
  CHECK(m.km(0, 1) == 5.937);
  CHECK(m.km(1, 0) == 5.616);
  CHECK(m.km(2, 3) == 6.478);
  CHECK(m.km(3, 2) == 7.609);
  CHECK(m.km(4, 0) == 3.579);
  for (std::size_t i = 0; i < ids.size(); ++i) CHECK(m.km(i, i) == 0.0);
  int asymmetric = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) asymmetric += m.km(i, j) != m.km(j, i);
  }
  CHECK(asymmetric == 10);
}

TEST_CASE("fixture parsing") {
  CHECK_THROWS_AS(FixtureBackend::parse("{}"), SchemaError);
  CHECK_THROWS_AS(FixtureBackend::parse(R"({"pairs":[{"o":"a","d":"b","km":-2}]})"), SchemaError);
  CHECK_THROWS_AS(FixtureBackend::parse(R"({"pairs":[{"o":"a","km":2}]})"), SchemaError);
  const auto fx = FixtureBackend::parse(R"({"pairs":[{"o":"a","d":"b","km":2}]})");
  const auto zones = row_of_zones({"a", "b"});
  CHECK_THROWS_AS(build_distance_matrix(zones, fx, {}, {1, 0, {}}), BackendFailure);
}

TEST_CASE("builder retries and reports every failed pair") {
  SUBCASE("transient failures recover within the retry limit") {
    const auto zones = row_of_zones({"a", "b"});
    FlakyBackend flaky(2);
    const auto m = build_distance_matrix(zones, flaky, {}, {1, 3, {}});
    CHECK(m.km(0, 1) == 1.0);
    CHECK(m.km(1, 0) == 1.0);
  }
  SUBCASE("exhausted retries") {
    const auto zones = row_of_zones({"a", "bad", "c"});
    FlakyBackend flaky(0);
    try {
      build_distance_matrix(zones, flaky, {}, {3, 2, {}});
      FAIL("expected BackendFailure");
    } catch (const BackendFailure& e) {
      REQUIRE(e.pairs().size() == 2);
      CHECK(e.pairs()[0].origin == 1);
      CHECK(e.pairs()[0].dest == 0);
      CHECK(e.pairs()[1].dest == 2);
      CHECK(e.category() == ErrorCategory::Backend);
    }
  }
  SUBCASE("invalid distances count as failures") {
    CHECK_THROWS_AS(build_distance_matrix(row_of_zones({"a", "b"}), NegativeBackend{}, {}, {1, 0, {}}),
                    BackendFailure);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(build_distance_matrix({}, OfflineBackend{}, {}), PreconditionViolation);
    CHECK_THROWS_AS(build_distance_matrix(row_of_zones({"a"}), OfflineBackend{}, {Weekday::Monday, 24}),
                    ConfigError);
  }
}

TEST_CASE("matrix does not depend on concurrency") {
  std::vector<std::string> ids;
  for (int k = 0; k < 12; ++k) ids.push_back("z" + std::to_string(k));
  const auto zones = row_of_zones(ids);
  const OfflineBackend offline;
  const auto one = build_distance_matrix(zones, offline, {}, {1, 0, {}});
  const auto many = build_distance_matrix(zones, offline, {}, {8, 0, {}});
  CHECK(one.km == many.km);
  const auto c0 = geometry::centroid(zones[3].polygon);
  const auto c1 = geometry::centroid(zones[7].polygon);
  CHECK(one.km(3, 7) == offline_route_km(c0, c1, {}));
}

TEST_CASE("diagonal is the sampled intra-zone distance") {
  const std::vector<Zone> zones{testing::zone("A", testing::km_square(4.35, 50.84, 1.0)),
                                testing::zone("B", testing::km_square(4.37, 50.84, 2.0))};
  DistanceMatrix m;
  m.zone_ids = {"A", "B"};
  m.km = Matrix(2, 9.0);
  const geometry::McConfig mc{20000, 42};
  const auto filled = fill_diagonal(m, zones, mc, {});
  CHECK(filled.km(0, 1) == 9.0);
  const double expect_a =
      geometry::mc_mean_pairwise_distance_km(zones[0].polygon, {mc.n_samples, zone_seed(42, "A")}) * 1.417;
  CHECK(filled.km(0, 0) == expect_a);
  CHECK(filled.km(1, 1) / filled.km(0, 0) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(zone_seed(42, "A") == (42ULL ^ geometry::stable_hash64("A")));

  DistanceMatrix wrong;
  wrong.km = Matrix(3);
  CHECK_THROWS_AS(fill_diagonal(wrong, zones, mc, {}), DimensionMismatch);

  std::vector<Zone> bad = zones;
  bad[1].polygon = {{{0, 0}, {0, 1}, {0, 2}, {0, 0}}, {}};
  try {
    fill_diagonal(m, bad, mc, {});
    FAIL("expected DegenerateGeometry");
  } catch (const DegenerateGeometry& e) {
    CHECK(std::string(e.what()).find("'B'") != std::string::npos);
  }
}

TEST_CASE("distance CSV round trip") {
  DistanceMatrix m;
  m.zone_ids = {"A", "B,2"};
  m.km = Matrix(2);
  m.km(0, 1) = 1.5;
  m.km(1, 0) = 2.25;
  m.km(1, 1) = 0.125;
  const auto csv = distance_matrix_to_csv(m);
  CHECK(csv.rfind("origin,A,\"B,2\"\n", 0) == 0);
  const auto back = distance_matrix_from_csv(csv);
  CHECK(back.zone_ids == m.zone_ids);
  CHECK(back.km == m.km);
  CHECK_THROWS_AS(distance_matrix_from_csv(""), SchemaError);
  CHECK_THROWS_AS(distance_matrix_from_csv("origin,A,B\nA,0,1\n"), SchemaError);
  CHECK_THROWS_AS(distance_matrix_from_csv("origin,A\nA,x\n"), SchemaError);
}

TEST_CASE("remote backend") {
  RemoteRoutingConfig cfg;
  cfg.url_template = "http://127.0.0.1:1/route?from={olat},{olon}&to={dlat},{dlon}&d={day}&h={hour}";
  const RouteQuery q{{4.35, 50.84}, {4.4, 50.8}, "a", "b", {Weekday::Tuesday, 8}};

  SUBCASE("url rendering") {
    const RemoteBackend be(cfg);
    CHECK(be.render_url(q) ==
          "http://127.0.0.1:1/route?from=50.84000000,4.35000000&to=50.80000000,4.40000000&d=tuesday&h=8");
  }
  SUBCASE("key placeholder requires the environment variable") {
    auto c = cfg;
    c.url_template += "&key={key}";
    c.api_key_env = "CHARGECAST_TEST_UNSET_KEY";
    ::unsetenv("CHARGECAST_TEST_UNSET_KEY");
    CHECK_THROWS_AS(RemoteBackend{c}, ConfigError);
    ::setenv("CHARGECAST_TEST_UNSET_KEY", "s3cret", 1);
    CHECK(RemoteBackend(c).render_url(q).ends_with("&key=s3cret"));
    ::unsetenv("CHARGECAST_TEST_UNSET_KEY");
  }
  SUBCASE("bad template") {
    auto c = cfg;
    c.url_template = "";
    CHECK_THROWS_AS(RemoteBackend{c}, ConfigError);
    c.url_template = "no-scheme/path";
    CHECK_THROWS_AS(RemoteBackend{c}, ConfigError);
  }
  SUBCASE("talks to a local server") {
    httplib::Server srv;
    std::atomic<int> hits{0};
    srv.Get("/route", [&](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      if (req.get_param_value("h") == "13") {
        res.status = 503;
        return;
      }
      res.set_content(R"({"routes":[{"distance":4250}]})", "application/json");
    });
    const int port = srv.bind_to_any_port("127.0.0.1");
    std::thread th([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    auto c = cfg;
    c.url_template = "http://127.0.0.1:" + std::to_string(port) + "/route?h={hour}";
    c.response_km_pointer = "/routes/0/distance";
    c.response_scale = 0.001;
    c.timeout_s = 5;
    const RemoteBackend be(c);
    CHECK(be.route_km(q) == doctest::Approx(4.25).epsilon(1e-15));
    CHECK(be.route_km({q.origin, q.origin, "a", "a", {}}) == 0.0);

    RouteQuery busy = q;
    busy.ctx.hour = 13;
    CHECK_THROWS_AS(be.route_km(busy), BackendFailure);

    auto wrong = c;
    wrong.response_km_pointer = "/nope";
    CHECK_THROWS_AS(RemoteBackend(wrong).route_km(q), BackendFailure);

    const auto zones = row_of_zones({"a", "b", "c"});
    const auto m = build_distance_matrix(zones, be, {Weekday::Monday, 7}, {3, 1, {}});
    CHECK(m.km(2, 0) == doctest::Approx(4.25).epsilon(1e-15));

    srv.stop();
    th.join();
    CHECK(hits.load() >= 9);
  }
  SUBCASE("unreachable server") {
    auto c = cfg;
    c.timeout_s = 1;
    CHECK_THROWS_AS(RemoteBackend(c).route_km(q), BackendFailure);
  }
}
