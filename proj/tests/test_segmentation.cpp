#include <doctest.h>

#include <random>

#include "chargecast/errors.hpp"
#include "chargecast/segmentation.hpp"
#include "support.hpp"

using namespace chargecast;
using namespace chargecast::segmentation;

namespace {

HighwayRecord road(const std::string& tag, HighwayClass cls, GeoPoint a, GeoPoint b) {
  return {0, tag, {{a, b}}, cls};
}

PoiRecord poly_poi(ChargerClass cls, const GeoPolygon& p) {
  PoiRecord r;
  r.amenity_tag = "x";
  r.geometry = p;
  r.charger_class = cls;
  r.area_km2 = geometry::polygon_area_km2(p);
  return r;
}

PoiRecord node_poi(ChargerClass cls, GeoPoint pt, double area = 0.0001) {
  PoiRecord r;
  r.amenity_tag = "x";
  r.geometry = pt;
  r.charger_class = cls;
  r.area_km2 = area;
  return r;
}

}  // namespace

TEST_CASE("residential share") {
  const std::vector<Zone> zones{testing::zone("A", testing::rect(4.30, 50.80, 4.32, 50.82)),
                                testing::zone("B", testing::rect(4.32, 50.80, 4.34, 50.82))};
  const std::vector<HighwayRecord> roads{
      road("residential", HighwayClass::Residential, {4.305, 50.801}, {4.305, 50.811}),
      road("primary", HighwayClass::Major, {4.31, 50.801}, {4.31, 50.806}),
      road("footway", HighwayClass::Ignored, {4.31, 50.801}, {4.31, 50.819}),
      // Crosses into B: about half residential length in each zone.
      road("residential", HighwayClass::Residential, {4.31, 50.815}, {4.33, 50.815}),
  };
  const auto shares = residential_shares(zones, roads);
  REQUIRE(shares.size() == 2);

  const double r1 = geometry::haversine_km({4.305, 50.801}, {4.305, 50.811});
  const double m1 = geometry::haversine_km({4.31, 50.801}, {4.31, 50.806});
  const double half = geometry::haversine_km({4.31, 50.815}, {4.32, 50.815});
  CHECK(shares[0].residential_km == doctest::Approx(r1 + half).epsilon(1e-6));
  CHECK(shares[0].classified_km == doctest::Approx(r1 + half + m1).epsilon(1e-6));
  CHECK(shares[0].alpha == doctest::Approx((r1 + half) / (r1 + half + m1)).epsilon(1e-6));
  CHECK(shares[1].alpha == 1.0);
  CHECK_FALSE(shares[1].degenerate);

  const auto single = residential_share(zones[0], roads);
  CHECK(single.alpha == shares[0].alpha);

  CHECK_THROWS_AS(residential_shares(zones, roads, 0.0), InvalidTolerance);
}

TEST_CASE("zone without classified roads is degenerate") {
  const std::vector<Zone> zones{testing::zone("A", testing::rect(4.30, 50.80, 4.32, 50.82))};
  const std::vector<HighwayRecord> roads{
      road("footway", HighwayClass::Ignored, {4.31, 50.801}, {4.31, 50.819})};
  const auto s = residential_shares(zones, roads);
  CHECK(s[0].alpha == 1.0);
  CHECK(s[0].degenerate);
  CHECK(residential_shares(zones, {})[0].degenerate);
}

TEST_CASE("POI areas go to the containing zone") {
  const std::vector<Zone> zones{testing::zone("A", testing::rect(4.30, 50.80, 4.32, 50.82)),
                                testing::zone("B", testing::rect(4.32, 50.80, 4.34, 50.82))};
  const auto office = testing::rect(4.301, 50.801, 4.303, 50.803);
  const auto school = testing::rect(4.325, 50.805, 4.327, 50.807);
  const std::vector<PoiRecord> pois{
      poly_poi(ChargerClass::NormalWork, office),
      poly_poi(ChargerClass::SemiRapid, school),
      node_poi(ChargerClass::Fast, {4.31, 50.81}),
      node_poi(ChargerClass::Fast, {4.33, 50.81}, 0.0004),
      node_poi(ChargerClass::Excluded, {4.31, 50.81}, 5.0),
      node_poi(ChargerClass::Ignored, {4.31, 50.81}, 5.0),
      node_poi(ChargerClass::Fast, {5.0, 51.0}),  // outside every zone
  };
  const auto t = poi_area_tables(zones, pois);
  REQUIRE(t.size() == 2);
  CHECK(t[0].a_office == geometry::polygon_area_km2(office));
  CHECK(t[0].a_semi == 0.0);
  CHECK(t[0].a_fast == 0.0001);
  CHECK(t[0].sum_a == t[0].a_office + t[0].a_semi + t[0].a_fast);
  CHECK(t[1].a_semi == geometry::polygon_area_km2(school));
  CHECK(t[1].a_fast == 0.0004);
  CHECK(poi_area_table(zones[1], pois) == t[1]);

  CHECK(representative_point(pois[2]) == GeoPoint{4.31, 50.81});
  const auto c = representative_point(pois[0]);
  CHECK(c.lon == doctest::Approx(4.302));
  CHECK(c.lat == doctest::Approx(50.802));
}

TEST_CASE("POI on a shared edge counts once") {
  const std::vector<Zone> zones{testing::zone("A", testing::rect(4.30, 50.80, 4.32, 50.82)),
                                testing::zone("B", testing::rect(4.32, 50.80, 4.34, 50.82))};
  const std::vector<PoiRecord> pois{node_poi(ChargerClass::NormalWork, {4.32, 50.81})};
  const auto t = poi_area_tables(zones, pois);
  CHECK(t[0].a_office + t[1].a_office == 0.0001);
}

TEST_CASE("segment demand") {
  const PoiAreaEntry areas{0.2, 0.3, 0.5, 1.0};
  SUBCASE("worked example") {
    const auto s = segment_demand(600.0, 400.0, 0.6, 0.25, areas);
    CHECK(s.phi_par == doctest::Approx(250.0));
    CHECK(s.phi_nres == doctest::Approx(450.0));
    CHECK(s.phi_noff == doctest::Approx(60.0));
    CHECK(s.phi_sem == doctest::Approx(90.0));
    CHECK(s.phi_rap == doctest::Approx(150.0));
    CHECK(s.total() == doctest::Approx(1000.0));
    CHECK(s.public_total() == doctest::Approx(750.0));
    CHECK_FALSE(s.empty_poi_fallback);
  }
  SUBCASE("everything private") {
    const auto s = segment_demand(10.0, 0.0, 0.3, 1.0, areas);
    CHECK(s.phi_par == 10.0);
    CHECK(s.public_total() == 0.0);
  }
  SUBCASE("fully residential") {
    const auto s = segment_demand(10.0, 0.0, 1.0, 0.0, {});
    CHECK(s.phi_nres == 10.0);
    CHECK_FALSE(s.empty_poi_fallback);
  }
  SUBCASE("no POIs folds the rest into residential") {
    const auto s = segment_demand(100.0, 0.0, 0.5, 0.2, {});
    CHECK(s.empty_poi_fallback);
    CHECK(s.phi_nres == doctest::Approx(80.0));
    CHECK(s.phi_noff + s.phi_sem + s.phi_rap == 0.0);
    CHECK_THROWS_AS(segment_demand(100.0, 0.0, 0.5, 0.2, {}, EmptyPoiPolicy::Error), EmptyPoiFallback);
  }
  SUBCASE("no demand") {
    const auto s = segment_demand(0.0, 0.0, 0.5, 0.2, {}, EmptyPoiPolicy::Error);
    CHECK(s.total() == 0.0);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(segment_demand(1, 1, 1.2, 0.5, areas), InvalidFraction);
    CHECK_THROWS_AS(segment_demand(1, 1, 0.5, -0.1, areas), InvalidFraction);
    CHECK_THROWS_AS(segment_demand(-1, 1, 0.5, 0.5, areas), PreconditionViolation);
    CHECK_THROWS_AS(segment_demand(1, std::numeric_limits<double>::infinity(), 0.5, 0.5, areas),
                    PreconditionViolation);
  }
  SUBCASE("policy names") {
    CHECK(empty_poi_policy_from_string("nres") == EmptyPoiPolicy::FoldIntoResidential);
    CHECK(empty_poi_policy_from_string("error") == EmptyPoiPolicy::Error);
    CHECK(std::string(to_string(EmptyPoiPolicy::Error)) == "error");
    CHECK_THROWS_AS(empty_poi_policy_from_string("drop"), ConfigError);
  }
}

TEST_CASE("segmentation conserves demand") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0), big(0.0, 1e6);
  for (int k = 0; k < 2000; ++k) {
    const double dr = big(rng), di = big(rng);
    PoiAreaEntry a{u(rng), u(rng), u(rng), 0.0};
    if (k % 5 == 0) a = {};
    a.sum_a = a.a_office + a.a_semi + a.a_fast;
    const auto s = segment_demand(dr, di, u(rng), k % 7 == 0 ? 1.0 : u(rng), a);
    REQUIRE(testing::rel_diff(s.total(), dr + di) <= 1e-9);
    REQUIRE(s.phi_nres >= 0.0);
    REQUIRE(s.phi_noff >= 0.0);
    REQUIRE(s.phi_sem >= 0.0);
    REQUIRE(s.phi_rap >= 0.0);
    REQUIRE(s.phi_par >= 0.0);
  }
}

TEST_CASE("segmented demand CSV round trip") {
  SegmentedDemand s;
  s.zone_ids = {"A", "B"};
  s.entries = {segment_demand(600.0, 400.0, 0.5, 0.25, {1, 1, 2, 4}), segment_demand(0, 0, 1, 0, {})};
  const auto csv = segmented_demand_to_csv(s);
  CHECK(csv.rfind("zone_id,phi_nres,phi_noff,phi_sem,phi_rap,phi_par\n", 0) == 0);
  const auto back = segmented_demand_from_csv(csv);
  REQUIRE(back.zone_ids == s.zone_ids);
  CHECK(back.entries[0].phi_nres == s.entries[0].phi_nres);
  CHECK(back.entries[0].phi_rap == s.entries[0].phi_rap);
  CHECK(back.entries[0].phi_par == s.entries[0].phi_par);
  CHECK_THROWS_AS(segmented_demand_from_csv("zone_id,a,b\n"), SchemaError);
  CHECK_THROWS_AS(segmented_demand_from_csv("zone_id,phi_nres,phi_noff,phi_sem,phi_rap,phi_par\nA,1,2\n"),
                  SchemaError);
}
