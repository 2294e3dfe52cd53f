#include <doctest.h>

#include <cmath>
#include <random>

#include "chargecast/errors.hpp"
#include "chargecast/stations.hpp"
#include "support.hpp"

using namespace chargecast;
using namespace chargecast::stations;
using segmentation::SegmentedDemand;
using segmentation::SegmentedEntry;

namespace {

SegmentedEntry entry(double nres, double noff, double sem, double rap, double par = 0.0) {
  SegmentedEntry e;
  e.phi_nres = nres;
  e.phi_noff = noff;
  e.phi_sem = sem;
  e.phi_rap = rap;
  e.phi_par = par;
  return e;
}

}  // namespace

TEST_CASE("daily capacity per technology") {
  const auto specs = default_specs();
  CHECK(daily_capacity_kwh(find_spec(specs, Technology::Normal)) == 67.2);
  CHECK(daily_capacity_kwh(find_spec(specs, Technology::SemiRapid)) == 140.8);
  CHECK(daily_capacity_kwh(find_spec(specs, Technology::Rapid)) == 480.0);
}

TEST_CASE("stations needed rounds up") {
  const auto normal = find_spec(default_specs(), Technology::Normal);
  CHECK(stations_needed(0.0, normal) == 0);
  CHECK(stations_needed(1e-9, normal) == 1);
  CHECK(stations_needed(67.2, normal) == 1);
  CHECK(stations_needed(67.3, normal) == 2);
  CHECK(stations_needed(134.4, normal) == 2);
  CHECK(stations_needed(1000.0, normal) == 15);
  CHECK_THROWS_AS(stations_needed(-1.0, normal), PreconditionViolation);
  CHECK_THROWS_AS(stations_needed(std::nan(""), normal), PreconditionViolation);
}

TEST_CASE("charger spec files") {
  const auto shipped = load_charger_specs(std::string(CHARGECAST_DATA_DIR) + "/charger_specs.json");
  REQUIRE(shipped.size() == 3);
  for (const auto& d : default_specs()) {
    const auto& s = find_spec(shipped, d.technology);
    CHECK(s.power_kw == d.power_kw);
    CHECK(s.delivery == d.delivery);
    CHECK(s.occupancy == d.occupancy);
    CHECK(s.hours == d.hours);
  }
  const auto low = load_charger_specs(std::string(CHARGECAST_DATA_DIR) + "/charger_specs_low_occupancy.json");
  for (const auto& d : low_occupancy_specs()) {
    CHECK(find_spec(low, d.technology).occupancy == d.occupancy);
    CHECK(d.occupancy < find_spec(default_specs(), d.technology).occupancy);
  }

  const auto back = parse_charger_specs(charger_specs_to_json(default_specs()));
  CHECK(back.size() == 3);
  CHECK(back[1].technology == Technology::SemiRapid);

  CHECK_THROWS_AS(parse_charger_specs("{}"), SchemaError);
  CHECK_THROWS_AS(parse_charger_specs(R"([{"technology":"warp"}])"), SchemaError);
  CHECK_THROWS_AS(parse_charger_specs(R"([{"technology":"normal","power_kw":7}])"), SchemaError);
  CHECK_THROWS_AS(
      parse_charger_specs(R"([{"technology":"normal","power_kw":7,"delivery":0.8,"occupancy":1.5,"hours":24}])"),
      ConfigError);
  CHECK_THROWS_AS(find_spec({}, Technology::Rapid), MissingSpec);
}

TEST_CASE("technology names") {
  CHECK(technology_from_string("fast") == Technology::Rapid);
  CHECK(technology_from_string("semi-rapid") == Technology::SemiRapid);
  CHECK(std::string(to_string(Technology::SemiRapid)) == "semi_rapid");
  CHECK_THROWS_AS(technology_from_string("ultra"), SchemaError);
}

TEST_CASE("station report") {
  const std::vector<Zone> zones{testing::zone("A", testing::km_square(4.35, 50.84, 1.0)),
                                testing::zone("B", testing::km_square(4.37, 50.84, 2.0))};
  SegmentedDemand seg;
  seg.zone_ids = {"A", "B"};
  seg.entries = {entry(134.4, 70.0, 140.8, 481.0, 50.0), entry(0, 0, 0, 0, 10.0)};

  SUBCASE("mixed deployment") {
    const auto rep = build_station_report(seg, default_specs(), {}, zones);
    const auto& a = rep.zones[0];
    CHECK(a.counts.normal_resi == 2);
    CHECK(a.counts.normal_work == 2);
    CHECK(a.counts.semi_rapid == 1);
    CHECK(a.counts.rapid == 2);
    CHECK(a.counts.full_normal == static_cast<long long>(std::ceil((134.4 + 70.0 + 140.8 + 481.0) / 67.2)));
    CHECK(a.stations_total == 7);
    CHECK(a.stations_per_km2 == doctest::Approx(7.0).epsilon(1e-9));
    CHECK(a.public_demand_kwh_day == doctest::Approx(826.2));
    CHECK(a.private_demand_kwh_day == 50.0);
    CHECK(rep.zones[1].stations_total == 0);
    CHECK(rep.zones[1].area_km2 == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(rep.citywide.mixed_total() == 7);
    CHECK(rep.citywide.full_normal == a.counts.full_normal);
  }
  SUBCASE("full normal scenario") {
    const auto rep = build_station_report(seg, default_specs(), {0.0, true}, zones);
    CHECK(rep.zones[0].stations_total == rep.zones[0].counts.full_normal);
    CHECK(rep.scenario.full_normal);
  }
  SUBCASE("traffic reduction scales demand before rounding") {
    const auto rep = build_station_report(seg, default_specs(), {0.05, false}, zones);
    const auto& a = rep.zones[0];
    CHECK(a.counts.normal_resi == 2);  // 127.68 kWh
    CHECK(a.counts.normal_work == 1);  // 66.5 kWh
    CHECK(a.counts.semi_rapid == 1);
    CHECK(a.counts.rapid == 1);  // 456.95 kWh
    CHECK(a.private_demand_kwh_day == doctest::Approx(47.5));
    CHECK_THROWS_AS(build_station_report(seg, default_specs(), {1.0, false}, zones), ConfigError);
    CHECK_THROWS_AS(build_station_report(seg, default_specs(), {-0.1, false}, zones), ConfigError);
  }
  SUBCASE("mismatched inputs") {
    auto swapped = seg;
    std::swap(swapped.zone_ids[0], swapped.zone_ids[1]);
    CHECK_THROWS_AS(build_station_report(swapped, default_specs(), {}, zones), DimensionMismatch);
    auto shorter = seg;
    shorter.entries.pop_back();
    CHECK_THROWS_AS(build_station_report(shorter, default_specs(), {}, zones), DimensionMismatch);
    auto specs = default_specs();
    specs.pop_back();
    CHECK_THROWS_AS(build_station_report(seg, specs, {}, zones), MissingSpec);
  }
  SUBCASE("lower occupancy needs more stations") {
    const auto base = build_station_report(seg, default_specs(), {}, zones);
    const auto low = build_station_report(seg, low_occupancy_specs(), {}, zones);
    CHECK(low.citywide.mixed_total() > base.citywide.mixed_total());
  }
}

TEST_CASE("station counts are monotone in demand") {
  const auto normal = find_spec(default_specs(), Technology::Normal);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 5000.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng), b = u(rng);
    if (a <= b) REQUIRE(stations_needed(a, normal) <= stations_needed(b, normal));
    const long long n = stations_needed(a, normal);
    REQUIRE(static_cast<double>(n) * 67.2 >= a * (1 - 1e-12));
    REQUIRE(static_cast<double>(n - 1) * 67.2 < a * (1 + 1e-12));
  }
}
