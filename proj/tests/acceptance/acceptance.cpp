// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chargecast/corrections.hpp"
#include "chargecast/distances.hpp"
#include "chargecast/geometry.hpp"
#include "chargecast/segmentation.hpp"
#include "chargecast/stations.hpp"
#include "../oracle_compare.hpp"
#include "../support.hpp"

using namespace chargecast;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::string kData = CHARGECAST_DATA_DIR;

Outcome driving_ratio_fit() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto table = corrections::load_mode_share_csv(kData + "/mode_share.csv");
  const auto m = corrections::fit_driving_ratio(table, corrections::AbscissaRule::BinMidpoint);
  const double dt = seconds_since(t0);
  const bool ok = m.a_param >= 0.709 && m.a_param <= 0.809 && m.b_param >= 0.386 && m.b_param <= 0.546 &&
                  m.sse <= 0.003 && dt < 1.0;
  return {ok, fmt("A=%.4f B=%.4f sse=%.5f in %.3f s (reference A=0.759 B=0.466)", m.a_param, m.b_param, m.sse, dt)};
}

Outcome round_trip_fit() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ua(0.1, 1.0), ub(0.1, 2.0);
  const std::vector<double> x{0.5, 1.5, 3.5, 7.5, 15.0, 35.0};
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double a = ua(rng), b = ub(rng);
    std::vector<double> y;
    for (double xi : x) y.push_back(a * (1.0 - std::exp(-b * xi)));
    const auto m = corrections::fit_saturating_exponential(x, y);
    worst = std::max({worst, std::abs(m.a_param - a), std::abs(m.b_param - b)});
  }
  return {worst <= 1e-4, fmt("200 refits, max parameter error %.3g", worst)};
}

Outcome monte_carlo() {
  const double analytic = (2.0 + std::sqrt(2.0) + 5.0 * std::asinh(1.0)) / 15.0;
  const auto unit = testing::km_square(4.35, 50.84, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  const double a = geometry::mc_mean_pairwise_distance_km(unit, {100000, 42});
  const double dt = seconds_since(t0);
  const double b = geometry::mc_mean_pairwise_distance_km(unit, {100000, 42});
  const bool ok = std::abs(a - analytic) <= 0.005 && a == b && dt < 1.0;
  return {ok, fmt("estimate %.6f vs %.6f (|d|=%.2e), repeat %s, %.3f s", a, analytic, std::abs(a - analytic),
                  a == b ? "identical" : "DIFFERENT", dt)};
}

Outcome detour_conversion() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lon(4.2, 4.5), lat(50.7, 50.95);
  int exact = 0;
  for (int k = 0; k < 1000; ++k) {
    const GeoPoint a{lon(rng), lat(rng)}, b{lon(rng), lat(rng)};
    exact += distances::offline_route_km(a, b, {}) == geometry::haversine_km(a, b) * 1.417;
  }

  // Recorded Monday 7 am routes, origin row → destination column.
  const std::vector<std::string> ids{"Altitude 100", "Boondael", "Vivier d'oie", "Université", "Observatoire"};
  const double table[5][5] = {{0, 5.937, 5.906, 5.430, 3.386},
                              {5.616, 0, 5.930, 1.486, 4.590},
                              {6.181, 4.868, 0, 6.478, 3.594},
                              {5.516, 1.582, 7.609, 0, 4.809},
                              {3.579, 4.334, 4.028, 4.422, 0}};
  std::vector<Zone> zones;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const double x = 4.36 + 0.01 * static_cast<double>(k);
    zones.push_back(testing::zone(ids[k], testing::rect(x, 50.81, x + 0.008, 50.818)));
  }
  const auto fx = distances::FixtureBackend::load(kData + "/table1_routes.json");
  const auto m = distances::build_distance_matrix(zones, fx, {distances::Weekday::Monday, 7});
  int replayed = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      if (i != j) replayed += m.km(i, j) == table[i][j];
    }
  }
  return {exact == 1000 && replayed == 20,
          fmt("offline exact on %d/1000 pairs; fixture replayed %d/20 routes bit-exactly "
              "(Altitude 100 -> Boondael %.3f, back %.3f)",
              exact, replayed, m.km(0, 1), m.km(1, 0))};
}

Outcome segmentation_conservation() {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> u(0.0, 1.0), delta(0.0, 5e5);
  double worst = 0.0;
  int fallback = 0, full_private = 0;
  for (int k = 0; k < 10000; ++k) {
    segmentation::PoiAreaEntry a{u(rng), u(rng), u(rng), 0.0};
    if (k % 4 == 0) a = {};
    a.sum_a = a.a_office + a.a_semi + a.a_fast;
    // A clamped PPR arrives here as gamma == 1.
    const double gamma = k % 5 == 0 ? 1.0 : u(rng);
    const double dr = delta(rng), di = k % 3 == 0 ? 0.0 : delta(rng);
    const auto s = segmentation::segment_demand(dr, di, u(rng), gamma, a);
    fallback += s.empty_poi_fallback;
    full_private += gamma == 1.0;
    worst = std::max(worst, testing::rel_diff(s.total(), dr + di));
  }
  return {worst <= 1e-9 && fallback > 0 && full_private > 0,
          fmt("10000 cases (%d empty-POI fallbacks, %d with gamma = 1), worst relative error %.2e", fallback,
              full_private, worst)};
}

Outcome lane_splitting() {
  const double eps = 0.001;
  std::vector<GeoPolygon> zones;
  const double cell = 0.01;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      zones.push_back(testing::rect(4.30 + c * cell, 50.80 + r * cell, 4.30 + (c + 1) * cell, 50.80 + (r + 1) * cell));
    }
  }
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.005, 0.035);
  std::uniform_int_distribution<int> nv(2, 6);
  int length_failures = 0, placement_failures = 0;
  long long samples = 0;
  for (int k = 0; k < 1000; ++k) {
    GeoPolyline line;
    const int n = nv(rng);
    for (int v = 0; v < n; ++v) line.points.push_back({4.30 + u(rng), 50.80 + u(rng)});
    const auto pieces = geometry::split_polyline_by_zone(line, zones, eps);
    double sum = 0.0;
    for (const auto& p : pieces) sum += geometry::length_km(p.line);
    const double crossings = static_cast<double>(pieces.size() - 1);
    if (std::abs(sum - geometry::length_km(line)) > std::max(crossings, 1.0) * eps) ++length_failures;

    // Interior samples: segment midpoints and quarter points, at least eps
    // along the line from either end of the piece.
    for (const auto& p : pieces) {
      const double total = geometry::length_km(p.line);
      double run = 0.0;
      for (std::size_t s = 0; s + 1 < p.line.points.size(); ++s) {
        const auto& a = p.line.points[s];
        const auto& b = p.line.points[s + 1];
        const double seg = geometry::haversine_km(a, b);
        for (double t : {0.25, 0.5, 0.75}) {
          const double at = run + t * seg;
          if (at < eps || total - at < eps) continue;
          const GeoPoint q{a.lon + t * (b.lon - a.lon), a.lat + t * (b.lat - a.lat)};
          ++samples;
          bool ok = false;
          if (p.zone) {
            ok = geometry::point_in_polygon(q, zones[*p.zone]);
          } else {
            ok = true;
            for (const auto& z : zones) ok = ok && !geometry::point_in_polygon(q, z);
          }
          placement_failures += !ok;
        }
        run += seg;
      }
    }
  }
  return {length_failures == 0 && placement_failures == 0,
          fmt("1000 polylines over a 3x3 grid: %d length violations, %d of %lld interior samples misplaced",
              length_failures, placement_failures, samples)};
}

Outcome capacity_arithmetic() {
  const auto specs = stations::load_charger_specs(kData + "/charger_specs.json");
  const auto& normal = stations::find_spec(specs, stations::Technology::Normal);
  const double cn = stations::daily_capacity_kwh(normal);
  const double cs = stations::daily_capacity_kwh(stations::find_spec(specs, stations::Technology::SemiRapid));
  const double cr = stations::daily_capacity_kwh(stations::find_spec(specs, stations::Technology::Rapid));
  const long long b1 = stations::stations_needed(67.2, normal);
  const long long b2 = stations::stations_needed(67.3, normal);
  const bool ok = cn == 67.2 && cs == 140.8 && cr == 480.0 && b1 == 1 && b2 == 2;
  return {ok, fmt("capacities %.17g / %.17g / %.17g kWh/day; 67.2 -> %lld, 67.3 -> %lld", cn, cs, cr, b1, b2)};
}

Outcome traffic_reduction() {
  std::mt19937_64 rng(95);
  std::uniform_int_distribution<int> nz(2, 40);
  std::uniform_real_distribution<double> d(0.0, 20000.0);
  const auto specs = stations::default_specs();
  double worst_ratio = 0.0;  // |Δ| / n_zones
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = nz(rng);
    segmentation::SegmentedDemand seg;
    std::vector<Zone> zones;
    for (int i = 0; i < n; ++i) {
      const std::string id = "z" + std::to_string(i);
      seg.zone_ids.push_back(id);
      segmentation::SegmentedEntry e;
      e.phi_nres = d(rng);
      e.phi_noff = d(rng) / 4;
      e.phi_sem = d(rng) / 4;
      e.phi_rap = d(rng) / 10;
      seg.entries.push_back(e);
      zones.push_back(testing::zone(id, testing::rect(4.3 + 0.01 * i, 50.8, 4.309 + 0.01 * i, 50.809)));
    }
    const auto full = stations::build_station_report(seg, specs, {0.0, false}, zones).citywide;
    const auto cut = stations::build_station_report(seg, specs, {0.05, false}, zones).citywide;
    const std::pair<long long, long long> per_tech[] = {{full.normal_resi, cut.normal_resi},
                                                        {full.normal_work, cut.normal_work},
                                                        {full.semi_rapid, cut.semi_rapid},
                                                        {full.rapid, cut.rapid},
                                                        {full.full_normal, cut.full_normal}};
    for (const auto& [before, after] : per_tech) {
      const double gap = std::abs(static_cast<double>(after) - 0.95 * static_cast<double>(before));
      worst_ratio = std::max(worst_ratio, gap / n);
      violations += gap > n;
    }
  }
  return {violations == 0, fmt("500 random cities x 5 technologies: worst |count(0.95D) - 0.95 count(D)| = "
                               "%.3f x n_zones (0.95 x 24413 = %.2f)",
                               worst_ratio, 0.95 * 24413)};
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto root = testing::scratch_dir("acceptance-oracle");
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> nz(2, 10);
  double worst = 0.0;
  std::string worst_where;
  long long mismatched_counts = 0;
  int cities = 0;
  for (int k = 0; k < 100; ++k) {
    synth::SynthSpec spec;
    spec.n_zones = nz(rng);
    spec.seed = rng();
    spec.extrapolation_factor = k % 4 == 0 ? 1.25 : 1.0;
    synth::RunSettings run;
    run.mc_seed = rng();
    if (k % 5 == 0) run.ppr_cap = 0.5;
    if (k % 3 == 0) run.traffic_reduction = 0.05;
    const auto d = testing::compare_with_oracle(spec, run, root / std::to_string(k));
    if (d.worst_rel > worst) {
      worst = d.worst_rel;
      worst_where = "city " + std::to_string(k) + " " + d.worst_field;
    }
    mismatched_counts += d.count_mismatches;
    ++cities;
  }
  const double dt = seconds_since(t0);
  fs::remove_all(root);
  return {worst <= 1e-6 && mismatched_counts == 0 && dt < 30.0,
          fmt("%d cities: worst relative difference %.2e%s%s, %lld station counts differ, %.2f s", cities, worst,
              worst_where.empty() ? "" : " at ", worst_where.c_str(), mismatched_counts, dt)};
}

Outcome determinism() {
  const auto root = testing::scratch_dir("acceptance-determinism");
  synth::SynthSpec spec;
  spec.n_zones = 9;
  spec.seed = 1234;
  synth::RunSettings run;
  run.mc_samples = 5000;
  const auto cfg = synth::write_city(synth::generate_city(spec), run, root);

  auto run_cli = [&](int threads, const fs::path& out) {
    const std::string cmd = "OMP_NUM_THREADS=" + std::to_string(threads) + " " + CHARGECAST_CLI +
                            " run --config " + cfg.string() + " --out " + out.string() + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const fs::path a = root / "run1", b = root / "run4";
  if (run_cli(1, a) != 0 || run_cli(4, b) != 0) return {false, "chargecast run failed"};

  int compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto ext = entry.path().extension();
    if (ext != ".csv" && ext != ".geojson") continue;
    ++compared;
    differing += testing::slurp(entry.path()) != testing::slurp(b / entry.path().filename());
  }
  fs::remove_all(root);
  return {compared >= 7 && differing == 0,
          fmt("%d CSV/GeoJSON files from 1-thread and 4-thread runs, %d differ", compared, differing)};
}

Outcome headline_not_reproducible() {
  int present = 0;
  for (const char* f : {"table1_routes.json", "mode_share.csv", "charger_specs.json", "synth_spec.json"}) {
    present += fs::is_regular_file(kData + "/" + f);
  }
  return {present == 4,
          fmt("documented as not reproducible: the Brussels station totals, choropleths and segment shares need "
              "the proprietary trip data and PAR inventory; %d/4 substitute fixtures shipped",
              present)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"driving-ratio fit", driving_ratio_fit},
      {"fit round trip", round_trip_fit},
      {"monte carlo geometry", monte_carlo},
      {"detour conversion", detour_conversion},
      {"segmentation conservation", segmentation_conservation},
      {"lane splitting", lane_splitting},
      {"capacity arithmetic", capacity_arithmetic},
      {"traffic-reduction scaling", traffic_reduction},
      {"oracle equivalence", oracle_equivalence},
      {"determinism", determinism},
      {"headline results", headline_not_reproducible},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("AC%-2zu %s  %-26s %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
