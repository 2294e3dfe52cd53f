// Brute-force ground truth for synthetic cities. Every formula is written out
// again from scratch: zones and POIs are lon/lat rectangles, highways are
// meridian segments, so areas and lengths have closed forms.
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "chargecast/synth.hpp"

namespace chargecast::synth {

namespace {

constexpr double kR = 6371.0;
constexpr double kRad = std::numbers::pi / 180.0;
constexpr double kNodeFootprint = 1e-4;

enum class Kind { Office, Semi, Fast, None };

Kind kind_of(const std::string& tag) {
  static const std::vector<std::string> office{"office"};
  static const std::vector<std::string> semi{"university", "school",  "kindergarten", "entertainment",
                                             "shops",      "clinic",  "hospital"};
  static const std::vector<std::string> fast{"bar", "café",    "cafe", "fast_food", "ice_cream",
                                             "pub", "restaurant", "tourism", "taxi"};
  auto has = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), tag) != v.end(); };
  if (has(office)) return Kind::Office;
  if (has(semi)) return Kind::Semi;
  if (has(fast)) return Kind::Fast;
  return Kind::None;
}

double great_circle_km(double lon1, double lat1, double lon2, double lat2) {
  const double p1 = lat1 * kRad;
  const double p2 = lat2 * kRad;
  const double sp = std::sin((p2 - p1) / 2.0);
  const double sl = std::sin((lon2 - lon1) * kRad / 2.0);
  const double h = sp * sp + std::cos(p1) * std::cos(p2) * sl * sl;
  return 2.0 * kR * std::asin(std::min(1.0, std::sqrt(h)));
}

// Exact spherical area of a lon/lat rectangle.
double rect_area_km2(double x0, double y0, double x1, double y1) {
  return kR * kR * ((x1 - x0) * kRad) * (std::sin(y1 * kRad) - std::sin(y0 * kRad));
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Mean distance between two points drawn uniformly (by area) from the
// rectangle: longitude uniform, sine of latitude uniform. A rectangle is its
// own bounding box, so no candidate is ever rejected.
double mc_mean_km(const SynthZone& z, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  auto u = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  const double s0 = std::sin(z.min_lat * kRad);
  const double s1 = std::sin(z.max_lat * kRad);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double pt[2][2];
    for (auto& p : pt) {
      p[0] = z.min_lon + u() * (z.max_lon - z.min_lon);
      const double s = s0 + u() * (s1 - s0);
      p[1] = std::asin(s) * (180.0 / std::numbers::pi);
    }
    total += great_circle_km(pt[0][0], pt[0][1], pt[1][0], pt[1][1]);
  }
  return total / static_cast<double>(n);
}

long long points_for(double kwh, const OracleChargerSpec& s) {
  if (kwh <= 0.0) return 0;
  return static_cast<long long>(std::ceil(kwh / (s.power_kw * s.delivery * s.occupancy * s.hours)));
}

}  // namespace

OracleResult oracle_evaluate(const City& city, const RunSettings& run) {
  const std::size_t n = city.zones.size();
  OracleResult out;
  out.zones.resize(n);
  out.distance_km.assign(n, std::vector<double>(n, 0.0));

  for (std::size_t i = 0; i < n; ++i) {
    const auto& z = city.zones[i];
    out.zones[i].id = z.id;
    out.zones[i].area_km2 = rect_area_km2(z.min_lon, z.min_lat, z.max_lon, z.max_lat);
  }

  // Distances: centroid to centroid off the diagonal, sampled within a zone.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = city.zones[i];
    for (std::size_t j = 0; j < n; ++j) {
      const auto& b = city.zones[j];
      double km = 0.0;
      if (i == j) {
        km = mc_mean_km(a, run.mc_samples, run.mc_seed ^ fnv1a(a.id));
      } else {
        km = great_circle_km(0.5 * (a.min_lon + a.max_lon), 0.5 * (a.min_lat + a.max_lat),
                             0.5 * (b.min_lon + b.max_lon), 0.5 * (b.min_lat + b.max_lat));
      }
      out.distance_km[i][j] = km * run.detour_index;
    }
  }

  // Trips → car trips → kWh, credited to the destination.
  std::vector<std::vector<double>> reg(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> irr(n, std::vector<double>(n, 0.0));
  for (const auto& t : city.trips) {
    reg[t.origin][t.dest] += t.regular;
    irr[t.origin][t.dest] += t.irregular;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = out.distance_km[i][j];
      const double car = run.dr_a * (1.0 - std::exp(-run.dr_b * d));
      const double r = reg[i][j] * city.extrapolation_factor * car;
      const double ir = irr[i][j] * city.extrapolation_factor * car;
      out.zones[j].delta_regular += r * d * run.kwh_per_km;
      out.zones[j].delta_irregular += ir * d * run.kwh_per_km;
    }
  }

  // Residential share.
  std::vector<double> res(n, 0.0);
  std::vector<double> classified(n, 0.0);
  for (const auto& h : city.highways) {
    const bool residential = h.tag == "residential";
    const bool major = h.tag == "motorway" || h.tag == "primary" || h.tag == "secondary" || h.tag == "tertiary";
    if (!residential && !major) continue;
    const double len = great_circle_km(h.lon, h.lat0, h.lon, h.lat1);
    classified[h.zone] += len;
    if (residential) res[h.zone] += len;
  }

  // POI footprints.
  for (const auto& p : city.pois) {
    const double a = p.node ? kNodeFootprint : rect_area_km2(p.min_lon, p.min_lat, p.max_lon, p.max_lat);
    auto& oz = out.zones[p.zone];
    switch (kind_of(p.tag)) {
      case Kind::Office: oz.a_office += a; break;
      case Kind::Semi: oz.a_semi += a; break;
      case Kind::Fast: oz.a_fast += a; break;
      case Kind::None: break;
    }
  }

  const double keep = 1.0 - run.traffic_reduction;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& z = city.zones[i];
    auto& oz = out.zones[i];
    oz.alpha = classified[i] > 0.0 ? res[i] / classified[i] : 1.0;

    const double upper = run.ppr_cap ? std::min(*run.ppr_cap, 1.0) : 1.0;
    const double households = z.tau * oz.area_km2 / z.chi;
    if (households > 0.0) {
      oz.gamma = std::min(z.sigma / households, upper);
    } else {
      oz.gamma = z.sigma > 0.0 ? upper : 0.0;
    }

    const double total = oz.delta_regular + oz.delta_irregular;
    oz.phi_par = oz.gamma * total;
    oz.phi_nres = oz.alpha * (1.0 - oz.gamma) * total;
    const double rest = (1.0 - oz.alpha) * (1.0 - oz.gamma) * total;
    const double sum_a = oz.a_office + oz.a_semi + oz.a_fast;
    if (sum_a > 0.0) {
      oz.phi_noff = rest * oz.a_office / sum_a;
      oz.phi_sem = rest * oz.a_semi / sum_a;
      oz.phi_rap = rest * oz.a_fast / sum_a;
    } else {
      oz.phi_nres += rest;
    }

    const double nres = oz.phi_nres * keep;
    const double noff = oz.phi_noff * keep;
    const double sem = oz.phi_sem * keep;
    const double rap = oz.phi_rap * keep;
    oz.normal_resi = points_for(nres, run.normal);
    oz.normal_work = points_for(noff, run.normal);
    oz.semi_rapid = points_for(sem, run.semi_rapid);
    oz.rapid = points_for(rap, run.rapid);
    oz.full_normal = points_for(nres + noff + sem + rap, run.normal);
  }
  return out;
}

nlohmann::json oracle_json(const OracleResult& r) {
  nlohmann::json zones = nlohmann::json::array();
  for (const auto& z : r.zones) {
    zones.push_back({{"zone_id", z.id},
                     {"area_km2", z.area_km2},
                     {"delta_regular_kwh", z.delta_regular},
                     {"delta_irregular_kwh", z.delta_irregular},
                     {"alpha", z.alpha},
                     {"gamma", z.gamma},
                     {"a_office", z.a_office},
                     {"a_semi", z.a_semi},
                     {"a_fast", z.a_fast},
                     {"phi_nres", z.phi_nres},
                     {"phi_noff", z.phi_noff},
                     {"phi_sem", z.phi_sem},
                     {"phi_rap", z.phi_rap},
                     {"phi_par", z.phi_par},
                     {"normal_resi", z.normal_resi},
                     {"normal_work", z.normal_work},
                     {"semi_rapid", z.semi_rapid},
                     {"rapid", z.rapid},
                     {"full_normal", z.full_normal}});
  }
  return {{"zones", zones}, {"distance_km", r.distance_km}};
}

}  // namespace chargecast::synth
