#include "chargecast/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include "chargecast/errors.hpp"
#include "chargecast/kernels.hpp"
#include "csv.hpp"

namespace chargecast::segmentation {

std::vector<ResidentialShare> residential_shares(const std::vector<Zone>& zones,
                                                 const std::vector<HighwayRecord>& highways,
                                                 double epsilon_km) {
  if (!(epsilon_km > 0.0)) throw InvalidTolerance("split tolerance must be > 0");
  std::vector<GeoPolygon> polys;
  polys.reserve(zones.size());
  for (const auto& z : zones) polys.push_back(z.polygon);

  std::vector<GeoPolyline> lines;
  std::vector<HighwayClass> classes;
  for (const auto& h : highways) {
    if (h.cls == HighwayClass::Ignored) continue;
    lines.push_back(h.polyline);
    classes.push_back(h.cls);
  }
  const auto pieces = kernels::omp::split_all(lines, polys, epsilon_km);

  std::vector<ResidentialShare> out(zones.size());
  for (auto& s : out) s = {0.0, 0.0, 0.0, false};
  for (std::size_t h = 0; h < pieces.size(); ++h) {
    for (const auto& piece : pieces[h]) {
      if (!piece.zone) continue;
      const double len = geometry::length_km(piece.line);
      auto& s = out[*piece.zone];
      s.classified_km += len;
      if (classes[h] == HighwayClass::Residential) s.residential_km += len;
    }
  }
  for (auto& s : out) {
    if (s.classified_km > 0.0) {
      s.alpha = std::clamp(s.residential_km / s.classified_km, 0.0, 1.0);
    } else {
      s.alpha = 1.0;
      s.degenerate = true;
    }
  }
  return out;
}

ResidentialShare residential_share(const Zone& zone, const std::vector<HighwayRecord>& highways,
                                   double epsilon_km) {
  return residential_shares({zone}, highways, epsilon_km).front();
}

GeoPoint representative_point(const PoiRecord& poi) {
  if (const auto* pt = std::get_if<GeoPoint>(&poi.geometry)) return *pt;
  return geometry::centroid(std::get<GeoPolygon>(poi.geometry));
}

std::vector<PoiAreaEntry> poi_area_tables(const std::vector<Zone>& zones,
                                          const std::vector<PoiRecord>& pois) {
  std::vector<geometry::BBox> boxes;
  for (const auto& z : zones) boxes.push_back(geometry::bbox(z.polygon));
  std::vector<PoiAreaEntry> out(zones.size());
  for (const auto& poi : pois) {
    if (poi.charger_class != ChargerClass::NormalWork && poi.charger_class != ChargerClass::SemiRapid &&
        poi.charger_class != ChargerClass::Fast) {
      continue;
    }
    const GeoPoint p = representative_point(poi);
    for (std::size_t i = 0; i < zones.size(); ++i) {
      if (!boxes[i].contains(p) || !geometry::point_in_polygon(p, zones[i].polygon)) continue;
      auto& e = out[i];
      switch (poi.charger_class) {
        case ChargerClass::NormalWork: e.a_office += poi.area_km2; break;
        case ChargerClass::SemiRapid: e.a_semi += poi.area_km2; break;
        case ChargerClass::Fast: e.a_fast += poi.area_km2; break;
        default: break;
      }
      break;
    }
  }
  for (auto& e : out) e.sum_a = e.a_office + e.a_semi + e.a_fast;
  return out;
}

PoiAreaEntry poi_area_table(const Zone& zone, const std::vector<PoiRecord>& pois) {
  return poi_area_tables({zone}, pois).front();
}

const char* to_string(EmptyPoiPolicy p) {
  return p == EmptyPoiPolicy::Error ? "error" : "nres";
}

EmptyPoiPolicy empty_poi_policy_from_string(const std::string& s) {
  if (s == "nres") return EmptyPoiPolicy::FoldIntoResidential;
  if (s == "error") return EmptyPoiPolicy::Error;
  throw ConfigError("unknown empty-POI fallback '" + s + "' (nres|error)");
}

SegmentedEntry segment_demand(double delta_regular, double delta_irregular, double alpha,
                              double gamma, const PoiAreaEntry& areas, EmptyPoiPolicy policy) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidFraction("alpha must be in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidFraction("gamma must be in [0, 1]");
  if (!(delta_regular >= 0.0) || !(delta_irregular >= 0.0) || !std::isfinite(delta_regular) ||
      !std::isfinite(delta_irregular)) {
    throw PreconditionViolation("zone demand must be finite and >= 0");
  }
  const double total = delta_regular + delta_irregular;
  SegmentedEntry s;
  s.phi_par = gamma * total;
  s.phi_nres = alpha * (1.0 - gamma) * total;
  const double rest = (1.0 - alpha) * (1.0 - gamma) * total;
  if (areas.sum_a > 0.0) {
    s.phi_noff = rest * (areas.a_office / areas.sum_a);
    s.phi_sem = rest * (areas.a_semi / areas.sum_a);
    s.phi_rap = rest * (areas.a_fast / areas.sum_a);
  } else if (rest > 0.0) {
    if (policy == EmptyPoiPolicy::Error) {
      throw EmptyPoiFallback("non-residential demand but no office/semi-rapid/fast POI area");
    }
    s.phi_nres += rest;
    s.empty_poi_fallback = true;
  }
  return s;
}

std::string segmented_demand_to_csv(const SegmentedDemand& s) {
  std::string out = "zone_id,phi_nres,phi_noff,phi_sem,phi_rap,phi_par\n";
  for (std::size_t i = 0; i < s.zone_ids.size(); ++i) {
    const auto& e = s.entries[i];
    out += csv::escape(s.zone_ids[i]) + "," + csv::fixed6(e.phi_nres) + "," + csv::fixed6(e.phi_noff) +
           "," + csv::fixed6(e.phi_sem) + "," + csv::fixed6(e.phi_rap) + "," + csv::fixed6(e.phi_par) +
           "\n";
  }
  return out;
}

SegmentedDemand segmented_demand_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line) ||
      csv::split(line) != std::vector<std::string>{"zone_id", "phi_nres", "phi_noff", "phi_sem",
                                                   "phi_rap", "phi_par"}) {
    throw SchemaError("segmented demand CSV needs header zone_id,phi_nres,phi_noff,phi_sem,phi_rap,phi_par");
  }
  SegmentedDemand s;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != 6) throw SchemaError("segmented demand CSV row needs 6 fields");
    SegmentedEntry e;
    try {
      e.phi_nres = std::stod(f[1]);
      e.phi_noff = std::stod(f[2]);
      e.phi_sem = std::stod(f[3]);
      e.phi_rap = std::stod(f[4]);
      e.phi_par = std::stod(f[5]);
    } catch (const std::exception&) {
      throw SchemaError("segmented demand CSV has a non-numeric value for '" + f[0] + "'");
    }
    s.zone_ids.push_back(f[0]);
    s.entries.push_back(e);
  }
  return s;
}

}  // namespace chargecast::segmentation
