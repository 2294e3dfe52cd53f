#include "chargecast/demand.hpp"

#include <cmath>
#include <sstream>

#include "chargecast/errors.hpp"
#include "chargecast/geometry.hpp"
#include "chargecast/kernels.hpp"
#include "csv.hpp"

namespace chargecast::demand {

void validate(const EnergyConfig& cfg) {
  if (!(cfg.kwh_per_km >= 0.05 && cfg.kwh_per_km <= 1.0)) {
    throw ConfigError("kwh_per_km must be within [0.05, 1.0]");
  }
}

const char* to_string(Attribution a) {
  switch (a) {
    case Attribution::Destination: return "destination";
    case Attribution::Origin: return "origin";
    case Attribution::SplitHalf: return "split";
  }
  return "destination";
}

Attribution attribution_from_string(const std::string& s) {
  if (s == "destination") return Attribution::Destination;
  if (s == "origin") return Attribution::Origin;
  if (s == "split") return Attribution::SplitHalf;
  throw ConfigError("unknown attribution '" + s + "' (destination|origin|split)");
}

EnergyMatrices trips_to_energy(const TripMatrix& trips, const DistanceMatrix& dist,
                               const EnergyConfig& cfg) {
  validate(cfg);
  const std::size_t n = trips.regular.size();
  if (trips.irregular.size() != n || dist.km.size() != n || trips.zone_ids != dist.zone_ids) {
    throw DimensionMismatch("trip and distance matrices do not describe the same zones");
  }
  EnergyMatrices e{trips.zone_ids, Matrix(n), Matrix(n)};
  kernels::omp::energy(trips.regular, dist.km, cfg.kwh_per_km, e.regular);
  kernels::omp::energy(trips.irregular, dist.km, cfg.kwh_per_km, e.irregular);
  return e;
}

namespace {

std::vector<double> attribute(const Matrix& m, Attribution policy) {
  switch (policy) {
    case Attribution::Destination: return kernels::omp::col_sums(m);
    case Attribution::Origin: return kernels::omp::row_sums(m);
    case Attribution::SplitHalf: {
      auto rows = kernels::omp::row_sums(m);
      const auto cols = kernels::omp::col_sums(m);
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = 0.5 * rows[i] + 0.5 * cols[i];
      return rows;
    }
  }
  return {};
}

}  // namespace

ZoneDemand aggregate_zone_demand(const EnergyMatrices& energy, Attribution policy) {
  return {energy.zone_ids, attribute(energy.regular, policy), attribute(energy.irregular, policy)};
}

std::vector<double> normalize_by_area(const ZoneDemand& d, const std::vector<Zone>& zones) {
  if (zones.size() != d.zone_ids.size()) throw DimensionMismatch("zone count mismatch");
  std::vector<double> out(zones.size());
  for (std::size_t i = 0; i < zones.size(); ++i) {
    double area = 0.0;
    try {
      area = geometry::polygon_area_km2(zones[i].polygon);
    } catch (const DegenerateGeometry& e) {
      throw DegenerateGeometry("zone '" + zones[i].id + "': " + e.what());
    }
    if (!(area > 0.0)) throw DegenerateGeometry("zone '" + zones[i].id + "' has zero area");
    out[i] = d.total(i) / 1000.0 / area;
  }
  return out;
}

std::string zone_demand_to_csv(const ZoneDemand& d) {
  std::string out = "zone_id,delta_regular_kwh,delta_irregular_kwh\n";
  for (std::size_t i = 0; i < d.zone_ids.size(); ++i) {
    out += csv::escape(d.zone_ids[i]) + "," + csv::fixed6(d.delta_regular[i]) + "," +
           csv::fixed6(d.delta_irregular[i]) + "\n";
  }
  return out;
}

ZoneDemand zone_demand_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line) ||
      csv::split(line) !=
          std::vector<std::string>{"zone_id", "delta_regular_kwh", "delta_irregular_kwh"}) {
    throw SchemaError("zone demand CSV needs header zone_id,delta_regular_kwh,delta_irregular_kwh");
  }
  ZoneDemand d;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != 3) throw SchemaError("zone demand CSV row needs 3 fields");
    double r = 0.0;
    double ir = 0.0;
    try {
      r = std::stod(f[1]);
      ir = std::stod(f[2]);
    } catch (const std::exception&) {
      throw SchemaError("zone demand CSV has a non-numeric value for '" + f[0] + "'");
    }
    if (!(r >= 0.0) || !(ir >= 0.0)) throw SchemaError("zone demand must be >= 0");
    d.zone_ids.push_back(f[0]);
    d.delta_regular.push_back(r);
    d.delta_irregular.push_back(ir);
  }
  return d;
}

}  // namespace chargecast::demand
