// Trips → kWh → per-zone regular (Δ_i) and irregular (Δ_j) demand.
#pragma once

#include <string>
#include <vector>

#include "chargecast/types.hpp"

namespace chargecast::demand {

inline constexpr double kDefaultKwhPerKm = 0.22;

struct EnergyConfig {
  double kwh_per_km = kDefaultKwhPerKm;
};

void validate(const EnergyConfig& cfg);

struct EnergyMatrices {
  std::vector<std::string> zone_ids;
  Matrix regular;
  Matrix irregular;
};

enum class Attribution { Destination, Origin, SplitHalf };

const char* to_string(Attribution a);
Attribution attribution_from_string(const std::string& s);

// kWh per average workday.
struct ZoneDemand {
  std::vector<std::string> zone_ids;
  std::vector<double> delta_regular;
  std::vector<double> delta_irregular;

  double total(std::size_t i) const { return delta_regular[i] + delta_irregular[i]; }
};

EnergyMatrices trips_to_energy(const TripMatrix& trips, const DistanceMatrix& dist,
                               const EnergyConfig& cfg);

ZoneDemand aggregate_zone_demand(const EnergyMatrices& energy,
                                 Attribution policy = Attribution::Destination);

// (Δ_i + Δ_j) in MWh per km² of zone area.
std::vector<double> normalize_by_area(const ZoneDemand& d, const std::vector<Zone>& zones);

std::string zone_demand_to_csv(const ZoneDemand& d);
ZoneDemand zone_demand_from_csv(const std::string& csv_text);

}  // namespace chargecast::demand
