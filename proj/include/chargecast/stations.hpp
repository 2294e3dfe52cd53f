// Segmented kWh/day → charging points per technology.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chargecast/segmentation.hpp"
#include "chargecast/types.hpp"

namespace chargecast::stations {

enum class Technology { Normal, SemiRapid, Rapid };

const char* to_string(Technology t);
Technology technology_from_string(const std::string& s);

struct ChargerSpec {
  Technology technology = Technology::Normal;
  double power_kw = 0.0;
  double delivery = 0.0;
  double occupancy = 0.0;
  double hours = 0.0;
};

void validate(const ChargerSpec& spec);

double daily_capacity_kwh(const ChargerSpec& spec);

// ceil(demand / capacity); 0 for zero demand.
long long stations_needed(double demand_kwh_day, const ChargerSpec& spec);

// 7/22/100 kW at 50/80/25 % occupancy.
std::vector<ChargerSpec> default_specs();
// Same powers with occupancy from the usage literature (15–28 %).
std::vector<ChargerSpec> low_occupancy_specs();

std::vector<ChargerSpec> parse_charger_specs(const std::string& json_text);
std::vector<ChargerSpec> load_charger_specs(const std::filesystem::path& path);
std::string charger_specs_to_json(const std::vector<ChargerSpec>& specs);

const ChargerSpec& find_spec(const std::vector<ChargerSpec>& specs, Technology t);

struct ScenarioConfig {
  double traffic_reduction = 0.0;
  bool full_normal = false;
};

void validate(const ScenarioConfig& s);

struct StationCounts {
  long long normal_resi = 0;
  long long normal_work = 0;
  long long semi_rapid = 0;
  long long rapid = 0;
  long long full_normal = 0;

  long long mixed_total() const { return normal_resi + normal_work + semi_rapid + rapid; }
  friend bool operator==(const StationCounts&, const StationCounts&) = default;
};

struct ZoneStations {
  std::string zone_id;
  StationCounts counts;
  double area_km2 = 0.0;
  // Total under the active scenario (mixed, or full normal).
  long long stations_total = 0;
  double stations_per_km2 = 0.0;
  double public_demand_kwh_day = 0.0;
  double private_demand_kwh_day = 0.0;
};

struct StationReport {
  std::vector<ZoneStations> zones;
  StationCounts citywide;
  ScenarioConfig scenario;
};

StationReport build_station_report(const segmentation::SegmentedDemand& seg,
                                   const std::vector<ChargerSpec>& specs,
                                   const ScenarioConfig& scenario, const std::vector<Zone>& zones);

}  // namespace chargecast::stations
