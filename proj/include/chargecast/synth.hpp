// Synthetic cities with known ground truth, and a brute-force oracle that
// recomputes every pipeline quantity from closed-form geometry.
//
// Nothing here calls into the pipeline library; the two are meant to be
// compared against each other.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace chargecast::synth {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct CountRange {
  int lo = 0;
  int hi = 0;
};

struct SynthSpec {
  int n_zones = 4;  // 2..10, laid out row-major on a near-square grid
  std::uint64_t seed = 1;
  double zone_side_km = 1.0;
  double origin_lon = 4.35;
  double origin_lat = 50.84;

  Range trips_regular{0.0, 400.0};  // whole trips per ordered pair
  Range trips_irregular{0.0, 200.0};
  double empty_pair_probability = 0.2;
  double extrapolation_factor = 1.0;

  // Per zone.
  CountRange office_pois{0, 3};
  CountRange semi_rapid_pois{0, 3};
  CountRange fast_pois{0, 3};
  CountRange sport_pois{0, 2};
  CountRange other_pois{0, 2};
  CountRange node_pois{0, 2};

  Range residential_km{0.0, 3.0};
  Range major_km{0.0, 1.5};
  Range ignored_km{0.0, 1.0};

  Range tau{500.0, 15000.0};  // persons per km²
  Range chi{1.8, 2.8};
  Range sigma{0.0, 4000.0};
  double empty_zone_probability = 0.1;  // tau = 0
};

void validate(const SynthSpec& spec);

struct SynthZone {
  std::string id;
  std::string name;
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;
  double tau = 0.0;
  double chi = 0.0;
  double sigma = 0.0;
};

struct SynthPoi {
  std::int64_t osm_id = 0;
  std::string tag;
  std::size_t zone = 0;
  bool node = false;
  // Node: (min_lon, min_lat) is the coordinate. Way: an axis-aligned rectangle.
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;
};

// A north-south segment at constant longitude.
struct SynthHighway {
  std::int64_t osm_id = 0;
  std::string tag;
  std::size_t zone = 0;
  double lon = 0.0;
  double lat0 = 0.0;
  double lat1 = 0.0;
};

struct SynthTrip {
  std::size_t origin = 0;
  std::size_t dest = 0;
  double regular = 0.0;
  double irregular = 0.0;
};

struct City {
  std::vector<SynthZone> zones;
  std::vector<SynthPoi> pois;
  std::vector<SynthHighway> highways;
  std::vector<SynthTrip> trips;
  double extrapolation_factor = 1.0;
};

City generate_city(const SynthSpec& spec);

struct OracleChargerSpec {
  double power_kw = 0.0;
  double delivery = 0.0;
  double occupancy = 0.0;
  double hours = 0.0;
};

// Run parameters shared by the oracle and the generated pipeline config.
struct RunSettings {
  double dr_a = 0.759;
  double dr_b = 0.466;
  double kwh_per_km = 0.22;
  double detour_index = 1.417;
  std::size_t mc_samples = 2000;
  std::uint64_t mc_seed = 42;
  std::optional<double> ppr_cap;
  double traffic_reduction = 0.0;
  OracleChargerSpec normal{7.0, 0.8, 0.5, 24.0};
  OracleChargerSpec semi_rapid{22.0, 0.8, 0.8, 10.0};
  OracleChargerSpec rapid{100.0, 0.8, 0.25, 24.0};
};

struct OracleZone {
  std::string id;
  double area_km2 = 0.0;
  double delta_regular = 0.0;
  double delta_irregular = 0.0;
  double alpha = 1.0;
  double gamma = 0.0;
  double a_office = 0.0;
  double a_semi = 0.0;
  double a_fast = 0.0;
  double phi_nres = 0.0;
  double phi_noff = 0.0;
  double phi_sem = 0.0;
  double phi_rap = 0.0;
  double phi_par = 0.0;
  long long normal_resi = 0;
  long long normal_work = 0;
  long long semi_rapid = 0;
  long long rapid = 0;
  long long full_normal = 0;
};

struct OracleResult {
  std::vector<OracleZone> zones;
  std::vector<std::vector<double>> distance_km;
};

// Destination attribution; offline distances.
OracleResult oracle_evaluate(const City& city, const RunSettings& run);

struct SynthRequest {
  SynthSpec spec;
  RunSettings run;
};

SynthRequest parse_synth_request(const nlohmann::json& doc);
nlohmann::json to_json(const SynthRequest& req);

// zones.geojson, tacs.geojson, trips.csv, overpass.json, config.json and
// oracle.json (ground truth). Returns the config path.
std::filesystem::path write_city(const City& city, const RunSettings& run,
                                 const std::filesystem::path& dir);

std::string zones_geojson(const City& city);
std::string tacs_geojson(const City& city);
std::string trips_csv(const City& city);
std::string overpass_json(const City& city);
nlohmann::json pipeline_config_json(const RunSettings& run);
nlohmann::json oracle_json(const OracleResult& r);

}  // namespace chargecast::synth
