// Loading and validation of zones, TACS cells, trip tables and Overpass
// exports, plus the amenity/highway taxonomy.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chargecast/diagnostics.hpp"
#include "chargecast/types.hpp"

namespace chargecast::ingest {

inline constexpr double kDefaultNodeFootprintKm2 = 0.0001;

// Tag value → class tables. The default reproduces the amenity table used for
// Brussels; other cities ship their own JSON file.
struct Taxonomy {
  std::map<std::string, ChargerClass> amenity;
  std::map<std::string, HighwayClass> highway;
  double node_footprint_km2 = kDefaultNodeFootprintKm2;

  static Taxonomy defaults();
};

Taxonomy load_taxonomy(const std::filesystem::path& path);
Taxonomy parse_taxonomy(const std::string& json_text);
std::string taxonomy_to_json(const Taxonomy& t);

ChargerClass classify_poi(const std::string& amenity_tag, const Taxonomy& taxonomy);
HighwayClass classify_highway(const std::string& highway_tag);
HighwayClass classify_highway(const std::string& highway_tag, const Taxonomy& taxonomy);

std::vector<Zone> load_zones(const std::filesystem::path& path);
std::vector<Zone> parse_zones(const std::string& geojson_text);

std::vector<TacsCell> load_tacs_cells(const std::filesystem::path& path);
std::vector<TacsCell> parse_tacs_cells(const std::string& geojson_text);

// CSV with header origin_tacs,dest_tacs,regular,irregular and an optional
// first-line pragma `#extrapolation_factor=<x>`.
TacsTripTable load_trip_table(const std::filesystem::path& path);
TacsTripTable parse_trip_table(const std::string& csv_text);

struct OverpassData {
  std::vector<PoiRecord> pois;
  std::vector<HighwayRecord> highways;
};

OverpassData parse_overpass(const std::filesystem::path& path, const Taxonomy& taxonomy,
                            Diagnostics& diag);
OverpassData parse_overpass_text(const std::string& json_text, const Taxonomy& taxonomy,
                                 Diagnostics& diag);

// cell id → zone id (nullopt when the cell overlaps no zone).
using CellZoneMap = std::map<std::string, std::optional<std::string>>;

CellZoneMap assign_tacs_to_zones(const std::vector<TacsCell>& cells, const std::vector<Zone>& zones);

TripMatrix aggregate_trips(const TacsTripTable& table, const CellZoneMap& mapping,
                           const std::vector<Zone>& zones, Diagnostics& diag);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace chargecast::ingest
