// End-to-end run: ingest → distances → corrections → demand → segmentation →
// stations, then output emission.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chargecast/config.hpp"
#include "chargecast/corrections.hpp"
#include "chargecast/demand.hpp"
#include "chargecast/diagnostics.hpp"
#include "chargecast/errors.hpp"
#include "chargecast/segmentation.hpp"
#include "chargecast/stations.hpp"
#include "chargecast/types.hpp"

namespace chargecast::pipeline {

struct PipelineResult {
  std::vector<Zone> zones;
  std::vector<double> zone_area_km2;
  TripMatrix trips;
  DistanceMatrix distances;
  corrections::DrivingRatioModel driving_ratio;
  bool driving_ratio_fitted = false;
  TripMatrix driven_trips;
  demand::ZoneDemand demand;
  std::vector<double> demand_mwh_per_km2;
  std::vector<corrections::PprEntry> ppr;
  std::vector<segmentation::ResidentialShare> alpha;
  std::vector<segmentation::PoiAreaEntry> poi_areas;
  segmentation::SegmentedDemand segmented;
  stations::StationReport report;
  std::vector<stations::ChargerSpec> charger_specs;

  Diagnostics diagnostics;
  std::map<std::string, double> stage_seconds;
};

// Raised when a stage fails; keeps the original category (and thus the exit
// code) plus whatever diagnostics were collected before the failure.
class StageFailure : public Error {
 public:
  StageFailure(std::string stage, const Error& cause, Diagnostics partial);

  const std::string& stage() const { return stage_; }
  const std::string& cause_kind() const { return cause_kind_; }
  const Diagnostics& partial() const { return partial_; }

 private:
  std::string stage_;
  std::string cause_kind_;
  Diagnostics partial_;
};

// Runs every stage in memory. Nothing is written to disk.
PipelineResult run_pipeline(const config::PipelineConfig& cfg);

// Writes the output set into cfg.out_dir via a staging directory that is
// renamed into place once every file is complete.
std::vector<std::filesystem::path> emit_outputs(const PipelineResult& r,
                                                const config::PipelineConfig& cfg);

std::string choropleth_geojson(const PipelineResult& r);
std::string stations_summary_csv(const stations::StationReport& rep);
std::string segmentation_shares_csv(const segmentation::SegmentedDemand& seg);
std::string stations_by_zone_csv(const stations::StationReport& rep);
nlohmann::json build_manifest(const PipelineResult& r, const config::PipelineConfig& cfg);

}  // namespace chargecast::pipeline
