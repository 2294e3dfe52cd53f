// Pipeline configuration: one JSON document, paths relative to the file.
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "chargecast/corrections.hpp"
#include "chargecast/demand.hpp"
#include "chargecast/distances.hpp"
#include "chargecast/geometry.hpp"
#include "chargecast/segmentation.hpp"
#include "chargecast/stations.hpp"

namespace chargecast::config {

enum class BackendKind { Offline, Fixture, Remote };

const char* to_string(BackendKind k);
BackendKind backend_kind_from_string(const std::string& s);

struct RoutingSection {
  BackendKind backend = BackendKind::Offline;
  std::filesystem::path fixture;
  distances::OfflineRoutingConfig offline;
  distances::RemoteRoutingConfig remote;
  distances::TrafficContext traffic;
  int max_concurrent_requests = 4;
  int retry_limit = 3;
  int backoff_ms = 200;
};

struct DrivingRatioSection {
  std::optional<std::filesystem::path> mode_share;  // default: built-in survey table
  corrections::AbscissaRule abscissa = corrections::AbscissaRule::BinMidpoint;
  // When both are set the fit is skipped.
  std::optional<double> a_param;
  std::optional<double> b_param;
};

struct PipelineConfig {
  std::filesystem::path zones;
  std::optional<std::filesystem::path> tacs;
  std::filesystem::path trips;
  std::filesystem::path overpass;
  std::optional<std::filesystem::path> taxonomy;
  std::optional<std::filesystem::path> charger_specs;
  std::filesystem::path out_dir = "out";

  RoutingSection routing;
  geometry::McConfig mc;
  DrivingRatioSection driving_ratio;
  demand::EnergyConfig energy;
  demand::Attribution attribution = demand::Attribution::Destination;
  std::optional<double> ppr_cap;
  corrections::PprFormula ppr_formula = corrections::PprFormula::Households;
  double split_tolerance_km = geometry::kDefaultSplitToleranceKm;
  segmentation::EmptyPoiPolicy empty_poi = segmentation::EmptyPoiPolicy::FoldIntoResidential;
  stations::ScenarioConfig scenario;
};

// Unknown keys are rejected. Relative paths resolve against base_dir.
PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// Ranges and file existence.
void validate(const PipelineConfig& cfg);

// Round-trips through parse_config; every numeric setting is present.
nlohmann::json to_json(const PipelineConfig& cfg);

}  // namespace chargecast::config
