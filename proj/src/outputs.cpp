#include <fstream>
#include <unistd.h>

#include "chargecast/distances.hpp"
#include "chargecast/pipeline.hpp"
#include "csv.hpp"

namespace chargecast::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json ring_json(const Ring& ring) {
  json arr = json::array();
  for (const auto& p : ring) arr.push_back({p.lon, p.lat});
  return arr;
}

json polygon_json(const GeoPolygon& p) {
  json rings = json::array();
  rings.push_back(ring_json(p.exterior));
  for (const auto& h : p.holes) rings.push_back(ring_json(h));
  return {{"type", "Polygon"}, {"coordinates", rings}};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string choropleth_geojson(const PipelineResult& r) {
  json features = json::array();
  for (std::size_t i = 0; i < r.zones.size(); ++i) {
    const auto& z = r.zones[i];
    const auto& e = r.segmented.entries[i];
    const auto& s = r.report.zones[i];
    const double total = r.demand.total(i);
    json props = {
        {"zone_id", z.id},
        {"name", z.name},
        {"area_km2", r.zone_area_km2[i]},
        {"delta_regular_kwh", r.demand.delta_regular[i]},
        {"delta_irregular_kwh", r.demand.delta_irregular[i]},
        {"demand_kwh_day", total},
        {"demand_mwh_per_km2", r.demand_mwh_per_km2[i]},
        {"public_demand_kwh_day", e.public_total()},
        {"phi_nres", e.phi_nres},
        {"phi_noff", e.phi_noff},
        {"phi_sem", e.phi_sem},
        {"phi_rap", e.phi_rap},
        {"phi_par", e.phi_par},
        {"alpha", r.alpha[i].alpha},
        {"gamma", r.ppr[i].gamma},
        {"stations_normal_resi", s.counts.normal_resi},
        {"stations_normal_work", s.counts.normal_work},
        {"stations_semi_rapid", s.counts.semi_rapid},
        {"stations_rapid", s.counts.rapid},
        {"stations_full_normal", s.counts.full_normal},
        {"stations_total", s.stations_total},
        {"stations_per_km2", s.stations_per_km2},
        {"has_demand", total > 0.0},
    };
    features.push_back({{"type", "Feature"}, {"id", z.id}, {"properties", props}, {"geometry", polygon_json(z.polygon)}});
  }
  json fc = {{"type", "FeatureCollection"}, {"features", features}};
  return fc.dump(1) + "\n";
}

std::string stations_summary_csv(const stations::StationReport& rep) {
  const auto& c = rep.citywide;
  std::string out = "technology,stations\n";
  out += "Normal (Resi)," + std::to_string(c.normal_resi) + "\n";
  out += "Normal (Work)," + std::to_string(c.normal_work) + "\n";
  out += "Semi-Rapid," + std::to_string(c.semi_rapid) + "\n";
  out += "Rapid," + std::to_string(c.rapid) + "\n";
  out += "Full Normal," + std::to_string(c.full_normal) + "\n";
  return out;
}

std::string segmentation_shares_csv(const segmentation::SegmentedDemand& seg) {
  std::string out = "zone_id,pct_nres,pct_noff,pct_sem,pct_rap,pct_par,has_demand\n";
  for (std::size_t i = 0; i < seg.zone_ids.size(); ++i) {
    const auto& e = seg.entries[i];
    const double t = e.total();
    // Zones without demand get zeros rather than 0/0.
    auto pct = [t](double v) { return t > 0.0 ? 100.0 * v / t : 0.0; };
    out += csv::escape(seg.zone_ids[i]) + "," + csv::fixed6(pct(e.phi_nres)) + "," +
           csv::fixed6(pct(e.phi_noff)) + "," + csv::fixed6(pct(e.phi_sem)) + "," +
           csv::fixed6(pct(e.phi_rap)) + "," + csv::fixed6(pct(e.phi_par)) + "," + (t > 0.0 ? "1" : "0") +
           "\n";
  }
  return out;
}

std::string stations_by_zone_csv(const stations::StationReport& rep) {
  std::string out =
      "zone_id,normal_resi,normal_work,semi_rapid,rapid,full_normal,stations_total,area_km2,stations_per_km2\n";
  for (const auto& z : rep.zones) {
    out += csv::escape(z.zone_id) + "," + std::to_string(z.counts.normal_resi) + "," +
           std::to_string(z.counts.normal_work) + "," + std::to_string(z.counts.semi_rapid) + "," +
           std::to_string(z.counts.rapid) + "," + std::to_string(z.counts.full_normal) + "," +
           std::to_string(z.stations_total) + "," + csv::fixed6(z.area_km2) + "," +
           csv::fixed6(z.stations_per_km2) + "\n";
  }
  return out;
}

json build_manifest(const PipelineResult& r, const config::PipelineConfig& cfg) {
  json warnings = json::array();
  for (const auto& w : r.diagnostics.warnings()) {
    warnings.push_back({{"stage", w.stage}, {"code", w.code}, {"message", w.message}});
  }
  json seeds = json::object();
  for (const auto& z : r.zones) seeds[z.id] = distances::zone_seed(cfg.mc.seed, z.id);
  json specs = json::array();
  for (const auto& s : r.charger_specs) {
    specs.push_back({{"technology", stations::to_string(s.technology)},
                     {"power_kw", s.power_kw},
                     {"delivery", s.delivery},
                     {"occupancy", s.occupancy},
                     {"hours", s.hours},
                     {"daily_capacity_kwh", stations::daily_capacity_kwh(s)}});
  }
  const auto& c = r.report.citywide;
  return {
      {"software", {{"name", "chargecast"}, {"version", CHARGECAST_VERSION}}},
      {"config", config::to_json(cfg)},
      {"zones", r.zones.size()},
      {"driving_ratio",
       {{"a", r.driving_ratio.a_param},
        {"b", r.driving_ratio.b_param},
        {"sse", r.driving_ratio_fitted ? json(r.driving_ratio.sse) : json(nullptr)},
        {"fitted", r.driving_ratio_fitted}}},
      {"charger_specs", specs},
      {"mc_zone_seeds", seeds},
      {"citywide",
       {{"normal_resi", c.normal_resi},
        {"normal_work", c.normal_work},
        {"semi_rapid", c.semi_rapid},
        {"rapid", c.rapid},
        {"full_normal", c.full_normal}}},
      {"diagnostics", {{"warnings", warnings}, {"counters", r.diagnostics.counters()}}},
      {"timing_s", r.stage_seconds},
  };
}

std::vector<fs::path> emit_outputs(const PipelineResult& r, const config::PipelineConfig& cfg) {
  fs::path out_dir = cfg.out_dir;
  if (out_dir.filename().empty()) out_dir = out_dir.parent_path();
  const fs::path parent = out_dir.parent_path().empty() ? fs::path(".") : out_dir.parent_path();
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create " + parent.string() + ": " + ec.message());

  const std::string tag = "." + out_dir.filename().string() + ".tmp-" + std::to_string(::getpid());
  const fs::path staging = parent / (tag + "-new");
  const fs::path backup = parent / (tag + "-old");
  fs::remove_all(staging, ec);
  fs::create_directory(staging, ec);
  if (ec) throw IoError("cannot create staging directory " + staging.string() + ": " + ec.message());

  const std::vector<std::pair<std::string, std::string>> files = {
      {"zones_choropleth.geojson", choropleth_geojson(r)},
      {"stations_summary.csv", stations_summary_csv(r.report)},
      {"segmentation_shares.csv", segmentation_shares_csv(r.segmented)},
      {"stations_by_zone.csv", stations_by_zone_csv(r.report)},
      {"segmented_demand.csv", segmentation::segmented_demand_to_csv(r.segmented)},
      {"zone_demand.csv", demand::zone_demand_to_csv(r.demand)},
      {"distances.csv", distances::distance_matrix_to_csv(r.distances)},
      {"manifest.json", build_manifest(r, cfg).dump(2) + "\n"},
  };
  std::vector<fs::path> written;
  try {
    for (const auto& [name, content] : files) {
      write_file(staging / name, content);
      written.push_back(out_dir / name);
    }
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }

  const bool had_old = fs::exists(out_dir);
  if (had_old) {
    fs::rename(out_dir, backup, ec);
    if (ec) {
      fs::remove_all(staging, ec);
      throw IoError("cannot move aside existing " + out_dir.string());
    }
  }
  fs::rename(staging, out_dir, ec);
  if (ec) {
    const std::string msg = ec.message();
    if (had_old) fs::rename(backup, out_dir, ec);
    fs::remove_all(staging, ec);
    throw IoError("cannot move outputs into " + out_dir.string() + ": " + msg);
  }
  if (had_old) fs::remove_all(backup, ec);
  return written;
}

}  // namespace chargecast::pipeline
