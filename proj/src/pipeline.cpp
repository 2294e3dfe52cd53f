#include "chargecast/pipeline.hpp"

#include <chrono>
#include <memory>

#include "chargecast/distances.hpp"
#include "chargecast/geometry.hpp"
#include "chargecast/ingest.hpp"

namespace chargecast::pipeline {

StageFailure::StageFailure(std::string stage, const Error& cause, Diagnostics partial)
    : Error(cause.category(), cause.kind(), stage + ": " + cause.message()),
      stage_(std::move(stage)),
      cause_kind_(cause.kind()),
      partial_(std::move(partial)) {}

namespace {

template <typename Fn>
void run_stage(const std::string& name, PipelineResult& r, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn();
  } catch (const StageFailure&) {
    throw;
  } catch (const Error& e) {
    throw StageFailure(name, e, r.diagnostics);
  }
  r.stage_seconds[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::unique_ptr<distances::RoutingBackend> make_backend(const config::RoutingSection& rs) {
  switch (rs.backend) {
    case config::BackendKind::Fixture:
      return std::make_unique<distances::FixtureBackend>(distances::FixtureBackend::load(rs.fixture));
    case config::BackendKind::Remote:
      return std::make_unique<distances::RemoteBackend>(rs.remote);
    case config::BackendKind::Offline: break;
  }
  return std::make_unique<distances::OfflineBackend>(rs.offline);
}

}  // namespace

PipelineResult run_pipeline(const config::PipelineConfig& cfg) {
  PipelineResult r;
  Diagnostics& diag = r.diagnostics;

  run_stage("config", r, [&] { config::validate(cfg); });

  ingest::OverpassData osm;
  run_stage("ingest", r, [&] {
    r.zones = ingest::load_zones(cfg.zones);
    if (r.zones.empty()) throw SchemaError("zones file has no features");
    const auto taxonomy = cfg.taxonomy ? ingest::load_taxonomy(*cfg.taxonomy) : ingest::Taxonomy::defaults();
    osm = ingest::parse_overpass(cfg.overpass, taxonomy, diag);
    const auto table = ingest::load_trip_table(cfg.trips);

    ingest::CellZoneMap mapping;
    if (cfg.tacs) {
      mapping = ingest::assign_tacs_to_zones(ingest::load_tacs_cells(*cfg.tacs), r.zones);
    } else {
      for (const auto& z : r.zones) mapping[z.id] = z.id;
    }
    r.trips = ingest::aggregate_trips(table, mapping, r.zones, diag);
    r.zone_area_km2.reserve(r.zones.size());
    for (const auto& z : r.zones) {
      try {
        r.zone_area_km2.push_back(geometry::polygon_area_km2(z.polygon));
      } catch (const DegenerateGeometry& e) {
        throw DegenerateGeometry("zone '" + z.id + "': " + e.message());
      }
    }
  });

  run_stage("distances", r, [&] {
    const auto backend = make_backend(cfg.routing);
    distances::BuildOptions opts;
    opts.max_concurrent_requests = cfg.routing.max_concurrent_requests;
    opts.retry_limit = cfg.routing.retry_limit;
    opts.backoff_base = std::chrono::milliseconds(cfg.routing.backoff_ms);
    auto m = distances::build_distance_matrix(r.zones, *backend, cfg.routing.traffic, opts);
    r.distances = distances::fill_diagonal(std::move(m), r.zones, cfg.mc, cfg.routing.offline);
  });

  run_stage("corrections", r, [&] {
    if (cfg.driving_ratio.a_param && cfg.driving_ratio.b_param) {
      r.driving_ratio = {*cfg.driving_ratio.a_param, *cfg.driving_ratio.b_param, 0.0};
    } else {
      const auto table = cfg.driving_ratio.mode_share
                             ? corrections::load_mode_share_csv(*cfg.driving_ratio.mode_share)
                             : corrections::ModeShareTable::brussels_defaults();
      r.driving_ratio = corrections::fit_driving_ratio(table, cfg.driving_ratio.abscissa);
      r.driving_ratio_fitted = true;
    }
    r.driven_trips = corrections::apply_driving_ratio(r.trips, r.distances, r.driving_ratio);
    for (const auto& z : r.zones) {
      const auto e = corrections::compute_ppr(z, cfg.ppr_cap, cfg.ppr_formula);
      if (e.no_households) {
        diag.warn("corrections", "NoHouseholds",
                  "zone '" + z.id + "' has private parking but no households; gamma set to " +
                      std::to_string(e.gamma));
      }
      if (e.clamped) diag.count("ppr.clamped_zones");
      r.ppr.push_back(e);
    }
  });

  run_stage("demand", r, [&] {
    const auto energy = demand::trips_to_energy(r.driven_trips, r.distances, cfg.energy);
    r.demand = demand::aggregate_zone_demand(energy, cfg.attribution);
    r.demand_mwh_per_km2 = demand::normalize_by_area(r.demand, r.zones);
  });

  run_stage("segmentation", r, [&] {
    r.alpha = segmentation::residential_shares(r.zones, osm.highways, cfg.split_tolerance_km);
    r.poi_areas = segmentation::poi_area_tables(r.zones, osm.pois);
    r.segmented.zone_ids = r.demand.zone_ids;
    for (std::size_t i = 0; i < r.zones.size(); ++i) {
      const auto& zid = r.zones[i].id;
      if (r.alpha[i].degenerate) {
        diag.warn("segmentation", "DegenerateAlpha", "zone '" + zid + "' has no classified road; alpha = 1");
      }
      segmentation::SegmentedEntry e;
      try {
        e = segmentation::segment_demand(r.demand.delta_regular[i], r.demand.delta_irregular[i],
                                         r.alpha[i].alpha, r.ppr[i].gamma, r.poi_areas[i], cfg.empty_poi);
      } catch (const EmptyPoiFallback& ex) {
        throw EmptyPoiFallback("zone '" + zid + "': " + ex.message());
      }
      if (e.empty_poi_fallback) {
        diag.warn("segmentation", "EmptyPoiFallback",
                  "zone '" + zid + "' has no office/semi-rapid/fast POI area; non-residential demand folded into normal residential");
      }
      r.segmented.entries.push_back(e);
    }
  });

  run_stage("stations", r, [&] {
    r.charger_specs = cfg.charger_specs ? stations::load_charger_specs(*cfg.charger_specs)
                                        : stations::default_specs();
    r.report = stations::build_station_report(r.segmented, r.charger_specs, cfg.scenario, r.zones);
  });

  return r;
}

}  // namespace chargecast::pipeline
