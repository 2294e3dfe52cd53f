// chargecast command line: full runs, stage entry points, validation and
// synthetic fixtures.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chargecast/config.hpp"
#include "chargecast/corrections.hpp"
#include "chargecast/demand.hpp"
#include "chargecast/distances.hpp"
#include "chargecast/errors.hpp"
#include "chargecast/ingest.hpp"
#include "chargecast/pipeline.hpp"
#include "chargecast/segmentation.hpp"
#include "chargecast/stations.hpp"
#include "chargecast/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chargecast;

namespace {

constexpr int kExitInternal = 1;

struct Overrides {
  std::optional<std::string> routing_backend;
  std::optional<std::string> routing_fixture;
  std::optional<double> detour_index;
  std::optional<std::string> traffic_day;
  std::optional<int> traffic_hour;
  std::optional<int> max_concurrent_requests;
  std::optional<double> kwh_per_km;
  std::optional<std::string> attribution;
  std::optional<double> ppr_cap;
  std::optional<std::string> ppr_formula;
  std::optional<std::string> dr_abscissa;
  std::optional<std::string> mode_share;
  std::optional<double> split_tolerance_km;
  std::optional<std::string> empty_poi_fallback;
  std::optional<double> traffic_reduction;
  bool full_normal = false;
  std::optional<std::string> charger_specs;
  std::optional<std::uint64_t> mc_seed;
  std::optional<std::size_t> mc_samples;
  std::optional<std::string> out_dir;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--routing-backend", o.routing_backend, "offline|fixture|remote");
  cmd->add_option("--routing-fixture", o.routing_fixture, "Recorded distances for the fixture backend");
  cmd->add_option("--detour-index", o.detour_index, "Straight-line to driving distance factor");
  cmd->add_option("--traffic-day", o.traffic_day, "Weekday sent to the routing backend");
  cmd->add_option("--traffic-hour", o.traffic_hour, "Hour (0-23) sent to the routing backend");
  cmd->add_option("--max-concurrent-requests", o.max_concurrent_requests);
  cmd->add_option("--kwh-per-km", o.kwh_per_km, "EV consumption");
  cmd->add_option("--attribution", o.attribution, "destination|origin|split");
  cmd->add_option("--ppr-cap", o.ppr_cap, "Upper bound on gamma");
  cmd->add_option("--ppr-formula", o.ppr_formula, "households|literal");
  cmd->add_option("--dr-abscissa", o.dr_abscissa, "midpoint|low|high");
  cmd->add_option("--mode-share", o.mode_share, "Mode-share CSV for the driving-ratio fit");
  cmd->add_option("--split-tolerance-km", o.split_tolerance_km);
  cmd->add_option("--empty-poi-fallback", o.empty_poi_fallback, "nres|error");
  cmd->add_option("--traffic-reduction", o.traffic_reduction, "Citywide demand reduction in [0, 1)");
  cmd->add_flag("--full-normal", o.full_normal, "Report totals as if only normal chargers were built");
  cmd->add_option("--charger-specs", o.charger_specs, "Charger technology JSON");
  cmd->add_option("--mc-seed", o.mc_seed);
  cmd->add_option("--mc-samples", o.mc_samples);
  cmd->add_option("--out", o.out_dir, "Output directory");
}

void apply(const Overrides& o, config::PipelineConfig& cfg) {
  if (o.routing_backend) cfg.routing.backend = config::backend_kind_from_string(*o.routing_backend);
  if (o.routing_fixture) cfg.routing.fixture = *o.routing_fixture;
  if (o.detour_index) cfg.routing.offline.detour_index = *o.detour_index;
  if (o.traffic_day) cfg.routing.traffic.weekday = distances::weekday_from_string(*o.traffic_day);
  if (o.traffic_hour) cfg.routing.traffic.hour = *o.traffic_hour;
  if (o.max_concurrent_requests) cfg.routing.max_concurrent_requests = *o.max_concurrent_requests;
  if (o.kwh_per_km) cfg.energy.kwh_per_km = *o.kwh_per_km;
  if (o.attribution) cfg.attribution = demand::attribution_from_string(*o.attribution);
  if (o.ppr_cap) cfg.ppr_cap = *o.ppr_cap;
  if (o.ppr_formula) cfg.ppr_formula = corrections::ppr_formula_from_string(*o.ppr_formula);
  if (o.dr_abscissa) cfg.driving_ratio.abscissa = corrections::abscissa_rule_from_string(*o.dr_abscissa);
  if (o.mode_share) {
    cfg.driving_ratio.mode_share = *o.mode_share;
    cfg.driving_ratio.a_param.reset();
    cfg.driving_ratio.b_param.reset();
  }
  if (o.split_tolerance_km) cfg.split_tolerance_km = *o.split_tolerance_km;
  if (o.empty_poi_fallback) cfg.empty_poi = segmentation::empty_poi_policy_from_string(*o.empty_poi_fallback);
  if (o.traffic_reduction) cfg.scenario.traffic_reduction = *o.traffic_reduction;
  if (o.full_normal) cfg.scenario.full_normal = true;
  if (o.charger_specs) cfg.charger_specs = *o.charger_specs;
  if (o.mc_seed) cfg.mc.seed = *o.mc_seed;
  if (o.mc_samples) cfg.mc.n_samples = *o.mc_samples;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
}

config::PipelineConfig load(const std::string& path, const Overrides& o) {
  auto cfg = config::load_config(path);
  apply(o, cfg);
  return cfg;
}

void write_text(const std::optional<std::string>& path, const std::string& text) {
  if (!path || *path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + *path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + *path);
}

void print_partial(const Diagnostics& d) {
  json w = json::array();
  for (const auto& x : d.warnings()) w.push_back({{"stage", x.stage}, {"code", x.code}, {"message", x.message}});
  std::cerr << json({{"partial_diagnostics", {{"warnings", w}, {"counters", d.counters()}}}}).dump(2) << "\n";
}

int cmd_run(const std::string& config_path, const Overrides& o) {
  const auto cfg = load(config_path, o);
  const auto result = pipeline::run_pipeline(cfg);
  const auto files = pipeline::emit_outputs(result, cfg);
  for (const auto& w : result.diagnostics.warnings()) {
    std::cerr << "warning [" << w.stage << "] " << w.code << ": " << w.message << "\n";
  }
  for (const auto& f : files) std::cout << f.string() << "\n";
  return 0;
}

int cmd_fit_dr(const std::optional<std::string>& mode_share, const std::string& rule) {
  const auto table = mode_share ? corrections::load_mode_share_csv(*mode_share)
                                : corrections::ModeShareTable::brussels_defaults();
  const auto m = corrections::fit_driving_ratio(table, corrections::abscissa_rule_from_string(rule));
  std::cout << json({{"a", m.a_param}, {"b", m.b_param}, {"sse", m.sse}, {"abscissa", rule}}).dump(2) << "\n";
  return 0;
}

std::unique_ptr<distances::RoutingBackend> backend_for(const config::PipelineConfig& cfg) {
  switch (cfg.routing.backend) {
    case config::BackendKind::Fixture:
      return std::make_unique<distances::FixtureBackend>(distances::FixtureBackend::load(cfg.routing.fixture));
    case config::BackendKind::Remote:
      return std::make_unique<distances::RemoteBackend>(cfg.routing.remote);
    case config::BackendKind::Offline: break;
  }
  return std::make_unique<distances::OfflineBackend>(cfg.routing.offline);
}

int cmd_distances(const std::string& config_path, const Overrides& o, const std::optional<std::string>& out,
                  bool no_diagonal) {
  auto cfg = load(config_path, o);
  config::validate(cfg);
  const auto zones = ingest::load_zones(cfg.zones);
  distances::BuildOptions opts;
  opts.max_concurrent_requests = cfg.routing.max_concurrent_requests;
  opts.retry_limit = cfg.routing.retry_limit;
  opts.backoff_base = std::chrono::milliseconds(cfg.routing.backoff_ms);
  auto m = distances::build_distance_matrix(zones, *backend_for(cfg), cfg.routing.traffic, opts);
  if (!no_diagonal) m = distances::fill_diagonal(std::move(m), zones, cfg.mc, cfg.routing.offline);
  write_text(out, distances::distance_matrix_to_csv(m));
  return 0;
}

int cmd_segment(const std::string& config_path, const Overrides& o, const std::string& demand_csv,
                const std::optional<std::string>& out) {
  auto cfg = load(config_path, o);
  config::validate(cfg);
  const auto zones = ingest::load_zones(cfg.zones);
  const auto demand = demand::zone_demand_from_csv(ingest::read_text_file(demand_csv));
  if (demand.zone_ids.size() != zones.size()) throw DimensionMismatch("zone demand rows do not match the zones file");
  Diagnostics diag;
  const auto taxonomy = cfg.taxonomy ? ingest::load_taxonomy(*cfg.taxonomy) : ingest::Taxonomy::defaults();
  const auto osm = ingest::parse_overpass(cfg.overpass, taxonomy, diag);
  const auto alpha = segmentation::residential_shares(zones, osm.highways, cfg.split_tolerance_km);
  const auto areas = segmentation::poi_area_tables(zones, osm.pois);
  segmentation::SegmentedDemand seg;
  for (std::size_t i = 0; i < zones.size(); ++i) {
    if (demand.zone_ids[i] != zones[i].id) throw DimensionMismatch("zone order differs at '" + zones[i].id + "'");
    const auto ppr = corrections::compute_ppr(zones[i], cfg.ppr_cap, cfg.ppr_formula);
    seg.zone_ids.push_back(zones[i].id);
    seg.entries.push_back(segmentation::segment_demand(demand.delta_regular[i], demand.delta_irregular[i],
                                                       alpha[i].alpha, ppr.gamma, areas[i], cfg.empty_poi));
  }
  write_text(out, segmentation::segmented_demand_to_csv(seg));
  return 0;
}

int cmd_stations(const std::string& config_path, const Overrides& o, const std::string& segmented_csv,
                 const std::optional<std::string>& by_zone_out) {
  auto cfg = load(config_path, o);
  stations::validate(cfg.scenario);
  const auto zones = ingest::load_zones(cfg.zones);
  const auto seg = segmentation::segmented_demand_from_csv(ingest::read_text_file(segmented_csv));
  const auto specs = cfg.charger_specs ? stations::load_charger_specs(*cfg.charger_specs) : stations::default_specs();
  const auto rep = stations::build_station_report(seg, specs, cfg.scenario, zones);
  std::cout << pipeline::stations_summary_csv(rep);
  if (by_zone_out) write_text(by_zone_out, pipeline::stations_by_zone_csv(rep));
  return 0;
}

int cmd_validate(const std::string& config_path, const Overrides& o) {
  auto cfg = load(config_path, o);
  config::validate(cfg);
  Diagnostics diag;
  const auto zones = ingest::load_zones(cfg.zones);
  const auto taxonomy = cfg.taxonomy ? ingest::load_taxonomy(*cfg.taxonomy) : ingest::Taxonomy::defaults();
  const auto osm = ingest::parse_overpass(cfg.overpass, taxonomy, diag);
  const auto table = ingest::load_trip_table(cfg.trips);
  ingest::CellZoneMap mapping;
  if (cfg.tacs) {
    mapping = ingest::assign_tacs_to_zones(ingest::load_tacs_cells(*cfg.tacs), zones);
  } else {
    for (const auto& z : zones) mapping[z.id] = z.id;
  }
  ingest::aggregate_trips(table, mapping, zones, diag);
  if (cfg.charger_specs) stations::load_charger_specs(*cfg.charger_specs);
  if (cfg.driving_ratio.mode_share) corrections::load_mode_share_csv(*cfg.driving_ratio.mode_share);
  if (cfg.routing.backend == config::BackendKind::Fixture) distances::FixtureBackend::load(cfg.routing.fixture);

  json w = json::array();
  for (const auto& x : diag.warnings()) w.push_back({{"stage", x.stage}, {"code", x.code}, {"message", x.message}});
  std::cout << json({{"ok", true},
                     {"zones", zones.size()},
                     {"pois", osm.pois.size()},
                     {"highways", osm.highways.size()},
                     {"trip_rows", table.rows.size()},
                     {"warnings", w},
                     {"counters", diag.counters()}})
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  json doc;
  try {
    doc = json::parse(ingest::read_text_file(spec_path));
  } catch (const json::parse_error& e) {
    throw ConfigError(spec_path + ": " + e.what());
  }
  synth::SynthRequest req;
  try {
    req = synth::parse_synth_request(doc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto city = synth::generate_city(req.spec);
  std::cout << synth::write_city(city, req.run, out_dir).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EV charging demand estimation from mobility data"};
  app.set_version_flag("--version", std::string(CHARGECAST_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;

  auto* run = app.add_subcommand("run", "Run the whole pipeline and write all outputs");
  run->add_option("--config", config_path, "Pipeline config JSON")->required();
  add_override_flags(run, overrides);

  std::optional<std::string> mode_share;
  std::string abscissa = "midpoint";
  auto* fit = app.add_subcommand("fit-dr", "Fit the driving-ratio curve to a mode-share table");
  fit->add_option("--mode-share", mode_share, "lo_km,hi_km,drive_share CSV (default: built-in survey)");
  fit->add_option("--dr-abscissa", abscissa, "midpoint|low|high");

  std::optional<std::string> out_file;
  bool no_diagonal = false;
  auto* dist = app.add_subcommand("distances", "Build the zone distance matrix");
  dist->add_option("--config", config_path)->required();
  dist->add_option("-o,--output", out_file, "CSV path (default stdout)");
  dist->add_flag("--no-diagonal", no_diagonal, "Leave intra-zone distances at 0");
  add_override_flags(dist, overrides);

  std::string demand_csv;
  auto* seg = app.add_subcommand("segment", "Split zone demand into the five charging categories");
  seg->add_option("--config", config_path)->required();
  seg->add_option("--zone-demand", demand_csv, "zone_demand.csv from a previous run")->required();
  seg->add_option("-o,--output", out_file, "CSV path (default stdout)");
  add_override_flags(seg, overrides);

  std::string segmented_csv;
  auto* sta = app.add_subcommand("stations", "Convert segmented demand into charging points");
  sta->add_option("--config", config_path)->required();
  sta->add_option("--segmented", segmented_csv, "segmented_demand.csv")->required();
  sta->add_option("--by-zone", out_file, "Also write per-zone counts here");
  add_override_flags(sta, overrides);

  auto* val = app.add_subcommand("validate", "Check config and input files without computing");
  val->add_option("--config", config_path)->required();
  add_override_flags(val, overrides);

  std::string spec_path;
  std::string synth_out;
  auto* syn = app.add_subcommand("synth", "Write a synthetic city fixture with oracle ground truth");
  syn->add_option("--spec", spec_path, "Synthetic city spec JSON")->required();
  syn->add_option("--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCategory::Config);
  }

  try {
    if (*run) return cmd_run(config_path, overrides);
    if (*fit) return cmd_fit_dr(mode_share, abscissa);
    if (*dist) return cmd_distances(config_path, overrides, out_file, no_diagonal);
    if (*seg) return cmd_segment(config_path, overrides, demand_csv, out_file);
    if (*sta) return cmd_stations(config_path, overrides, segmented_csv, out_file);
    if (*val) return cmd_validate(config_path, overrides);
    if (*syn) return cmd_synth(spec_path, synth_out);
  } catch (const pipeline::StageFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    print_partial(e.partial());
    return static_cast<int>(e.category());
  } catch (const BackendFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& p : e.pairs()) std::cerr << "  pair (" << p.origin << ", " << p.dest << "): " << p.cause << "\n";
    return static_cast<int>(e.category());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
