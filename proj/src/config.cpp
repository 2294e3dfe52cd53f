#include "chargecast/config.hpp"

#include <set>

#include "chargecast/errors.hpp"
#include "chargecast/ingest.hpp"

namespace chargecast::config {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(BackendKind k) {
  switch (k) {
    case BackendKind::Offline: return "offline";
    case BackendKind::Fixture: return "fixture";
    case BackendKind::Remote: return "remote";
  }
  return "offline";
}

BackendKind backend_kind_from_string(const std::string& s) {
  if (s == "offline") return BackendKind::Offline;
  if (s == "fixture") return BackendKind::Fixture;
  if (s == "remote") return BackendKind::Remote;
  throw ConfigError("unknown routing backend '" + s + "' (offline|fixture|remote)");
}

namespace {

// Reads keys from one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_ + " must be a JSON object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception&) {
        throw ConfigError(where_ + "." + key + " has the wrong type");
      }
    }
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    if (const json* v = find(key)) {
      T tmp{};
      try {
        tmp = v->get<T>();
      } catch (const json::exception&) {
        throw ConfigError(where_ + "." + key + " has the wrong type");
      }
      out = tmp;
    }
  }

  void path(const std::string& key, fs::path& out, const fs::path& base, bool required) {
    std::optional<std::string> s;
    get(key, s);
    if (!s) {
      if (required) throw ConfigError(where_ + ": missing required path '" + key + "'");
      return;
    }
    out = resolve(*s, base);
  }

  void path(const std::string& key, std::optional<fs::path>& out, const fs::path& base) {
    std::optional<std::string> s;
    get(key, s);
    if (s) out = resolve(*s, base);
  }

  const std::string& where() const { return where_; }

 private:
  static fs::path resolve(const std::string& s, const fs::path& base) {
    fs::path p(s);
    return p.is_absolute() ? p : (base / p).lexically_normal();
  }

  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

const json kEmpty = json::object();

const json& sub(Section& s, const std::string& key) {
  const json* v = s.find(key);
  return v ? *v : kEmpty;
}

}  // namespace

PipelineConfig parse_config(const json& doc, const fs::path& base_dir) {
  PipelineConfig cfg;
  Section top(doc, "config");
  top.path("zones", cfg.zones, base_dir, true);
  top.path("tacs", cfg.tacs, base_dir);
  top.path("trips", cfg.trips, base_dir, true);
  top.path("overpass", cfg.overpass, base_dir, true);
  top.path("taxonomy", cfg.taxonomy, base_dir);
  top.path("charger_specs", cfg.charger_specs, base_dir);
  top.path("out_dir", cfg.out_dir, base_dir, false);
  if (cfg.out_dir.is_relative()) cfg.out_dir = (base_dir / cfg.out_dir).lexically_normal();

  {
    Section r(sub(top, "routing"), "routing");
    std::string backend = to_string(cfg.routing.backend);
    r.get("backend", backend);
    cfg.routing.backend = backend_kind_from_string(backend);
    r.path("fixture", cfg.routing.fixture, base_dir, cfg.routing.backend == BackendKind::Fixture);
    r.get("detour_index", cfg.routing.offline.detour_index);
    std::string day = distances::to_string(cfg.routing.traffic.weekday);
    r.get("weekday", day);
    cfg.routing.traffic.weekday = distances::weekday_from_string(day);
    r.get("hour", cfg.routing.traffic.hour);
    r.get("max_concurrent_requests", cfg.routing.max_concurrent_requests);
    r.get("retry_limit", cfg.routing.retry_limit);
    r.get("backoff_ms", cfg.routing.backoff_ms);
    Section rem(sub(r, "remote"), "routing.remote");
    auto& rc = cfg.routing.remote;
    rem.get("url_template", rc.url_template);
    rem.get("response_km_pointer", rc.response_km_pointer);
    rem.get("response_scale", rc.response_scale);
    rem.get("api_key_env", rc.api_key_env);
    rem.get("max_requests_per_second", rc.max_requests_per_second);
    rem.get("timeout_s", rc.timeout_s);
  }
  {
    Section m(sub(top, "mc"), "mc");
    m.get("seed", cfg.mc.seed);
    m.get("samples", cfg.mc.n_samples);
  }
  {
    Section d(sub(top, "driving_ratio"), "driving_ratio");
    d.path("mode_share", cfg.driving_ratio.mode_share, base_dir);
    std::string rule = corrections::to_string(cfg.driving_ratio.abscissa);
    d.get("abscissa", rule);
    cfg.driving_ratio.abscissa = corrections::abscissa_rule_from_string(rule);
    d.get("a", cfg.driving_ratio.a_param);
    d.get("b", cfg.driving_ratio.b_param);
  }
  {
    Section e(sub(top, "energy"), "energy");
    e.get("kwh_per_km", cfg.energy.kwh_per_km);
    std::string attr = demand::to_string(cfg.attribution);
    e.get("attribution", attr);
    cfg.attribution = demand::attribution_from_string(attr);
  }
  {
    Section p(sub(top, "ppr"), "ppr");
    p.get("cap", cfg.ppr_cap);
    std::string formula = corrections::to_string(cfg.ppr_formula);
    p.get("formula", formula);
    cfg.ppr_formula = corrections::ppr_formula_from_string(formula);
  }
  {
    Section s(sub(top, "segmentation"), "segmentation");
    s.get("split_tolerance_km", cfg.split_tolerance_km);
    std::string policy = segmentation::to_string(cfg.empty_poi);
    s.get("empty_poi_fallback", policy);
    cfg.empty_poi = segmentation::empty_poi_policy_from_string(policy);
  }
  {
    Section s(sub(top, "stations"), "stations");
    s.get("traffic_reduction", cfg.scenario.traffic_reduction);
    s.get("full_normal", cfg.scenario.full_normal);
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = ingest::read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

namespace {

void require_file(const fs::path& p, const std::string& what) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw ConfigError(what + " file not found: " + p.string());
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  require_file(cfg.zones, "zones");
  require_file(cfg.trips, "trips");
  require_file(cfg.overpass, "overpass");
  if (cfg.tacs) require_file(*cfg.tacs, "tacs");
  if (cfg.taxonomy) require_file(*cfg.taxonomy, "taxonomy");
  if (cfg.charger_specs) require_file(*cfg.charger_specs, "charger specs");
  if (cfg.driving_ratio.mode_share) require_file(*cfg.driving_ratio.mode_share, "mode-share");
  if (cfg.routing.backend == BackendKind::Fixture) require_file(cfg.routing.fixture, "routing fixture");
  if (cfg.routing.backend == BackendKind::Remote && cfg.routing.remote.url_template.empty()) {
    throw ConfigError("routing.remote.url_template is required for the remote backend");
  }

  if (!(cfg.routing.offline.detour_index >= 1.0)) throw ConfigError("detour_index must be >= 1");
  if (cfg.routing.traffic.hour < 0 || cfg.routing.traffic.hour > 23) {
    throw ConfigError("routing.hour must be in [0, 23]");
  }
  if (cfg.routing.max_concurrent_requests < 1) throw ConfigError("max_concurrent_requests must be >= 1");
  if (cfg.routing.retry_limit < 0) throw ConfigError("retry_limit must be >= 0");
  if (cfg.routing.backoff_ms < 0) throw ConfigError("backoff_ms must be >= 0");
  if (cfg.mc.n_samples < 1) throw ConfigError("mc.samples must be >= 1");
  if (cfg.driving_ratio.a_param.has_value() != cfg.driving_ratio.b_param.has_value()) {
    throw ConfigError("driving_ratio.a and driving_ratio.b must be given together");
  }
  if (cfg.driving_ratio.a_param) {
    if (!(*cfg.driving_ratio.a_param >= 0.0 && *cfg.driving_ratio.a_param <= 1.0)) {
      throw ConfigError("driving_ratio.a must be in [0, 1]");
    }
    if (!(*cfg.driving_ratio.b_param > 0.0)) throw ConfigError("driving_ratio.b must be > 0");
  }
  demand::validate(cfg.energy);
  if (cfg.ppr_cap && !(*cfg.ppr_cap >= 0.0 && *cfg.ppr_cap <= 1.0)) {
    throw ConfigError("ppr.cap must be in [0, 1]");
  }
  if (!(cfg.split_tolerance_km > 0.0)) throw InvalidTolerance("split_tolerance_km must be > 0");
  stations::validate(cfg.scenario);
}

json to_json(const PipelineConfig& cfg) {
  auto opt_path = [](const std::optional<fs::path>& p) -> json {
    return p ? json(p->string()) : json(nullptr);
  };
  const auto& rc = cfg.routing.remote;
  json routing = {
      {"backend", to_string(cfg.routing.backend)},
      {"fixture", cfg.routing.fixture.empty() ? json(nullptr) : json(cfg.routing.fixture.string())},
      {"detour_index", cfg.routing.offline.detour_index},
      {"weekday", distances::to_string(cfg.routing.traffic.weekday)},
      {"hour", cfg.routing.traffic.hour},
      {"max_concurrent_requests", cfg.routing.max_concurrent_requests},
      {"retry_limit", cfg.routing.retry_limit},
      {"backoff_ms", cfg.routing.backoff_ms},
      {"remote",
       {{"url_template", rc.url_template},
        {"response_km_pointer", rc.response_km_pointer},
        {"response_scale", rc.response_scale},
        {"api_key_env", rc.api_key_env},
        {"max_requests_per_second", rc.max_requests_per_second},
        {"timeout_s", rc.timeout_s}}}};
  auto opt_num = [](const std::optional<double>& v) -> json { return v ? json(*v) : json(nullptr); };
  return {
      {"zones", cfg.zones.string()},
      {"tacs", opt_path(cfg.tacs)},
      {"trips", cfg.trips.string()},
      {"overpass", cfg.overpass.string()},
      {"taxonomy", opt_path(cfg.taxonomy)},
      {"charger_specs", opt_path(cfg.charger_specs)},
      {"out_dir", cfg.out_dir.string()},
      {"routing", routing},
      {"mc", {{"seed", cfg.mc.seed}, {"samples", cfg.mc.n_samples}}},
      {"driving_ratio",
       {{"mode_share", opt_path(cfg.driving_ratio.mode_share)},
        {"abscissa", corrections::to_string(cfg.driving_ratio.abscissa)},
        {"a", opt_num(cfg.driving_ratio.a_param)},
        {"b", opt_num(cfg.driving_ratio.b_param)}}},
      {"energy",
       {{"kwh_per_km", cfg.energy.kwh_per_km}, {"attribution", demand::to_string(cfg.attribution)}}},
      {"ppr", {{"cap", opt_num(cfg.ppr_cap)}, {"formula", corrections::to_string(cfg.ppr_formula)}}},
      {"segmentation",
       {{"split_tolerance_km", cfg.split_tolerance_km},
        {"empty_poi_fallback", segmentation::to_string(cfg.empty_poi)}}},
      {"stations",
       {{"traffic_reduction", cfg.scenario.traffic_reduction},
        {"full_normal", cfg.scenario.full_normal}}},
  };
}

}  // namespace chargecast::config
