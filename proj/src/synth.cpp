#include "chargecast/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

namespace chargecast::synth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kR = 6371.0;
constexpr double kToDeg = 180.0 / std::numbers::pi;

const std::vector<std::string> kOfficeTags{"office"};
const std::vector<std::string> kSemiTags{"school", "hospital", "university", "clinic"};
const std::vector<std::string> kFastTags{"restaurant", "bar", "cafe", "fast_food", "pub"};
const std::vector<std::string> kSportTags{"sport"};
const std::vector<std::string> kOtherTags{"bench", "parking", "post_box"};
const std::vector<std::string> kMajorTags{"primary", "secondary", "tertiary", "motorway"};
const std::vector<std::string> kIgnoredTags{"footway", "service", "cycleway"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double in(const Range& r) { return r.lo + unit() * (r.hi - r.lo); }
  int in(const CountRange& r) {
    return r.lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(r.hi - r.lo + 1));
  }
  const std::string& pick(const std::vector<std::string>& v) { return v[eng_() % v.size()]; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 eng_;
};

void check_range(const Range& r, const char* name) {
  if (!(r.lo >= 0.0 && r.lo <= r.hi) || !std::isfinite(r.hi)) {
    throw std::invalid_argument(std::string("synth spec: ") + name + " needs 0 <= lo <= hi");
  }
}

void check_range(const CountRange& r, const char* name) {
  if (r.lo < 0 || r.lo > r.hi) {
    throw std::invalid_argument(std::string("synth spec: ") + name + " needs 0 <= lo <= hi");
  }
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void validate(const SynthSpec& s) {
  if (s.n_zones < 2 || s.n_zones > 10) throw std::invalid_argument("synth spec: n_zones must be in [2, 10]");
  if (!(s.zone_side_km >= 0.2 && s.zone_side_km <= 20.0)) {
    throw std::invalid_argument("synth spec: zone_side_km must be in [0.2, 20]");
  }
  if (!(std::abs(s.origin_lat) < 80.0) || !(std::abs(s.origin_lon) < 170.0)) {
    throw std::invalid_argument("synth spec: origin out of range");
  }
  check_range(s.trips_regular, "trips_regular");
  check_range(s.trips_irregular, "trips_irregular");
  check_range(s.office_pois, "office_pois");
  check_range(s.semi_rapid_pois, "semi_rapid_pois");
  check_range(s.fast_pois, "fast_pois");
  check_range(s.sport_pois, "sport_pois");
  check_range(s.other_pois, "other_pois");
  check_range(s.node_pois, "node_pois");
  check_range(s.residential_km, "residential_km");
  check_range(s.major_km, "major_km");
  check_range(s.ignored_km, "ignored_km");
  check_range(s.tau, "tau");
  check_range(s.sigma, "sigma");
  if (!(s.chi.lo > 0.0 && s.chi.lo <= s.chi.hi)) throw std::invalid_argument("synth spec: chi must be > 0");
  if (!(s.extrapolation_factor > 0.0)) throw std::invalid_argument("synth spec: extrapolation_factor must be > 0");
  for (double p : {s.empty_pair_probability, s.empty_zone_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("synth spec: probabilities must be in [0, 1]");
  }
}

City generate_city(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  City city;
  city.extrapolation_factor = spec.extrapolation_factor;

  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(spec.n_zones))));
  const double dlat = spec.zone_side_km / kR * kToDeg;
  const double dlon = spec.zone_side_km / (kR * std::cos(spec.origin_lat / kToDeg)) * kToDeg;
  for (int k = 0; k < spec.n_zones; ++k) {
    const int r = k / cols;
    const int c = k % cols;
    SynthZone z;
    char id[16];
    std::snprintf(id, sizeof id, "Z%02d", k + 1);
    z.id = id;
    z.name = "Zone " + std::to_string(k + 1);
    z.min_lon = spec.origin_lon + c * dlon;
    z.max_lon = spec.origin_lon + (c + 1) * dlon;
    z.min_lat = spec.origin_lat + r * dlat;
    z.max_lat = spec.origin_lat + (r + 1) * dlat;
    z.tau = rng.chance(spec.empty_zone_probability) ? 0.0 : rng.in(spec.tau);
    z.chi = rng.in(spec.chi);
    z.sigma = rng.in(spec.sigma);
    city.zones.push_back(z);
  }

  // Keep generated features 5 % of a side away from every zone edge.
  const double margin = 0.05;
  std::int64_t next_id = 1;
  for (std::size_t zi = 0; zi < city.zones.size(); ++zi) {
    const auto& z = city.zones[zi];
    const double span_lon = z.max_lon - z.min_lon;
    const double span_lat = z.max_lat - z.min_lat;
    const double km_lon = span_lon / spec.zone_side_km;  // degrees per km, near enough
    const double km_lat = span_lat / spec.zone_side_km;

    auto add_rect = [&](const std::string& tag) {
      const double w = (0.02 + 0.1 * rng.unit()) * km_lon;
      const double h = (0.02 + 0.1 * rng.unit()) * km_lat;
      SynthPoi p;
      p.osm_id = next_id++;
      p.tag = tag;
      p.zone = zi;
      p.min_lon = z.min_lon + margin * span_lon + rng.unit() * ((1 - 2 * margin) * span_lon - w);
      p.min_lat = z.min_lat + margin * span_lat + rng.unit() * ((1 - 2 * margin) * span_lat - h);
      p.max_lon = p.min_lon + w;
      p.max_lat = p.min_lat + h;
      city.pois.push_back(p);
    };
    const std::pair<const CountRange*, const std::vector<std::string>*> classes[] = {
        {&spec.office_pois, &kOfficeTags}, {&spec.semi_rapid_pois, &kSemiTags},
        {&spec.fast_pois, &kFastTags},     {&spec.sport_pois, &kSportTags},
        {&spec.other_pois, &kOtherTags}};
    for (const auto& [count, tags] : classes) {
      const int n = rng.in(*count);
      for (int k = 0; k < n; ++k) add_rect(rng.pick(*tags));
    }
    const int nodes = rng.in(spec.node_pois);
    for (int k = 0; k < nodes; ++k) {
      const auto* tags = classes[rng.in(CountRange{0, 4})].second;
      SynthPoi p;
      p.osm_id = next_id++;
      p.tag = rng.pick(*tags);
      p.zone = zi;
      p.node = true;
      p.min_lon = p.max_lon = z.min_lon + (margin + (1 - 2 * margin) * rng.unit()) * span_lon;
      p.min_lat = p.max_lat = z.min_lat + (margin + (1 - 2 * margin) * rng.unit()) * span_lat;
      city.pois.push_back(p);
    }

    auto add_lanes = [&](double total_km, const std::vector<std::string>& tags) {
      if (!(total_km > 0.0)) return;
      const double max_piece = 0.8 * spec.zone_side_km;
      const int n = static_cast<int>(std::ceil(total_km / max_piece));
      const double piece_deg = total_km / n / kR * kToDeg;
      for (int k = 0; k < n; ++k) {
        SynthHighway h;
        h.osm_id = next_id++;
        h.tag = rng.pick(tags);
        h.zone = zi;
        h.lon = z.min_lon + (margin + (1 - 2 * margin) * rng.unit()) * span_lon;
        h.lat0 = z.min_lat + margin * span_lat + rng.unit() * ((1 - 2 * margin) * span_lat - piece_deg);
        h.lat1 = h.lat0 + piece_deg;
        city.highways.push_back(h);
      }
    };
    // Some zones get only one road class so alpha hits 0 and 1 exactly.
    const double mode = rng.unit();
    const double res = mode < 0.15 ? 0.0 : rng.in(spec.residential_km);
    const double major = mode > 0.85 ? 0.0 : rng.in(spec.major_km);
    add_lanes(res, {"residential"});
    add_lanes(major, kMajorTags);
    add_lanes(rng.in(spec.ignored_km), kIgnoredTags);
  }

  auto whole = [&](const Range& r) { return std::floor(r.lo + rng.unit() * (r.hi - r.lo + 1.0)); };
  for (std::size_t i = 0; i < city.zones.size(); ++i) {
    for (std::size_t j = 0; j < city.zones.size(); ++j) {
      SynthTrip t{i, j, 0.0, 0.0};
      if (!rng.chance(spec.empty_pair_probability)) {
        t.regular = std::min(whole(spec.trips_regular), spec.trips_regular.hi);
        t.irregular = std::min(whole(spec.trips_irregular), spec.trips_irregular.hi);
      }
      city.trips.push_back(t);
    }
  }
  return city;
}

namespace {

json rect_ring(double x0, double y0, double x1, double y1) {
  return json::array({json::array({x0, y0}), json::array({x1, y0}), json::array({x1, y1}),
                      json::array({x0, y1}), json::array({x0, y0})});
}

json zone_feature(const SynthZone& z, json props) {
  return {{"type", "Feature"},
          {"properties", std::move(props)},
          {"geometry",
           {{"type", "Polygon"},
            {"coordinates", json::array({rect_ring(z.min_lon, z.min_lat, z.max_lon, z.max_lat)})}}}};
}

}  // namespace

std::string zones_geojson(const City& city) {
  json features = json::array();
  for (const auto& z : city.zones) {
    features.push_back(zone_feature(z, {{"id", z.id},
                                        {"name", z.name},
                                        {"pop_density_tau", z.tau},
                                        {"household_size_chi", z.chi},
                                        {"par_count_sigma", z.sigma}}));
  }
  return json({{"type", "FeatureCollection"}, {"features", features}}).dump(1) + "\n";
}

std::string tacs_geojson(const City& city) {
  json features = json::array();
  for (const auto& z : city.zones) features.push_back(zone_feature(z, {{"id", "cell-" + z.id}}));
  return json({{"type", "FeatureCollection"}, {"features", features}}).dump(1) + "\n";
}

std::string trips_csv(const City& city) {
  std::string out = "#extrapolation_factor=" + fmt17(city.extrapolation_factor) + "\n";
  out += "origin_tacs,dest_tacs,regular,irregular\n";
  for (const auto& t : city.trips) {
    out += "cell-" + city.zones[t.origin].id + ",cell-" + city.zones[t.dest].id + "," + fmt17(t.regular) +
           "," + fmt17(t.irregular) + "\n";
  }
  return out;
}

std::string overpass_json(const City& city) {
  json elements = json::array();
  auto pt = [](double lon, double lat) { return json{{"lat", lat}, {"lon", lon}}; };
  for (const auto& p : city.pois) {
    if (p.node) {
      elements.push_back({{"type", "node"},
                          {"id", p.osm_id},
                          {"lat", p.min_lat},
                          {"lon", p.min_lon},
                          {"tags", {{"amenity", p.tag}}}});
    } else {
      elements.push_back({{"type", "way"},
                          {"id", p.osm_id},
                          {"geometry",
                           json::array({pt(p.min_lon, p.min_lat), pt(p.max_lon, p.min_lat),
                                        pt(p.max_lon, p.max_lat), pt(p.min_lon, p.max_lat),
                                        pt(p.min_lon, p.min_lat)})},
                          {"tags", {{"amenity", p.tag}}}});
    }
  }
  for (const auto& h : city.highways) {
    elements.push_back({{"type", "way"},
                        {"id", h.osm_id},
                        {"geometry", json::array({pt(h.lon, h.lat0), pt(h.lon, h.lat1)})},
                        {"tags", {{"highway", h.tag}}}});
  }
  return json({{"version", 0.6}, {"generator", "chargecast synth"}, {"elements", elements}}).dump(1) + "\n";
}

namespace {

json spec_json(const char* tech, const OracleChargerSpec& s) {
  return {{"technology", tech},
          {"power_kw", s.power_kw},
          {"delivery", s.delivery},
          {"occupancy", s.occupancy},
          {"hours", s.hours}};
}

}  // namespace

json pipeline_config_json(const RunSettings& run) {
  return {
      {"zones", "zones.geojson"},
      {"tacs", "tacs.geojson"},
      {"trips", "trips.csv"},
      {"overpass", "overpass.json"},
      {"charger_specs", "charger_specs.json"},
      {"out_dir", "out"},
      {"routing", {{"backend", "offline"}, {"detour_index", run.detour_index}}},
      {"mc", {{"seed", run.mc_seed}, {"samples", run.mc_samples}}},
      {"driving_ratio", {{"a", run.dr_a}, {"b", run.dr_b}}},
      {"energy", {{"kwh_per_km", run.kwh_per_km}, {"attribution", "destination"}}},
      {"ppr", {{"cap", run.ppr_cap ? json(*run.ppr_cap) : json(nullptr)}, {"formula", "households"}}},
      {"stations", {{"traffic_reduction", run.traffic_reduction}, {"full_normal", false}}},
  };
}

fs::path write_city(const City& city, const RunSettings& run, const fs::path& dir) {
  fs::create_directories(dir);
  auto put = [&](const char* name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << content;
  };
  put("zones.geojson", zones_geojson(city));
  put("tacs.geojson", tacs_geojson(city));
  put("trips.csv", trips_csv(city));
  put("overpass.json", overpass_json(city));
  put("charger_specs.json", json::array({spec_json("normal", run.normal),
                                         spec_json("semi_rapid", run.semi_rapid),
                                         spec_json("rapid", run.rapid)})
                                .dump(2) +
                                "\n");
  put("config.json", pipeline_config_json(run).dump(2) + "\n");
  put("oracle.json", oracle_json(oracle_evaluate(city, run)).dump(2) + "\n");
  return dir / "config.json";
}

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw std::invalid_argument(where_ + " must be an object");
  }
  void finish() const {
    for (const auto& [k, _] : obj_.items()) {
      if (!seen_.count(k)) throw std::invalid_argument(where_ + ": unknown key '" + k + "'");
    }
  }
  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (auto it = obj_.find(key); it != obj_.end() && !it->is_null()) out = it->get<T>();
  }
  void range(const std::string& key, Range& out) {
    seen_.insert(key);
    if (auto it = obj_.find(key); it != obj_.end()) {
      out = {it->at(0).get<double>(), it->at(1).get<double>()};
    }
  }
  void range(const std::string& key, CountRange& out) {
    seen_.insert(key);
    if (auto it = obj_.find(key); it != obj_.end()) out = {it->at(0).get<int>(), it->at(1).get<int>()};
  }
  void charger(const std::string& key, OracleChargerSpec& out) {
    seen_.insert(key);
    if (auto it = obj_.find(key); it != obj_.end()) {
      out = {it->at("power_kw").get<double>(), it->at("delivery").get<double>(),
             it->at("occupancy").get<double>(), it->at("hours").get<double>()};
    }
  }
  const json* sub(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

SynthRequest parse_synth_request(const json& doc) {
  SynthRequest req;
  auto& s = req.spec;
  try {
    Reader r(doc, "synth spec");
    r.get("n_zones", s.n_zones);
    r.get("seed", s.seed);
    r.get("zone_side_km", s.zone_side_km);
    r.get("origin_lon", s.origin_lon);
    r.get("origin_lat", s.origin_lat);
    r.range("trips_regular", s.trips_regular);
    r.range("trips_irregular", s.trips_irregular);
    r.get("empty_pair_probability", s.empty_pair_probability);
    r.get("extrapolation_factor", s.extrapolation_factor);
    r.range("office_pois", s.office_pois);
    r.range("semi_rapid_pois", s.semi_rapid_pois);
    r.range("fast_pois", s.fast_pois);
    r.range("sport_pois", s.sport_pois);
    r.range("other_pois", s.other_pois);
    r.range("node_pois", s.node_pois);
    r.range("residential_km", s.residential_km);
    r.range("major_km", s.major_km);
    r.range("ignored_km", s.ignored_km);
    r.range("tau", s.tau);
    r.range("chi", s.chi);
    r.range("sigma", s.sigma);
    r.get("empty_zone_probability", s.empty_zone_probability);
    if (const json* run = r.sub("run")) {
      Reader rr(*run, "synth spec run");
      auto& k = req.run;
      rr.get("dr_a", k.dr_a);
      rr.get("dr_b", k.dr_b);
      rr.get("kwh_per_km", k.kwh_per_km);
      rr.get("detour_index", k.detour_index);
      rr.get("mc_samples", k.mc_samples);
      rr.get("mc_seed", k.mc_seed);
      if (const json* cap = rr.sub("ppr_cap"); cap && !cap->is_null()) k.ppr_cap = cap->get<double>();
      rr.get("traffic_reduction", k.traffic_reduction);
      rr.charger("normal", k.normal);
      rr.charger("semi_rapid", k.semi_rapid);
      rr.charger("rapid", k.rapid);
      rr.finish();
    }
    r.finish();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("synth spec: ") + e.what());
  }
  validate(s);
  return req;
}

json to_json(const SynthRequest& req) {
  const auto& s = req.spec;
  const auto& k = req.run;
  auto rg = [](const Range& r) { return json::array({r.lo, r.hi}); };
  auto cr = [](const CountRange& r) { return json::array({r.lo, r.hi}); };
  auto ch = [](const OracleChargerSpec& c) {
    return json{{"power_kw", c.power_kw}, {"delivery", c.delivery}, {"occupancy", c.occupancy}, {"hours", c.hours}};
  };
  return {
      {"n_zones", s.n_zones},
      {"seed", s.seed},
      {"zone_side_km", s.zone_side_km},
      {"origin_lon", s.origin_lon},
      {"origin_lat", s.origin_lat},
      {"trips_regular", rg(s.trips_regular)},
      {"trips_irregular", rg(s.trips_irregular)},
      {"empty_pair_probability", s.empty_pair_probability},
      {"extrapolation_factor", s.extrapolation_factor},
      {"office_pois", cr(s.office_pois)},
      {"semi_rapid_pois", cr(s.semi_rapid_pois)},
      {"fast_pois", cr(s.fast_pois)},
      {"sport_pois", cr(s.sport_pois)},
      {"other_pois", cr(s.other_pois)},
      {"node_pois", cr(s.node_pois)},
      {"residential_km", rg(s.residential_km)},
      {"major_km", rg(s.major_km)},
      {"ignored_km", rg(s.ignored_km)},
      {"tau", rg(s.tau)},
      {"chi", rg(s.chi)},
      {"sigma", rg(s.sigma)},
      {"empty_zone_probability", s.empty_zone_probability},
      {"run",
       {{"dr_a", k.dr_a},
        {"dr_b", k.dr_b},
        {"kwh_per_km", k.kwh_per_km},
        {"detour_index", k.detour_index},
        {"mc_samples", k.mc_samples},
        {"mc_seed", k.mc_seed},
        {"ppr_cap", k.ppr_cap ? json(*k.ppr_cap) : json(nullptr)},
        {"traffic_reduction", k.traffic_reduction},
        {"normal", ch(k.normal)},
        {"semi_rapid", ch(k.semi_rapid)},
        {"rapid", ch(k.rapid)}}},
  };
}

}  // namespace chargecast::synth
