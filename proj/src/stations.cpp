#include "chargecast/stations.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "chargecast/errors.hpp"
#include "chargecast/geometry.hpp"
#include "chargecast/ingest.hpp"

namespace chargecast::stations {

using nlohmann::json;

const char* to_string(Technology t) {
  switch (t) {
    case Technology::Normal: return "normal";
    case Technology::SemiRapid: return "semi_rapid";
    case Technology::Rapid: return "rapid";
  }
  return "normal";
}

Technology technology_from_string(const std::string& s) {
  if (s == "normal" || s == "Normal") return Technology::Normal;
  if (s == "semi_rapid" || s == "semi-rapid" || s == "Semi-Rapid") return Technology::SemiRapid;
  if (s == "rapid" || s == "fast" || s == "Rapid") return Technology::Rapid;
  throw SchemaError("unknown charger technology '" + s + "' (normal|semi_rapid|rapid)");
}

void validate(const ChargerSpec& spec) {
  const std::string who = std::string(to_string(spec.technology)) + " spec: ";
  if (!(spec.power_kw > 0.0) || !std::isfinite(spec.power_kw)) throw ConfigError(who + "power must be > 0");
  if (!(spec.delivery > 0.0 && spec.delivery <= 1.0)) throw ConfigError(who + "delivery must be in (0, 1]");
  if (!(spec.occupancy > 0.0 && spec.occupancy <= 1.0)) throw ConfigError(who + "occupancy must be in (0, 1]");
  if (!(spec.hours > 0.0 && spec.hours <= 24.0)) throw ConfigError(who + "hours must be in (0, 24]");
}

double daily_capacity_kwh(const ChargerSpec& spec) {
  return spec.power_kw * spec.delivery * spec.occupancy * spec.hours;
}

long long stations_needed(double demand_kwh_day, const ChargerSpec& spec) {
  if (!(demand_kwh_day >= 0.0) || !std::isfinite(demand_kwh_day)) {
    throw PreconditionViolation("station demand must be finite and >= 0");
  }
  if (demand_kwh_day == 0.0) return 0;
  return static_cast<long long>(std::ceil(demand_kwh_day / daily_capacity_kwh(spec)));
}

std::vector<ChargerSpec> default_specs() {
  return {{Technology::Normal, 7.0, 0.8, 0.5, 24.0},
          {Technology::SemiRapid, 22.0, 0.8, 0.8, 10.0},
          {Technology::Rapid, 100.0, 0.8, 0.25, 24.0}};
}

std::vector<ChargerSpec> low_occupancy_specs() {
  return {{Technology::Normal, 7.0, 0.8, 0.15, 24.0},
          {Technology::SemiRapid, 22.0, 0.8, 0.15, 10.0},
          {Technology::Rapid, 100.0, 0.8, 0.18, 24.0}};
}

std::vector<ChargerSpec> parse_charger_specs(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("charger specs: ") + e.what());
  }
  if (!doc.is_array()) throw SchemaError("charger specs must be a JSON array");
  std::vector<ChargerSpec> out;
  for (const auto& item : doc) {
    try {
      ChargerSpec s;
      s.technology = technology_from_string(item.at("technology").get<std::string>());
      s.power_kw = item.at("power_kw").get<double>();
      s.delivery = item.at("delivery").get<double>();
      s.occupancy = item.at("occupancy").get<double>();
      s.hours = item.at("hours").get<double>();
      validate(s);
      out.push_back(s);
    } catch (const json::exception& e) {
      throw SchemaError(std::string("charger spec entry: ") + e.what());
    }
  }
  return out;
}

std::vector<ChargerSpec> load_charger_specs(const std::filesystem::path& path) {
  return parse_charger_specs(ingest::read_text_file(path));
}

std::string charger_specs_to_json(const std::vector<ChargerSpec>& specs) {
  json arr = json::array();
  for (const auto& s : specs) {
    arr.push_back({{"technology", to_string(s.technology)},
                   {"power_kw", s.power_kw},
                   {"delivery", s.delivery},
                   {"occupancy", s.occupancy},
                   {"hours", s.hours}});
  }
  return arr.dump(2) + "\n";
}

const ChargerSpec& find_spec(const std::vector<ChargerSpec>& specs, Technology t) {
  for (const auto& s : specs) {
    if (s.technology == t) return s;
  }
  throw MissingSpec(std::string("no charger spec for technology '") + to_string(t) + "'");
}

void validate(const ScenarioConfig& s) {
  if (!(s.traffic_reduction >= 0.0 && s.traffic_reduction < 1.0)) {
    throw ConfigError("traffic_reduction must be in [0, 1)");
  }
}

StationReport build_station_report(const segmentation::SegmentedDemand& seg,
                                   const std::vector<ChargerSpec>& specs,
                                   const ScenarioConfig& scenario, const std::vector<Zone>& zones) {
  validate(scenario);
  const ChargerSpec& normal = find_spec(specs, Technology::Normal);
  const ChargerSpec& semi = find_spec(specs, Technology::SemiRapid);
  const ChargerSpec& rapid = find_spec(specs, Technology::Rapid);
  for (const auto* s : {&normal, &semi, &rapid}) validate(*s);
  if (seg.zone_ids.size() != zones.size() || seg.entries.size() != zones.size()) {
    throw DimensionMismatch("segmented demand and zone list differ in length");
  }

  const double keep = 1.0 - scenario.traffic_reduction;
  StationReport rep;
  rep.scenario = scenario;
  rep.zones.resize(zones.size());
  for (std::size_t i = 0; i < zones.size(); ++i) {
    if (seg.zone_ids[i] != zones[i].id) {
      throw DimensionMismatch("zone order mismatch at '" + zones[i].id + "'");
    }
    const auto& e = seg.entries[i];
    const double nres = e.phi_nres * keep;
    const double noff = e.phi_noff * keep;
    const double sem = e.phi_sem * keep;
    const double rap = e.phi_rap * keep;

    auto& z = rep.zones[i];
    z.zone_id = zones[i].id;
    z.counts.normal_resi = stations_needed(nres, normal);
    z.counts.normal_work = stations_needed(noff, normal);
    z.counts.semi_rapid = stations_needed(sem, semi);
    z.counts.rapid = stations_needed(rap, rapid);
    z.public_demand_kwh_day = nres + noff + sem + rap;
    z.private_demand_kwh_day = e.phi_par * keep;
    z.counts.full_normal = stations_needed(z.public_demand_kwh_day, normal);
    z.area_km2 = geometry::polygon_area_km2(zones[i].polygon);
    z.stations_total = scenario.full_normal ? z.counts.full_normal : z.counts.mixed_total();
    z.stations_per_km2 = static_cast<double>(z.stations_total) / z.area_km2;

    rep.citywide.normal_resi += z.counts.normal_resi;
    rep.citywide.normal_work += z.counts.normal_work;
    rep.citywide.semi_rapid += z.counts.semi_rapid;
    rep.citywide.rapid += z.counts.rapid;
    rep.citywide.full_normal += z.counts.full_normal;
  }
  return rep;
}

}  // namespace chargecast::stations
