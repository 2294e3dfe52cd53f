#include "chargecast/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "chargecast/errors.hpp"
#include "chargecast/geometry.hpp"
#include "chargecast/kernels.hpp"
#include "csv.hpp"

namespace chargecast::ingest {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(what + " is not valid JSON: " + e.what());
  }
}

double number_field(const json& obj, const std::string& key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw SchemaError(context + ": missing property '" + key + "'");
  }
  if (!it->is_number()) throw SchemaError(context + ": property '" + key + "' must be a number");
  return it->get<double>();
}

std::string string_field(const json& obj, const std::string& key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw SchemaError(context + ": missing property '" + key + "'");
  }
  if (!it->is_string()) throw SchemaError(context + ": property '" + key + "' must be a string");
  return it->get<std::string>();
}

Ring parse_ring(const json& coords, const std::string& context) {
  if (!coords.is_array()) throw SchemaError(context + ": ring must be an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& c : coords) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      throw SchemaError(context + ": position must be [lon, lat]");
    }
    ring.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return ring;
}

GeoPolygon parse_polygon_geometry(const json& geometry, const std::string& context) {
  if (!geometry.is_object()) throw SchemaError(context + ": missing geometry");
  if (geometry.value("type", "") != "Polygon") {
    throw SchemaError(context + ": geometry must be a Polygon");
  }
  auto cit = geometry.find("coordinates");
  if (cit == geometry.end()) throw SchemaError(context + ": Polygon has no coordinates");
  const auto& coords = *cit;
  if (!coords.is_array() || coords.empty()) {
    throw SchemaError(context + ": Polygon needs at least one ring");
  }
  GeoPolygon p;
  p.exterior = parse_ring(coords[0], context);
  for (std::size_t i = 1; i < coords.size(); ++i) p.holes.push_back(parse_ring(coords[i], context));
  try {
    geometry::validate_polygon(p);
  } catch (const SchemaError& e) {
    throw SchemaError(context + ": " + e.what());
  }
  return p;
}

const json& features_of(const json& doc, const std::string& what) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    throw SchemaError(what + " must be a GeoJSON FeatureCollection");
  }
  auto it = doc.find("features");
  if (it == doc.end() || !it->is_array()) throw SchemaError(what + " has no features array");
  return *it;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& field, const std::string& context) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw SchemaError(context + ": '" + field + "' is not a number");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) { return csv::split(line); }

std::vector<GeoPoint> parse_overpass_geometry(const json& geom) {
  std::vector<GeoPoint> pts;
  for (const auto& g : geom) {
    if (!g.is_object() || !g.contains("lat") || !g.contains("lon")) continue;
    if (!g["lat"].is_number() || !g["lon"].is_number()) continue;
    pts.push_back({g["lon"].get<double>(), g["lat"].get<double>()});
  }
  return pts;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Taxonomy Taxonomy::defaults() {
  Taxonomy t;
  t.amenity = {
      {"office", ChargerClass::NormalWork},
      {"university", ChargerClass::SemiRapid},
      {"school", ChargerClass::SemiRapid},
      {"kindergarten", ChargerClass::SemiRapid},
      {"entertainment", ChargerClass::SemiRapid},
      {"shops", ChargerClass::SemiRapid},
      {"clinic", ChargerClass::SemiRapid},
      {"hospital", ChargerClass::SemiRapid},
      {"bar", ChargerClass::Fast},
      {"café", ChargerClass::Fast},
      {"cafe", ChargerClass::Fast},
      {"fast_food", ChargerClass::Fast},
      {"ice_cream", ChargerClass::Fast},
      {"pub", ChargerClass::Fast},
      {"restaurant", ChargerClass::Fast},
      {"tourism", ChargerClass::Fast},
      {"taxi", ChargerClass::Fast},
      {"sport", ChargerClass::Excluded},
  };
  t.highway = {
      {"residential", HighwayClass::Residential},
      {"motorway", HighwayClass::Major},
      {"primary", HighwayClass::Major},
      {"secondary", HighwayClass::Major},
      {"tertiary", HighwayClass::Major},
  };
  return t;
}

Taxonomy parse_taxonomy(const std::string& json_text) {
  const json doc = parse_json(json_text, "taxonomy");
  if (!doc.is_object()) throw SchemaError("taxonomy must be a JSON object");
  Taxonomy t;
  if (auto it = doc.find("amenity"); it != doc.end()) {
    for (const auto& [tag, cls] : it->items()) {
      auto c = cls.is_string() ? charger_class_from_string(cls.get<std::string>()) : std::nullopt;
      if (!c) throw SchemaError("taxonomy: unknown charger class for amenity '" + tag + "'");
      t.amenity[tag] = *c;
    }
  }
  if (auto it = doc.find("highway"); it != doc.end()) {
    for (const auto& [tag, cls] : it->items()) {
      auto c = cls.is_string() ? highway_class_from_string(cls.get<std::string>()) : std::nullopt;
      if (!c) throw SchemaError("taxonomy: unknown highway class for '" + tag + "'");
      t.highway[tag] = *c;
    }
  } else {
    t.highway = Taxonomy::defaults().highway;
  }
  if (auto it = doc.find("node_footprint_km2"); it != doc.end()) {
    if (!it->is_number() || it->get<double>() < 0.0) {
      throw SchemaError("taxonomy: node_footprint_km2 must be a non-negative number");
    }
    t.node_footprint_km2 = it->get<double>();
  }
  return t;
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  return parse_taxonomy(read_text_file(path));
}

std::string taxonomy_to_json(const Taxonomy& t) {
  json doc;
  doc["amenity"] = json::object();
  for (const auto& [tag, cls] : t.amenity) doc["amenity"][tag] = to_string(cls);
  doc["highway"] = json::object();
  for (const auto& [tag, cls] : t.highway) doc["highway"][tag] = to_string(cls);
  doc["node_footprint_km2"] = t.node_footprint_km2;
  return doc.dump(2);
}

ChargerClass classify_poi(const std::string& amenity_tag, const Taxonomy& taxonomy) {
  auto it = taxonomy.amenity.find(amenity_tag);
  return it == taxonomy.amenity.end() ? ChargerClass::Ignored : it->second;
}

HighwayClass classify_highway(const std::string& highway_tag, const Taxonomy& taxonomy) {
  auto it = taxonomy.highway.find(highway_tag);
  return it == taxonomy.highway.end() ? HighwayClass::Ignored : it->second;
}

HighwayClass classify_highway(const std::string& highway_tag) {
  static const Taxonomy defaults = Taxonomy::defaults();
  return classify_highway(highway_tag, defaults);
}

std::vector<Zone> parse_zones(const std::string& geojson_text) {
  const json doc = parse_json(geojson_text, "zones file");
  const json& features = features_of(doc, "zones file");
  std::vector<Zone> zones;
  std::set<std::string> seen;
  for (std::size_t k = 0; k < features.size(); ++k) {
    const json& f = features[k];
    const std::string context = "zone feature #" + std::to_string(k);
    if (!f.is_object()) throw SchemaError(context + " is not an object");
    const json props = f.value("properties", json::object());
    if (!props.is_object()) throw SchemaError(context + ": properties must be an object");
    Zone z;
    z.id = string_field(props, "id", context);
    z.name = string_field(props, "name", context);
    z.pop_density_tau = number_field(props, "pop_density_tau", context);
    z.household_size_chi = number_field(props, "household_size_chi", context);
    z.par_count_sigma = number_field(props, "par_count_sigma", context);
    if (z.pop_density_tau < 0.0) throw SchemaError(context + ": pop_density_tau must be >= 0");
    if (!(z.household_size_chi > 0.0)) {
      throw SchemaError(context + ": household_size_chi must be > 0");
    }
    if (z.par_count_sigma < 0.0) throw SchemaError(context + ": par_count_sigma must be >= 0");
    z.polygon = parse_polygon_geometry(f.value("geometry", json()), context + " ('" + z.id + "')");
    if (!seen.insert(z.id).second) throw DuplicateZoneId("zone id '" + z.id + "' appears twice");
    zones.push_back(std::move(z));
  }
  return zones;
}

std::vector<Zone> load_zones(const std::filesystem::path& path) {
  return parse_zones(read_text_file(path));
}

std::vector<TacsCell> parse_tacs_cells(const std::string& geojson_text) {
  const json doc = parse_json(geojson_text, "TACS file");
  const json& features = features_of(doc, "TACS file");
  std::vector<TacsCell> cells;
  std::set<std::string> seen;
  for (std::size_t k = 0; k < features.size(); ++k) {
    const json& f = features[k];
    const std::string context = "TACS feature #" + std::to_string(k);
    if (!f.is_object()) throw SchemaError(context + " is not an object");
    const json props = f.value("properties", json::object());
    TacsCell c;
    c.id = string_field(props, "id", context);
    c.polygon = parse_polygon_geometry(f.value("geometry", json()), context);
    if (!seen.insert(c.id).second) throw SchemaError("TACS id '" + c.id + "' appears twice");
    cells.push_back(std::move(c));
  }
  return cells;
}

std::vector<TacsCell> load_tacs_cells(const std::filesystem::path& path) {
  return parse_tacs_cells(read_text_file(path));
}

TacsTripTable parse_trip_table(const std::string& csv_text) {
  TacsTripTable table;
  std::istringstream in(csv_text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  static constexpr std::string_view kPragma = "#extrapolation_factor=";
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string context = "trips line " + std::to_string(line_no);
    if (!header_seen) {
      if (t.starts_with(kPragma)) {
        if (line_no != 1) throw SchemaError(context + ": pragma must be on the first line");
        table.extrapolation_factor = parse_double(trim(t.substr(kPragma.size())), context);
        if (!(table.extrapolation_factor > 0.0)) {
          throw SchemaError(context + ": extrapolation factor must be > 0");
        }
        continue;
      }
      if (split_csv_line(t) != std::vector<std::string>{"origin_tacs", "dest_tacs", "regular",
                                                        "irregular"}) {
        throw SchemaError(context + ": expected header origin_tacs,dest_tacs,regular,irregular");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(t);
    if (fields.size() != 4) throw SchemaError(context + ": expected 4 fields");
    TripRow row{fields[0], fields[1], parse_double(fields[2], context),
                parse_double(fields[3], context)};
    if (row.regular < 0.0 || row.irregular < 0.0) {
      throw SchemaError(context + ": trip counts must be >= 0");
    }
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) throw SchemaError("trips file has no header");
  return table;
}

TacsTripTable load_trip_table(const std::filesystem::path& path) {
  return parse_trip_table(read_text_file(path));
}

OverpassData parse_overpass_text(const std::string& json_text, const Taxonomy& taxonomy,
                                 Diagnostics& diag) {
  const json doc = parse_json(json_text, "Overpass export");
  if (!doc.is_object() || !doc.contains("elements") || !doc["elements"].is_array()) {
    throw SchemaError("Overpass export has no 'elements' array");
  }
  OverpassData out;
  for (const auto& el : doc["elements"]) {
    if (!el.is_object() || !el.contains("type") || !el["type"].is_string() || !el.contains("id") ||
        !el["id"].is_number_integer()) {
      throw SchemaError("Overpass element without type/id");
    }
    const std::string type = el["type"].get<std::string>();
    const std::int64_t id = el["id"].get<std::int64_t>();
    const json tags = el.value("tags", json::object());
    const std::string amenity = tags.is_object() ? tags.value("amenity", "") : "";
    const std::string highway = tags.is_object() ? tags.value("highway", "") : "";
    const std::string ref = type + "/" + std::to_string(id);

    if (type == "node") {
      if (amenity.empty()) {
        diag.count("overpass.nodes_without_amenity");
        continue;
      }
      if (!el.contains("lat") || !el.contains("lon") || !el["lat"].is_number() ||
          !el["lon"].is_number()) {
        diag.warn("ingest", "MissingGeometry", ref + " has no coordinates; skipped");
        diag.count("overpass.skipped_missing_geometry");
        continue;
      }
      PoiRecord poi;
      poi.osm_id = id;
      poi.amenity_tag = amenity;
      poi.geometry = GeoPoint{el["lon"].get<double>(), el["lat"].get<double>()};
      poi.charger_class = classify_poi(amenity, taxonomy);
      poi.area_km2 = taxonomy.node_footprint_km2;
      diag.count("overpass.node_pois_default_footprint");
      out.pois.push_back(std::move(poi));
    } else if (type == "way") {
      if (amenity.empty() && highway.empty()) {
        diag.count("overpass.untagged_ways");
        continue;
      }
      std::vector<GeoPoint> pts;
      if (el.contains("geometry") && el["geometry"].is_array()) {
        pts = parse_overpass_geometry(el["geometry"]);
      }
      if (pts.empty()) {
        diag.warn("ingest", "MissingGeometry", ref + " has no geometry; skipped");
        diag.count("overpass.skipped_missing_geometry");
        continue;
      }
      if (!amenity.empty()) {
        GeoPolygon poly{pts, {}};
        bool ok = pts.size() >= 4 && pts.front() == pts.back();
        double area = 0.0;
        if (ok) {
          try {
            geometry::validate_polygon(poly);
            area = geometry::polygon_area_km2(poly);
          } catch (const Error&) {
            ok = false;
          }
        }
        if (!ok) {
          diag.warn("ingest", "InvalidFootprint", ref + " amenity footprint is not a valid ring; skipped");
          diag.count("overpass.skipped_invalid_footprint");
        } else {
          PoiRecord poi;
          poi.osm_id = id;
          poi.amenity_tag = amenity;
          poi.geometry = std::move(poly);
          poi.charger_class = classify_poi(amenity, taxonomy);
          poi.area_km2 = area;
          out.pois.push_back(std::move(poi));
        }
      }
      if (!highway.empty()) {
        GeoPolyline line;
        for (const auto& p : pts) {
          if (line.points.empty() || line.points.back() != p) line.points.push_back(p);
        }
        if (line.points.size() < 2) {
          diag.warn("ingest", "InvalidPolyline", ref + " highway has fewer than 2 distinct points; skipped");
          diag.count("overpass.skipped_invalid_polyline");
        } else {
          out.highways.push_back({id, highway, std::move(line), classify_highway(highway, taxonomy)});
        }
      }
    } else {
      diag.count("overpass.ignored_elements");
    }
  }
  diag.count("overpass.pois", static_cast<long long>(out.pois.size()));
  diag.count("overpass.highways", static_cast<long long>(out.highways.size()));
  return out;
}

OverpassData parse_overpass(const std::filesystem::path& path, const Taxonomy& taxonomy,
                            Diagnostics& diag) {
  return parse_overpass_text(read_text_file(path), taxonomy, diag);
}

CellZoneMap assign_tacs_to_zones(const std::vector<TacsCell>& cells, const std::vector<Zone>& zones) {
  std::vector<GeoPolygon> cell_polys;
  cell_polys.reserve(cells.size());
  for (const auto& c : cells) cell_polys.push_back(c.polygon);
  std::vector<GeoPolygon> zone_polys;
  std::vector<std::string> zone_ids;
  for (const auto& z : zones) {
    zone_polys.push_back(z.polygon);
    zone_ids.push_back(z.id);
  }
  const auto best = kernels::omp::best_iou_zone(cell_polys, zone_polys, zone_ids);
  CellZoneMap out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out[cells[c].id] = best[c] ? std::optional<std::string>(zone_ids[*best[c]]) : std::nullopt;
  }
  return out;
}

TripMatrix aggregate_trips(const TacsTripTable& table, const CellZoneMap& mapping,
                           const std::vector<Zone>& zones, Diagnostics& diag) {
  const std::size_t n = zones.size();
  std::unordered_map<std::string, std::size_t> index;
  TripMatrix m;
  m.regular = Matrix(n);
  m.irregular = Matrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    index[zones[i].id] = i;
    m.zone_ids.push_back(zones[i].id);
  }
  auto lookup = [&](const std::string& cell) -> std::optional<std::size_t> {
    auto it = mapping.find(cell);
    if (it == mapping.end()) throw UnknownCell("trip references unknown TACS cell '" + cell + "'");
    if (!it->second) return std::nullopt;
    auto z = index.find(*it->second);
    if (z == index.end()) {
      throw UnknownCell("cell '" + cell + "' maps to unknown zone '" + *it->second + "'");
    }
    return z->second;
  };

  std::set<std::string> dropped_cells;
  long long dropped_rows = 0;
  for (const auto& row : table.rows) {
    const auto o = lookup(row.origin_tacs);
    const auto d = lookup(row.dest_tacs);
    if (!o || !d) {
      ++dropped_rows;
      if (!o) dropped_cells.insert(row.origin_tacs);
      if (!d) dropped_cells.insert(row.dest_tacs);
      continue;
    }
    m.regular(*o, *d) += row.regular;
    m.irregular(*o, *d) += row.irregular;
  }
  for (auto& v : m.regular.data()) v *= table.extrapolation_factor;
  for (auto& v : m.irregular.data()) v *= table.extrapolation_factor;
  if (dropped_rows > 0) {
    diag.warn("ingest", "UnmappedCells",
              std::to_string(dropped_rows) + " trip rows dropped; " +
                  std::to_string(dropped_cells.size()) + " TACS cells overlap no zone");
  }
  diag.count("trips.rows", static_cast<long long>(table.rows.size()));
  diag.count("trips.dropped_rows", dropped_rows);
  diag.count("trips.dropped_cells", static_cast<long long>(dropped_cells.size()));
  return m;
}

}  // namespace chargecast::ingest
