// Value types shared by the pipeline, the synthetic-city generator and the
// oracle. Nothing in here computes anything beyond trivial accessors.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace chargecast {

// WGS84 degrees.
struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

using Ring = std::vector<GeoPoint>;

// Rings are closed (first == last) and hold at least four points.
struct GeoPolygon {
  Ring exterior;
  std::vector<Ring> holes;

  friend bool operator==(const GeoPolygon&, const GeoPolygon&) = default;
};

struct GeoPolyline {
  std::vector<GeoPoint> points;

  friend bool operator==(const GeoPolyline&, const GeoPolyline&) = default;
};

struct Zone {
  std::string id;
  std::string name;
  GeoPolygon polygon;
  double pop_density_tau = 0.0;     // persons / km²
  double household_size_chi = 1.0; // persons / household
  double par_count_sigma = 0.0;     // private access roads in the zone
};

struct TacsCell {
  std::string id;
  GeoPolygon polygon;
};

enum class ChargerClass { NormalWork, SemiRapid, Fast, Excluded, Ignored };
enum class HighwayClass { Residential, Major, Ignored };

struct PoiRecord {
  std::int64_t osm_id = 0;
  std::string amenity_tag;
  std::variant<GeoPoint, GeoPolygon> geometry;
  ChargerClass charger_class = ChargerClass::Ignored;
  double area_km2 = 0.0;
};

struct HighwayRecord {
  std::int64_t osm_id = 0;
  std::string highway_tag;
  GeoPolyline polyline;
  HighwayClass cls = HighwayClass::Ignored;
};

struct TripRow {
  std::string origin_tacs;
  std::string dest_tacs;
  double regular = 0.0;
  double irregular = 0.0;
};

struct TacsTripTable {
  std::vector<TripRow> rows;
  double extrapolation_factor = 1.0;
};

// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Regular (M^r) and irregular (M^ir) trips per average workday.
struct TripMatrix {
  std::vector<std::string> zone_ids;
  Matrix regular;
  Matrix irregular;
};

// Origin → destination driving distance in km; may be asymmetric.
struct DistanceMatrix {
  std::vector<std::string> zone_ids;
  Matrix km;
};

inline const char* to_string(ChargerClass c) {
  switch (c) {
    case ChargerClass::NormalWork: return "NormalWork";
    case ChargerClass::SemiRapid: return "SemiRapid";
    case ChargerClass::Fast: return "Fast";
    case ChargerClass::Excluded: return "Excluded";
    case ChargerClass::Ignored: return "Ignored";
  }
  return "Ignored";
}

inline const char* to_string(HighwayClass c) {
  switch (c) {
    case HighwayClass::Residential: return "Residential";
    case HighwayClass::Major: return "Major";
    case HighwayClass::Ignored: return "Ignored";
  }
  return "Ignored";
}

inline std::optional<ChargerClass> charger_class_from_string(const std::string& s) {
  for (auto c : {ChargerClass::NormalWork, ChargerClass::SemiRapid, ChargerClass::Fast,
                 ChargerClass::Excluded, ChargerClass::Ignored}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

inline std::optional<HighwayClass> highway_class_from_string(const std::string& s) {
  for (auto c : {HighwayClass::Residential, HighwayClass::Major, HighwayClass::Ignored}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

}  // namespace chargecast
