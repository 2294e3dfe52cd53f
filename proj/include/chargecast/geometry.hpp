// Geometry kernel for city-scale shapes given in WGS84 degrees.
//
// Conventions:
//  * Edges are straight lines in (lon, lat), as in GeoJSON.
//  * Areas are measured in a local cylindrical equal-area plane
//    (x = R·Δλ, y = R·(sin φ − sin φ0)), which is exact for graticule-aligned
//    edges and far below zone-scale error otherwise.
//  * Points on a polygon boundary (including hole boundaries) are inside.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "chargecast/types.hpp"

namespace chargecast::geometry {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultSplitToleranceKm = 0.001;

struct BBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
  }
  bool intersects(const BBox& o) const {
    return !(o.min_lon > max_lon || o.max_lon < min_lon || o.min_lat > max_lat ||
             o.max_lat < min_lat);
  }
};

struct McConfig {
  std::size_t n_samples = 20000;
  std::uint64_t seed = 0;
};

struct PolylinePiece {
  std::optional<std::size_t> zone;  // index into the zone list, nullopt = outside all
  GeoPolyline line;
};

double haversine_km(const GeoPoint& a, const GeoPoint& b);
double length_km(const GeoPolyline& line);

BBox bbox(const Ring& ring);
BBox bbox(const GeoPolygon& p);

// Throws SchemaError on structural problems (open ring, < 4 points, bad
// coordinates). Zero area is reported separately by polygon_area_km2.
void validate_polygon(const GeoPolygon& p);

double polygon_area_km2(const GeoPolygon& p);

// Area-weighted centroid of exterior minus holes.
GeoPoint centroid(const GeoPolygon& p);

bool point_in_polygon(const GeoPoint& pt, const GeoPolygon& p);

double polygon_iou(const GeoPolygon& a, const GeoPolygon& b);

// Splits `line` into maximal pieces lying in a single zone (or outside all).
// Boundary crossings are located by bisection until the bracketing interval is
// shorter than epsilon_km. Consecutive pieces share their crossing point.
std::vector<PolylinePiece> split_polyline_by_zone(const GeoPolyline& line,
                                                  std::span<const GeoPolygon> zones,
                                                  double epsilon_km = kDefaultSplitToleranceKm);

// Mean straight-line distance between uniformly sampled point pairs.
//
// Sampling: std::mt19937_64 seeded with cfg.seed; each
// uniform is (rng() >> 11)·2⁻⁵³. A candidate takes lon from the first uniform
// over [min_lon, max_lon] and sin(lat) from the second over
// [sin min_lat, sin max_lat], which is area-uniform on the sphere; candidates
// outside the polygon are rejected. Pairs are (a, b) drawn in that order and
// distances are haversine.
double mc_mean_pairwise_distance_km(const GeoPolygon& p, const McConfig& cfg);

// FNV-1a 64-bit; used to derive per-zone seeds.
std::uint64_t stable_hash64(std::string_view s);

}  // namespace chargecast::geometry
