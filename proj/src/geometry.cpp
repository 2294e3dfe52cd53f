#include "chargecast/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <tuple>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include "chargecast/errors.hpp"

namespace chargecast::geometry {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kMinAreaKm2 = 1e-12;
constexpr double kBoundaryTolDeg = 1e-12;

double cross(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) {
    return std::hypot(p.lon - a.lon, p.lat - a.lat) <= kBoundaryTolDeg;
  }
  if (std::abs(cross(a, b, p)) > kBoundaryTolDeg * len) return false;
  const double dot = (p.lon - a.lon) * dx + (p.lat - a.lat) * dy;
  return dot >= -kBoundaryTolDeg * len && dot <= len * len + kBoundaryTolDeg * len;
}

bool on_ring(const GeoPoint& p, const Ring& ring) {
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    if (on_segment(p, ring[i], ring[i + 1])) return true;
  }
  return false;
}

// Even-odd ray cast towards +lon.
bool inside_ring(const GeoPoint& p, const Ring& ring) {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[i + 1];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

// Local cylindrical equal-area plane.
struct Projection {
  double lon0;
  double sin_lat0;

  std::pair<double, double> operator()(const GeoPoint& p) const {
    return {kEarthRadiusKm * (p.lon - lon0) * kDegToRad,
            kEarthRadiusKm * (std::sin(p.lat * kDegToRad) - sin_lat0)};
  }
};

Projection projection_for(const BBox& box) {
  return {0.5 * (box.min_lon + box.max_lon),
          std::sin(0.5 * (box.min_lat + box.max_lat) * kDegToRad)};
}

double ring_area_km2(const Ring& ring, const Projection& proj) {
  double twice = 0.0;
  auto [x0, y0] = proj(ring.front());
  double px = 0.0;
  double py = 0.0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    auto [x, y] = proj(ring[i]);
    x -= x0;
    y -= y0;
    twice += px * y - x * py;
    px = x;
    py = y;
  }
  return std::abs(0.5 * twice);
}

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint>;
using BMultiPolygon = bg::model::multi_polygon<BPolygon>;

BPolygon to_boost(const GeoPolygon& p, const Projection& proj) {
  BPolygon out;
  for (const auto& pt : p.exterior) {
    auto [x, y] = proj(pt);
    bg::append(out.outer(), BPoint(x, y));
  }
  for (const auto& hole : p.holes) {
    BPolygon::ring_type inner;
    for (const auto& pt : hole) {
      auto [x, y] = proj(pt);
      bg::append(inner, BPoint(x, y));
    }
    out.inners().push_back(std::move(inner));
  }
  bg::correct(out);
  return out;
}

bool point_less(const GeoPoint& a, const GeoPoint& b) {
  return std::tie(a.lon, a.lat) < std::tie(b.lon, b.lat);
}

bool polygon_less(const GeoPolygon& a, const GeoPolygon& b) {
  if (std::lexicographical_compare(a.exterior.begin(), a.exterior.end(), b.exterior.begin(),
                                   b.exterior.end(), point_less)) {
    return true;
  }
  if (a.exterior != b.exterior) return false;
  return std::lexicographical_compare(
      a.holes.begin(), a.holes.end(), b.holes.begin(), b.holes.end(),
      [](const Ring& x, const Ring& y) {
        return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), point_less);
      });
}

int sign_with_tolerance(double v, double scale) {
  const double tol = 1e-12 * scale;
  return v > tol ? 1 : (v < -tol ? -1 : 0);
}

// Closed-segment intersection; errs towards reporting contact.
bool segments_touch(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c, const GeoPoint& d) {
  const double scale = std::max(std::hypot(b.lon - a.lon, b.lat - a.lat),
                                std::hypot(d.lon - c.lon, d.lat - c.lat));
  const double s2 = scale * scale;
  const int d1 = sign_with_tolerance(cross(c, d, a), s2);
  const int d2 = sign_with_tolerance(cross(c, d, b), s2);
  const int d3 = sign_with_tolerance(cross(a, b, c), s2);
  const int d4 = sign_with_tolerance(cross(a, b, d), s2);
  if (d1 * d2 > 0 || d3 * d4 > 0) return false;
  if (d1 == 0 && d2 == 0) {
    // Collinear: overlap of the projections onto both axes.
    const double eps = kBoundaryTolDeg;
    return std::max(std::min(a.lon, b.lon), std::min(c.lon, d.lon)) <=
               std::min(std::max(a.lon, b.lon), std::max(c.lon, d.lon)) + eps &&
           std::max(std::min(a.lat, b.lat), std::min(c.lat, d.lat)) <=
               std::min(std::max(a.lat, b.lat), std::max(c.lat, d.lat)) + eps;
  }
  return true;
}

GeoPoint lerp(const GeoPoint& p, const GeoPoint& q, double t) {
  if (t == 0.0) return p;
  if (t == 1.0) return q;
  return {p.lon + (q.lon - p.lon) * t, p.lat + (q.lat - p.lat) * t};
}

class ZoneLocator {
 public:
  explicit ZoneLocator(std::span<const GeoPolygon> zones) : zones_(zones) {
    boxes_.reserve(zones.size());
    for (const auto& z : zones) boxes_.push_back(bbox(z));
  }

  std::optional<std::size_t> zone_at(const GeoPoint& p) const {
    for (std::size_t i = 0; i < zones_.size(); ++i) {
      if (boxes_[i].contains(p) && point_in_polygon(p, zones_[i])) return i;
    }
    return std::nullopt;
  }

  bool crosses_boundary(const GeoPoint& a, const GeoPoint& b) const {
    const BBox seg{std::min(a.lon, b.lon) - kBoundaryTolDeg, std::min(a.lat, b.lat) - kBoundaryTolDeg,
                   std::max(a.lon, b.lon) + kBoundaryTolDeg, std::max(a.lat, b.lat) + kBoundaryTolDeg};
    for (std::size_t i = 0; i < zones_.size(); ++i) {
      if (!boxes_[i].intersects(seg)) continue;
      if (ring_touches(zones_[i].exterior, a, b)) return true;
      for (const auto& hole : zones_[i].holes) {
        if (ring_touches(hole, a, b)) return true;
      }
    }
    return false;
  }

 private:
  static bool ring_touches(const Ring& ring, const GeoPoint& a, const GeoPoint& b) {
    for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
      if (segments_touch(a, b, ring[k], ring[k + 1])) return true;
    }
    return false;
  }

  std::span<const GeoPolygon> zones_;
  std::vector<BBox> boxes_;
};

struct Leaf {
  double t0;
  double t1;
  std::optional<std::size_t> zone;
};

void bisect(const ZoneLocator& locator, const GeoPoint& p, const GeoPoint& q, double t0, double t1,
            double epsilon_km, int depth, std::vector<Leaf>& leaves) {
  const GeoPoint a = lerp(p, q, t0);
  const GeoPoint b = lerp(p, q, t1);
  const double tm = 0.5 * (t0 + t1);
  if (!locator.crosses_boundary(a, b) || haversine_km(a, b) < epsilon_km || depth >= 64) {
    leaves.push_back({t0, t1, locator.zone_at(lerp(p, q, tm))});
    return;
  }
  bisect(locator, p, q, t0, tm, epsilon_km, depth + 1, leaves);
  bisect(locator, p, q, tm, t1, epsilon_km, depth + 1, leaves);
}

void push_point(std::vector<GeoPoint>& pts, const GeoPoint& p) {
  if (pts.empty() || pts.back() != p) pts.push_back(p);
}

}  // namespace

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double sdphi = std::sin(0.5 * (phi2 - phi1));
  const double sdlam = std::sin(0.5 * (b.lon - a.lon) * kDegToRad);
  double h = sdphi * sdphi + std::cos(phi1) * std::cos(phi2) * sdlam * sdlam;
  h = std::min(1.0, h);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double length_km(const GeoPolyline& line) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < line.points.size(); ++i) {
    total += haversine_km(line.points[i], line.points[i + 1]);
  }
  return total;
}

BBox bbox(const Ring& ring) {
  BBox box{ring.front().lon, ring.front().lat, ring.front().lon, ring.front().lat};
  for (const auto& p : ring) {
    box.min_lon = std::min(box.min_lon, p.lon);
    box.max_lon = std::max(box.max_lon, p.lon);
    box.min_lat = std::min(box.min_lat, p.lat);
    box.max_lat = std::max(box.max_lat, p.lat);
  }
  return box;
}

BBox bbox(const GeoPolygon& p) { return bbox(p.exterior); }

void validate_polygon(const GeoPolygon& p) {
  auto check_ring = [](const Ring& ring, const char* what) {
    if (ring.size() < 4) {
      throw SchemaError(std::string(what) + " ring has fewer than 4 points");
    }
    if (ring.front() != ring.back()) {
      throw SchemaError(std::string(what) + " ring is not closed");
    }
    for (const auto& pt : ring) {
      if (!std::isfinite(pt.lon) || !std::isfinite(pt.lat) || pt.lon < -180.0 ||
          pt.lon > 180.0 || pt.lat < -90.0 || pt.lat > 90.0) {
        throw SchemaError(std::string(what) + " ring has a coordinate outside WGS84 range");
      }
    }
  };
  check_ring(p.exterior, "exterior");
  for (const auto& hole : p.holes) check_ring(hole, "hole");
}

double polygon_area_km2(const GeoPolygon& p) {
  if (p.exterior.size() < 4) throw DegenerateGeometry("exterior ring has fewer than 4 points");
  const Projection proj = projection_for(bbox(p));
  const double outer = ring_area_km2(p.exterior, proj);
  if (outer < kMinAreaKm2) throw DegenerateGeometry("exterior ring has zero area");
  double area = outer;
  for (const auto& hole : p.holes) area -= ring_area_km2(hole, proj);
  return std::max(0.0, area);
}

GeoPoint centroid(const GeoPolygon& p) {
  if (p.exterior.size() < 4) throw DegenerateGeometry("exterior ring has fewer than 4 points");
  const GeoPoint origin = p.exterior.front();
  double area_sum = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  auto accumulate = [&](const Ring& ring, double sign) {
    double a2 = 0.0;
    double rx = 0.0;
    double ry = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const double x0 = ring[i].lon - origin.lon;
      const double y0 = ring[i].lat - origin.lat;
      const double x1 = ring[i + 1].lon - origin.lon;
      const double y1 = ring[i + 1].lat - origin.lat;
      const double c = x0 * y1 - x1 * y0;
      a2 += c;
      rx += (x0 + x1) * c;
      ry += (y0 + y1) * c;
    }
    // Normalise orientation so every ring contributes |area| · sign.
    const double orient = a2 < 0.0 ? -1.0 : 1.0;
    area_sum += sign * orient * a2;
    cx += sign * orient * rx;
    cy += sign * orient * ry;
  };
  accumulate(p.exterior, 1.0);
  for (const auto& hole : p.holes) accumulate(hole, -1.0);
  if (std::abs(area_sum) < 1e-30) throw DegenerateGeometry("polygon has zero area");
  return {origin.lon + cx / (3.0 * area_sum), origin.lat + cy / (3.0 * area_sum)};
}

bool point_in_polygon(const GeoPoint& pt, const GeoPolygon& p) {
  if (p.exterior.size() < 4) return false;
  const BBox box = bbox(p);
  if (pt.lon < box.min_lon - kBoundaryTolDeg || pt.lon > box.max_lon + kBoundaryTolDeg ||
      pt.lat < box.min_lat - kBoundaryTolDeg || pt.lat > box.max_lat + kBoundaryTolDeg) {
    return false;
  }
  if (on_ring(pt, p.exterior)) return true;
  for (const auto& hole : p.holes) {
    if (on_ring(pt, hole)) return true;
  }
  if (!inside_ring(pt, p.exterior)) return false;
  for (const auto& hole : p.holes) {
    if (inside_ring(pt, hole)) return false;
  }
  return true;
}

double polygon_iou(const GeoPolygon& a_in, const GeoPolygon& b_in) {
  // Canonical argument order keeps the floating-point result symmetric.
  const bool swap = polygon_less(b_in, a_in);
  const GeoPolygon& a = swap ? b_in : a_in;
  const GeoPolygon& b = swap ? a_in : b_in;

  const BBox ba = bbox(a);
  const BBox bb = bbox(b);
  const BBox both{std::min(ba.min_lon, bb.min_lon), std::min(ba.min_lat, bb.min_lat),
                  std::max(ba.max_lon, bb.max_lon), std::max(ba.max_lat, bb.max_lat)};
  const Projection proj = projection_for(both);
  const BPolygon pa = to_boost(a, proj);
  const BPolygon pb = to_boost(b, proj);
  const double area_a = std::abs(bg::area(pa));
  const double area_b = std::abs(bg::area(pb));
  if (area_a < kMinAreaKm2 && area_b < kMinAreaKm2) {
    throw DegenerateGeometry("both polygons have zero area");
  }
  if (a == b) return 1.0;
  if (area_a < kMinAreaKm2 || area_b < kMinAreaKm2 || !ba.intersects(bb)) return 0.0;

  BMultiPolygon inter;
  try {
    bg::intersection(pa, pb, inter);
  } catch (const bg::exception& e) {
    throw DegenerateGeometry(std::string("polygon intersection failed: ") + e.what());
  }
  const double i = std::abs(bg::area(inter));
  const double u = area_a + area_b - i;
  if (u <= 0.0) return 0.0;
  return std::clamp(i / u, 0.0, 1.0);
}

std::vector<PolylinePiece> split_polyline_by_zone(const GeoPolyline& line,
                                                  std::span<const GeoPolygon> zones,
                                                  double epsilon_km) {
  if (!(epsilon_km > 0.0)) {
    throw InvalidTolerance("epsilon_km must be > 0, got " + std::to_string(epsilon_km));
  }
  if (line.points.size() < 2) throw SchemaError("polyline needs at least 2 points");

  const ZoneLocator locator(zones);
  std::vector<PolylinePiece> pieces;
  PolylinePiece current;
  bool started = false;
  std::vector<Leaf> leaves;

  for (std::size_t s = 0; s + 1 < line.points.size(); ++s) {
    const GeoPoint& p = line.points[s];
    const GeoPoint& q = line.points[s + 1];
    if (p == q) continue;
    leaves.clear();
    bisect(locator, p, q, 0.0, 1.0, epsilon_km, 0, leaves);
    for (const Leaf& leaf : leaves) {
      if (!started) {
        current.zone = leaf.zone;
        push_point(current.line.points, p);
        started = true;
      } else if (leaf.zone != current.zone) {
        const GeoPoint cut = lerp(p, q, leaf.t0);
        push_point(current.line.points, cut);
        pieces.push_back(std::move(current));
        current = PolylinePiece{leaf.zone, GeoPolyline{{cut}}};
      }
    }
    push_point(current.line.points, q);
  }
  if (started) pieces.push_back(std::move(current));
  return pieces;
}

double mc_mean_pairwise_distance_km(const GeoPolygon& p, const McConfig& cfg) {
  if (cfg.n_samples < 1) throw PreconditionViolation("n_samples must be >= 1");
  polygon_area_km2(p);  // rejects zero-area input

  const BBox box = bbox(p);
  const double s0 = std::sin(box.min_lat * kDegToRad);
  const double s1 = std::sin(box.max_lat * kDegToRad);
  std::mt19937_64 rng(cfg.seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;
  auto draw = [&]() -> GeoPoint {
    for (;;) {
      ++attempts;
      const double lon = box.min_lon + uniform() * (box.max_lon - box.min_lon);
      const double s = s0 + uniform() * (s1 - s0);
      const GeoPoint c{lon, std::asin(s) * kRadToDeg};
      if (point_in_polygon(c, p)) {
        ++accepted;
        return c;
      }
      if (attempts >= 1'000'000 && accepted * 1000 < attempts) {
        throw SamplingStalled("rejection acceptance below 0.1% after " +
                              std::to_string(attempts) + " attempts");
      }
    }
  };

  double sum = 0.0;
  for (std::size_t k = 0; k < cfg.n_samples; ++k) {
    const GeoPoint a = draw();
    const GeoPoint b = draw();
    sum += haversine_km(a, b);
  }
  return sum / static_cast<double>(cfg.n_samples);
}

std::uint64_t stable_hash64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace chargecast::geometry
