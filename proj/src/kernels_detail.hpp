// Per-item bodies shared by the serial and OpenMP kernels, so the two differ
// only in how the loop is scheduled.
#pragma once

#include <cmath>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chargecast/geometry.hpp"

namespace chargecast::kernels::detail {

inline double driving_ratio(double a, double b, double d_km) {
  return a * (1.0 - std::exp(-b * d_km));
}

inline std::vector<geometry::BBox> boxes_of(std::span<const GeoPolygon> polys) {
  std::vector<geometry::BBox> out;
  out.reserve(polys.size());
  for (const auto& p : polys) out.push_back(geometry::bbox(p));
  return out;
}

inline std::optional<std::size_t> best_zone_for_cell(const GeoPolygon& cell,
                                                     std::span<const GeoPolygon> zones,
                                                     std::span<const geometry::BBox> boxes,
                                                     std::span<const std::string> zone_ids) {
  const geometry::BBox cb = geometry::bbox(cell);
  std::optional<std::size_t> best;
  double best_iou = 0.0;
  for (std::size_t z = 0; z < zones.size(); ++z) {
    if (!boxes[z].intersects(cb)) continue;
    const double iou = geometry::polygon_iou(cell, zones[z]);
    if (iou <= 0.0) continue;
    if (!best || iou > best_iou || (iou == best_iou && zone_ids[z] < zone_ids[*best])) {
      best = z;
      best_iou = iou;
    }
  }
  return best;
}

// Keeps the exception of the lowest failing index so parallel runs report the
// same error as the serial loop.
class FirstError {
 public:
  explicit FirstError(std::size_t n) : errors_(n) {}
  void capture(std::size_t i) { errors_[i] = std::current_exception(); }
  void rethrow() const {
    for (const auto& e : errors_) {
      if (e) std::rethrow_exception(e);
    }
  }

 private:
  std::vector<std::exception_ptr> errors_;
};

}  // namespace chargecast::kernels::detail
