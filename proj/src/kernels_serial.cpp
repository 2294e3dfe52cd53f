#include <cmath>

#include "chargecast/kernels.hpp"
#include "kernels_detail.hpp"

namespace chargecast::kernels::serial {

std::vector<double> mc_means(std::span<const GeoPolygon> polygons,
                             std::span<const std::uint64_t> seeds, std::size_t n_samples) {
  std::vector<double> out(polygons.size());
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    out[i] = geometry::mc_mean_pairwise_distance_km(polygons[i], {n_samples, seeds[i]});
  }
  return out;
}

void scale_by_driving_ratio(const Matrix& trips, const Matrix& dist, double a, double b,
                            Matrix& out) {
  const auto& t = trips.data();
  const auto& d = dist.data();
  auto& o = out.data();
  for (std::size_t k = 0; k < t.size(); ++k) o[k] = t[k] * detail::driving_ratio(a, b, d[k]);
}

void energy(const Matrix& trips, const Matrix& dist, double kwh_per_km, Matrix& out) {
  const auto& t = trips.data();
  const auto& d = dist.data();
  auto& o = out.data();
  for (std::size_t k = 0; k < t.size(); ++k) o[k] = t[k] * d[k] * kwh_per_km;
}

std::vector<double> row_sums(const Matrix& m) {
  const std::size_t n = m.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m(i, j);
    out[i] = s;
  }
  return out;
}

std::vector<double> col_sums(const Matrix& m) {
  const std::size_t n = m.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += m(i, j);
    out[j] = s;
  }
  return out;
}

ZoneAssignment best_iou_zone(std::span<const GeoPolygon> cells, std::span<const GeoPolygon> zones,
                             std::span<const std::string> zone_ids) {
  const auto boxes = detail::boxes_of(zones);
  ZoneAssignment out(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out[c] = detail::best_zone_for_cell(cells[c], zones, boxes, zone_ids);
  }
  return out;
}

SplitResult split_all(std::span<const GeoPolyline> lines, std::span<const GeoPolygon> zones,
                      double epsilon_km) {
  SplitResult out(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out[i] = geometry::split_polyline_by_zone(lines[i], zones, epsilon_km);
  }
  return out;
}

}  // namespace chargecast::kernels::serial
