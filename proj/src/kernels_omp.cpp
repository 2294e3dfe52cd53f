#include <omp.h>

#include "chargecast/kernels.hpp"
#include "kernels_detail.hpp"

namespace chargecast::kernels::omp {

namespace {
using Index = std::ptrdiff_t;
}

std::vector<double> mc_means(std::span<const GeoPolygon> polygons,
                             std::span<const std::uint64_t> seeds, std::size_t n_samples) {
  const Index n = static_cast<Index>(polygons.size());
  std::vector<double> out(polygons.size());
  detail::FirstError errors(polygons.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (Index i = 0; i < n; ++i) {
    try {
      out[i] = geometry::mc_mean_pairwise_distance_km(polygons[i], {n_samples, seeds[i]});
    } catch (...) {
      errors.capture(static_cast<std::size_t>(i));
    }
  }
  errors.rethrow();
  return out;
}

void scale_by_driving_ratio(const Matrix& trips, const Matrix& dist, double a, double b,
                            Matrix& out) {
  const double* t = trips.data().data();
  const double* d = dist.data().data();
  double* o = out.data().data();
  const Index n = static_cast<Index>(trips.data().size());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) o[k] = t[k] * detail::driving_ratio(a, b, d[k]);
}

void energy(const Matrix& trips, const Matrix& dist, double kwh_per_km, Matrix& out) {
  const double* t = trips.data().data();
  const double* d = dist.data().data();
  double* o = out.data().data();
  const Index n = static_cast<Index>(trips.data().size());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) o[k] = t[k] * d[k] * kwh_per_km;
}

std::vector<double> row_sums(const Matrix& m) {
  const Index n = static_cast<Index>(m.size());
  std::vector<double> out(m.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j) s += m(i, j);
    out[i] = s;
  }
  return out;
}

std::vector<double> col_sums(const Matrix& m) {
  const Index n = static_cast<Index>(m.size());
  std::vector<double> out(m.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += m(i, j);
    out[j] = s;
  }
  return out;
}

ZoneAssignment best_iou_zone(std::span<const GeoPolygon> cells, std::span<const GeoPolygon> zones,
                             std::span<const std::string> zone_ids) {
  const auto boxes = detail::boxes_of(zones);
  const Index n = static_cast<Index>(cells.size());
  ZoneAssignment out(cells.size());
  detail::FirstError errors(cells.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (Index c = 0; c < n; ++c) {
    try {
      out[c] = detail::best_zone_for_cell(cells[c], zones, boxes, zone_ids);
    } catch (...) {
      errors.capture(static_cast<std::size_t>(c));
    }
  }
  errors.rethrow();
  return out;
}

SplitResult split_all(std::span<const GeoPolyline> lines, std::span<const GeoPolygon> zones,
                      double epsilon_km) {
  const Index n = static_cast<Index>(lines.size());
  SplitResult out(lines.size());
  detail::FirstError errors(lines.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < n; ++i) {
    try {
      out[i] = geometry::split_polyline_by_zone(lines[i], zones, epsilon_km);
    } catch (...) {
      errors.capture(static_cast<std::size_t>(i));
    }
  }
  errors.rethrow();
  return out;
}

}  // namespace chargecast::kernels::omp
