// Data-parallel inner loops of the pipeline.
//
// Every kernel exists twice with identical signatures: `serial` is the
// reference implementation used by tests and benchmarks, `omp` is what the
// modules call. Both produce bit-identical output for any thread count: work
// items are independent and every reduction runs in a fixed index order.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chargecast/geometry.hpp"
#include "chargecast/types.hpp"

namespace chargecast::kernels {

using ZoneAssignment = std::vector<std::optional<std::size_t>>;
using SplitResult = std::vector<std::vector<geometry::PolylinePiece>>;

namespace serial {

// One MC mean pairwise distance per polygon, seeded by seeds[i].
std::vector<double> mc_means(std::span<const GeoPolygon> polygons,
                             std::span<const std::uint64_t> seeds, std::size_t n_samples);

// out(i,j) = trips(i,j) · a · (1 − exp(−b · dist(i,j)))
void scale_by_driving_ratio(const Matrix& trips, const Matrix& dist, double a, double b,
                            Matrix& out);

// out(i,j) = trips(i,j) · dist(i,j) · kwh_per_km
void energy(const Matrix& trips, const Matrix& dist, double kwh_per_km, Matrix& out);

std::vector<double> row_sums(const Matrix& m);
std::vector<double> col_sums(const Matrix& m);

// Index of the zone with maximal IoU per cell; ties go to the smallest id,
// zero overlap gives nullopt.
ZoneAssignment best_iou_zone(std::span<const GeoPolygon> cells, std::span<const GeoPolygon> zones,
                             std::span<const std::string> zone_ids);

SplitResult split_all(std::span<const GeoPolyline> lines, std::span<const GeoPolygon> zones,
                      double epsilon_km);

}  // namespace serial

namespace omp {

std::vector<double> mc_means(std::span<const GeoPolygon> polygons,
                             std::span<const std::uint64_t> seeds, std::size_t n_samples);
void scale_by_driving_ratio(const Matrix& trips, const Matrix& dist, double a, double b,
                            Matrix& out);
void energy(const Matrix& trips, const Matrix& dist, double kwh_per_km, Matrix& out);
std::vector<double> row_sums(const Matrix& m);
std::vector<double> col_sums(const Matrix& m);
ZoneAssignment best_iou_zone(std::span<const GeoPolygon> cells, std::span<const GeoPolygon> zones,
                             std::span<const std::string> zone_ids);
SplitResult split_all(std::span<const GeoPolyline> lines, std::span<const GeoPolygon> zones,
                      double epsilon_km);

}  // namespace omp

}  // namespace chargecast::kernels
