#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "chargecast/types.hpp"

namespace testing {

inline constexpr double kR = 6371.0;
inline constexpr double kDeg = std::numbers::pi / 180.0;

inline chargecast::GeoPolygon rect(double lon0, double lat0, double lon1, double lat1) {
  return {{{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}}, {}};
}

// Spherical area of a lon/lat rectangle.
inline double rect_area(double lon0, double lat0, double lon1, double lat1) {
  return kR * kR * (lon1 - lon0) * kDeg * (std::sin(lat1 * kDeg) - std::sin(lat0 * kDeg));
}

// Lon/lat rectangle of exactly side_km × side_km area whose height is side_km.
inline chargecast::GeoPolygon km_square(double lon0, double lat0, double side_km) {
  const double dlat = side_km / kR / kDeg;
  const double dlon = side_km * side_km / (kR * kR * (std::sin((lat0 + dlat) * kDeg) - std::sin(lat0 * kDeg))) / kDeg;
  return rect(lon0, lat0, lon0 + dlon, lat0 + dlat);
}

inline chargecast::Zone zone(std::string id, chargecast::GeoPolygon poly, double tau = 1000.0,
                             double chi = 2.0, double sigma = 0.0) {
  chargecast::Zone z;
  z.id = id;
  z.name = std::move(id);
  z.polygon = std::move(poly);
  z.pop_density_tau = tau;
  z.household_size_chi = chi;
  z.par_count_sigma = sigma;
  return z;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("chargecast-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
