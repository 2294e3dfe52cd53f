// Zone-to-zone driving distance matrix.
#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "chargecast/geometry.hpp"
#include "chargecast/types.hpp"

namespace chargecast::distances {

inline constexpr double kDefaultDetourIndex = 1.417;

enum class Weekday { Monday, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday };

const char* to_string(Weekday d);
Weekday weekday_from_string(const std::string& s);

struct TrafficContext {
  Weekday weekday = Weekday::Monday;
  int hour = 7;
};

struct OfflineRoutingConfig {
  double detour_index = kDefaultDetourIndex;
};

struct RouteQuery {
  GeoPoint origin;
  GeoPoint dest;
  std::string origin_zone;
  std::string dest_zone;
  TrafficContext ctx;
};

// A routing backend returns the driving distance from origin to destination.
// Implementations must be safe to call concurrently and return 0 when origin
// and destination coincide.
class RoutingBackend {
 public:
  virtual ~RoutingBackend() = default;
  virtual double route_km(const RouteQuery& q) const = 0;
  virtual std::string name() const = 0;
};

double offline_route_km(const GeoPoint& a, const GeoPoint& b, const OfflineRoutingConfig& cfg);

// Straight-line distance times the detour index.
class OfflineBackend final : public RoutingBackend {
 public:
  explicit OfflineBackend(OfflineRoutingConfig cfg = {});
  double route_km(const RouteQuery& q) const override;
  std::string name() const override { return "offline"; }

 private:
  OfflineRoutingConfig cfg_;
};

// Replays recorded distances keyed by (origin zone id, destination zone id).
// File: {"pairs": [{"o": id, "d": id, "km": number}, ...]}
class FixtureBackend final : public RoutingBackend {
 public:
  explicit FixtureBackend(std::map<std::pair<std::string, std::string>, double> table);
  static FixtureBackend load(const std::filesystem::path& path);
  static FixtureBackend parse(const std::string& json_text);

  double route_km(const RouteQuery& q) const override;
  std::string name() const override { return "fixture"; }
  const std::map<std::pair<std::string, std::string>, double>& table() const { return table_; }

 private:
  std::map<std::pair<std::string, std::string>, double> table_;
};

struct RemoteRoutingConfig {
  // Placeholders: {olat} {olon} {dlat} {dlon} {key} {day} {hour}
  std::string url_template;
  std::string response_km_pointer = "/km";  // JSON pointer to the distance
  double response_scale = 1.0;              // multiply the extracted value to get km
  std::string api_key_env = "CHARGECAST_ROUTING_KEY";
  double max_requests_per_second = 0.0;     // 0 = unlimited
  double timeout_s = 30.0;
};

// Generic HTTP GET backend. Any transport or parse failure throws
// BackendFailure; retries are the matrix builder's job.
class RemoteBackend final : public RoutingBackend {
 public:
  explicit RemoteBackend(RemoteRoutingConfig cfg);
  double route_km(const RouteQuery& q) const override;
  std::string name() const override { return "remote"; }

  std::string render_url(const RouteQuery& q) const;

 private:
  void throttle() const;

  RemoteRoutingConfig cfg_;
  std::string api_key_;
  mutable std::mutex throttle_mu_;
  mutable std::chrono::steady_clock::time_point next_slot_{};
};

struct BuildOptions {
  int max_concurrent_requests = 4;
  int retry_limit = 3;
  std::chrono::milliseconds backoff_base{0};
};

DistanceMatrix build_distance_matrix(const std::vector<Zone>& zones, const RoutingBackend& backend,
                                     const TrafficContext& ctx, const BuildOptions& opts = {});

std::uint64_t zone_seed(std::uint64_t global_seed, const std::string& zone_id);

DistanceMatrix fill_diagonal(DistanceMatrix m, const std::vector<Zone>& zones,
                             const geometry::McConfig& mc, const OfflineRoutingConfig& cfg);

std::string distance_matrix_to_csv(const DistanceMatrix& m);
DistanceMatrix distance_matrix_from_csv(const std::string& csv_text);

}  // namespace chargecast::distances
