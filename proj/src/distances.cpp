#include "chargecast/distances.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "chargecast/errors.hpp"
#include "chargecast/ingest.hpp"
#include "chargecast/kernels.hpp"
#include "csv.hpp"

namespace chargecast::distances {

using nlohmann::json;

namespace {
constexpr const char* kWeekdayNames[] = {"monday", "tuesday", "wednesday", "thursday",
                                         "friday", "saturday", "sunday"};
}

const char* to_string(Weekday d) { return kWeekdayNames[static_cast<int>(d)]; }

Weekday weekday_from_string(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (int i = 0; i < 7; ++i) {
    if (lower == kWeekdayNames[i] || lower == std::string(kWeekdayNames[i]).substr(0, 3)) {
      return static_cast<Weekday>(i);
    }
  }
  throw ConfigError("unknown weekday '" + s + "'");
}

double offline_route_km(const GeoPoint& a, const GeoPoint& b, const OfflineRoutingConfig& cfg) {
  return geometry::haversine_km(a, b) * cfg.detour_index;
}

OfflineBackend::OfflineBackend(OfflineRoutingConfig cfg) : cfg_(cfg) {
  if (!(cfg_.detour_index >= 1.0) || !std::isfinite(cfg_.detour_index)) {
    throw ConfigError("detour index must be >= 1");
  }
}

double OfflineBackend::route_km(const RouteQuery& q) const {
  return offline_route_km(q.origin, q.dest, cfg_);
}

FixtureBackend::FixtureBackend(std::map<std::pair<std::string, std::string>, double> table)
    : table_(std::move(table)) {}

FixtureBackend FixtureBackend::parse(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("routing fixture is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw SchemaError("routing fixture needs a 'pairs' array");
  }
  std::map<std::pair<std::string, std::string>, double> table;
  for (const auto& p : doc["pairs"]) {
    if (!p.is_object() || !p.contains("o") || !p.contains("d") || !p.contains("km") ||
        !p["o"].is_string() || !p["d"].is_string() || !p["km"].is_number()) {
      throw SchemaError("routing fixture pair needs string o, string d, number km");
    }
    const double km = p["km"].get<double>();
    if (!(km >= 0.0) || !std::isfinite(km)) throw SchemaError("routing fixture km must be >= 0");
    table[{p["o"].get<std::string>(), p["d"].get<std::string>()}] = km;
  }
  return FixtureBackend(std::move(table));
}

FixtureBackend FixtureBackend::load(const std::filesystem::path& path) {
  return parse(ingest::read_text_file(path));
}

double FixtureBackend::route_km(const RouteQuery& q) const {
  if (q.origin_zone == q.dest_zone) return 0.0;
  auto it = table_.find({q.origin_zone, q.dest_zone});
  if (it == table_.end()) {
    throw BackendFailure("fixture has no entry for " + q.origin_zone + " -> " + q.dest_zone);
  }
  return it->second;
}

DistanceMatrix build_distance_matrix(const std::vector<Zone>& zones, const RoutingBackend& backend,
                                     const TrafficContext& ctx, const BuildOptions& opts) {
  if (zones.empty()) throw PreconditionViolation("distance matrix needs at least one zone");
  if (ctx.hour < 0 || ctx.hour > 23) throw ConfigError("traffic hour must be in 0..23");
  const std::size_t n = zones.size();
  DistanceMatrix m;
  m.km = Matrix(n);
  std::vector<GeoPoint> centers;
  for (const auto& z : zones) {
    m.zone_ids.push_back(z.id);
    centers.push_back(geometry::centroid(z.polygon));
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }

  std::vector<std::string> failure(pairs.size());
  std::vector<char> failed(pairs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pairs.size(); k = next++) {
      const auto [i, j] = pairs[k];
      const RouteQuery q{centers[i], centers[j], zones[i].id, zones[j].id, ctx};
      for (int attempt = 0;; ++attempt) {
        try {
          const double km = backend.route_km(q);
          if (!std::isfinite(km) || km < 0.0) {
            throw BackendFailure("backend returned invalid distance " + std::to_string(km));
          }
          m.km(i, j) = km;
          break;
        } catch (const std::exception& e) {
          if (attempt >= opts.retry_limit) {
            failed[k] = 1;
            failure[k] = e.what();
            break;
          }
          if (opts.backoff_base.count() > 0) {
            std::this_thread::sleep_for(opts.backoff_base * (1LL << std::min(attempt, 16)));
          }
        }
      }
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, opts.max_concurrent_requests)), 1,
                              std::max<std::size_t>(1, pairs.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<FailedPair> failures;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (failed[k]) failures.push_back({pairs[k].first, pairs[k].second, failure[k]});
  }
  if (!failures.empty()) {
    std::ostringstream msg;
    msg << failures.size() << " origin/destination pairs failed:";
    for (const auto& f : failures) {
      msg << " (" << zones[f.origin].id << " -> " << zones[f.dest].id << ": " << f.cause << ")";
    }
    throw BackendFailure(msg.str(), std::move(failures));
  }
  return m;
}

std::uint64_t zone_seed(std::uint64_t global_seed, const std::string& zone_id) {
  return global_seed ^ geometry::stable_hash64(zone_id);
}

DistanceMatrix fill_diagonal(DistanceMatrix m, const std::vector<Zone>& zones,
                             const geometry::McConfig& mc, const OfflineRoutingConfig& cfg) {
  if (m.km.size() != zones.size()) {
    throw DimensionMismatch("distance matrix has " + std::to_string(m.km.size()) +
                            " rows but there are " + std::to_string(zones.size()) + " zones");
  }
  std::vector<GeoPolygon> polys;
  std::vector<std::uint64_t> seeds;
  for (const auto& z : zones) {
    polys.push_back(z.polygon);
    seeds.push_back(zone_seed(mc.seed, z.id));
  }
  std::vector<double> means;
  try {
    means = kernels::omp::mc_means(polys, seeds, mc.n_samples);
  } catch (const Error& e) {
    // Name the zone: rerun serially to find the first offender.
    for (std::size_t i = 0; i < zones.size(); ++i) {
      try {
        geometry::mc_mean_pairwise_distance_km(polys[i], {mc.n_samples, seeds[i]});
      } catch (const DegenerateGeometry& inner) {
        throw DegenerateGeometry("zone '" + zones[i].id + "': " + inner.what());
      } catch (const SamplingStalled& inner) {
        throw SamplingStalled("zone '" + zones[i].id + "': " + inner.what());
      }
    }
    throw;
  }
  for (std::size_t i = 0; i < zones.size(); ++i) m.km(i, i) = means[i] * cfg.detour_index;
  return m;
}

std::string distance_matrix_to_csv(const DistanceMatrix& m) {
  std::string out = "origin";
  for (const auto& id : m.zone_ids) out += "," + csv::escape(id);
  out += "\n";
  for (std::size_t i = 0; i < m.km.size(); ++i) {
    out += csv::escape(m.zone_ids[i]);
    for (std::size_t j = 0; j < m.km.size(); ++j) out += "," + csv::fixed6(m.km(i, j));
    out += "\n";
  }
  return out;
}

DistanceMatrix distance_matrix_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  DistanceMatrix m;
  if (!std::getline(in, line)) throw SchemaError("distance matrix CSV is empty");
  auto header = csv::split(line);
  if (header.empty() || header[0] != "origin") throw SchemaError("distance matrix CSV needs 'origin' header");
  m.zone_ids.assign(header.begin() + 1, header.end());
  const std::size_t n = m.zone_ids.size();
  m.km = Matrix(n);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = csv::split(line);
    if (row >= n || fields.size() != n + 1 || fields[0] != m.zone_ids[row]) {
      throw SchemaError("distance matrix CSV row " + std::to_string(row + 1) + " is malformed");
    }
    for (std::size_t j = 0; j < n; ++j) {
      try {
        m.km(row, j) = std::stod(fields[j + 1]);
      } catch (const std::exception&) {
        throw SchemaError("distance matrix CSV has a non-numeric entry in row " + std::to_string(row + 1));
      }
    }
    ++row;
  }
  if (row != n) throw SchemaError("distance matrix CSV is not square");
  return m;
}

}  // namespace chargecast::distances
