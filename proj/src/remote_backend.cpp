#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chargecast/distances.hpp"
#include "chargecast/errors.hpp"

namespace chargecast::distances {

namespace {

std::string format_coord(double v) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.precision(8);
  ss << std::fixed << v;
  return ss.str();
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

// Splits "scheme://host[:port]/path?query" into (scheme://host[:port], /path?query).
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("routing URL has no scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteRoutingConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.url_template.empty()) throw ConfigError("remote routing backend needs a URL template");
  split_url(cfg_.url_template);
  if (const char* key = std::getenv(cfg_.api_key_env.c_str())) api_key_ = key;
  if (cfg_.url_template.find("{key}") != std::string::npos && api_key_.empty()) {
    throw ConfigError("URL template uses {key} but " + cfg_.api_key_env + " is not set");
  }
}

std::string RemoteBackend::render_url(const RouteQuery& q) const {
  std::string url = cfg_.url_template;
  replace_all(url, "{olat}", format_coord(q.origin.lat));
  replace_all(url, "{olon}", format_coord(q.origin.lon));
  replace_all(url, "{dlat}", format_coord(q.dest.lat));
  replace_all(url, "{dlon}", format_coord(q.dest.lon));
  replace_all(url, "{key}", api_key_);
  replace_all(url, "{day}", to_string(q.ctx.weekday));
  replace_all(url, "{hour}", std::to_string(q.ctx.hour));
  return url;
}

void RemoteBackend::throttle() const {
  if (cfg_.max_requests_per_second <= 0.0) return;
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / cfg_.max_requests_per_second));
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(throttle_mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

double RemoteBackend::route_km(const RouteQuery& q) const {
  if (q.origin == q.dest) return 0.0;
  throttle();
  const auto [base, path] = split_url(render_url(q));
  httplib::Client client(base);
  const auto timeout = std::chrono::duration<double>(cfg_.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  auto res = client.Get(path);
  if (!res) {
    throw BackendFailure("request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) throw BackendFailure("HTTP status " + std::to_string(res->status));
  try {
    const auto doc = nlohmann::json::parse(res->body);
    const auto& v = doc.at(nlohmann::json::json_pointer(cfg_.response_km_pointer));
    if (!v.is_number()) throw BackendFailure("distance field is not a number");
    return v.get<double>() * cfg_.response_scale;
  } catch (const nlohmann::json::exception& e) {
    throw BackendFailure(std::string("cannot read distance from response: ") + e.what());
  }
}

}  // namespace chargecast::distances
