#pragma once

#include <map>
#include <string>
#include <vector>

namespace chargecast {

struct Warning {
  std::string stage;
  std::string code;
  std::string message;

  friend bool operator==(const Warning&, const Warning&) = default;
};

// Collects warnings and counters across a run. Not thread-safe: parallel
// kernels return per-item flags and the caller records them in index order.
class Diagnostics {
 public:
  void warn(std::string stage, std::string code, std::string message) {
    warnings_.push_back({std::move(stage), std::move(code), std::move(message)});
  }
  void count(const std::string& key, long long n = 1) { counters_[key] += n; }

  const std::vector<Warning>& warnings() const { return warnings_; }
  const std::map<std::string, long long>& counters() const { return counters_; }
  long long counter(const std::string& key) const {
    auto it = counters_.find(key);
    return it == counters_.end() ? 0 : it->second;
  }

 private:
  std::vector<Warning> warnings_;
  std::map<std::string, long long> counters_;
};

}  // namespace chargecast
