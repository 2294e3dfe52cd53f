#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chargecast {

// Maps onto the CLI exit codes: config 2, data 3, backend 4.
enum class ErrorCategory { Config = 2, Data = 3, Backend = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message),
        category_(category),
        kind_(std::move(kind)),
        message_(message) {}

  ErrorCategory category() const { return category_; }
  const std::string& kind() const { return kind_; }
  const std::string& message() const { return message_; }

 private:
  ErrorCategory category_;
  std::string kind_;
  std::string message_;
};

#define CHARGECAST_ERROR(Name, Category)                                         \
  class Name : public Error {                                                    \
   public:                                                                       \
    explicit Name(const std::string& message) : Error(Category, #Name, message) {} \
  };

CHARGECAST_ERROR(ConfigError, ErrorCategory::Config)
CHARGECAST_ERROR(InvalidTolerance, ErrorCategory::Config)
CHARGECAST_ERROR(PreconditionViolation, ErrorCategory::Config)
CHARGECAST_ERROR(MissingSpec, ErrorCategory::Config)

CHARGECAST_ERROR(SchemaError, ErrorCategory::Data)
CHARGECAST_ERROR(DuplicateZoneId, ErrorCategory::Data)
CHARGECAST_ERROR(UnknownCell, ErrorCategory::Data)
CHARGECAST_ERROR(DegenerateGeometry, ErrorCategory::Data)
CHARGECAST_ERROR(SamplingStalled, ErrorCategory::Data)
CHARGECAST_ERROR(DimensionMismatch, ErrorCategory::Data)
CHARGECAST_ERROR(InvalidFraction, ErrorCategory::Data)
CHARGECAST_ERROR(FitDiverged, ErrorCategory::Data)
CHARGECAST_ERROR(DegenerateData, ErrorCategory::Data)
CHARGECAST_ERROR(EmptyPoiFallback, ErrorCategory::Data)
CHARGECAST_ERROR(IoError, ErrorCategory::Data)

#undef CHARGECAST_ERROR

struct FailedPair {
  std::size_t origin = 0;
  std::size_t dest = 0;
  std::string cause;
};

// Raised once all retries are exhausted; lists every pair that failed.
class BackendFailure : public Error {
 public:
  BackendFailure(const std::string& message, std::vector<FailedPair> pairs = {})
      : Error(ErrorCategory::Backend, "BackendFailure", message), pairs_(std::move(pairs)) {}

  const std::vector<FailedPair>& pairs() const { return pairs_; }

 private:
  std::vector<FailedPair> pairs_;
};

}  // namespace chargecast
