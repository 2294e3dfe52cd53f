// Driving-ratio model A(1 − e^{−B·d}) and the private-parking ratio γ.
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chargecast/types.hpp"

namespace chargecast::corrections {

struct ModeShareBin {
  double lo_km = 0.0;
  double hi_km = 0.0;
  double drive_share = 0.0;
};

struct ModeShareTable {
  std::vector<ModeShareBin> bins;

  // Drive shares of the Brussels mobility survey for 0–50 km trips.
  static ModeShareTable brussels_defaults();
};

void validate(const ModeShareTable& table);
ModeShareTable parse_mode_share_csv(const std::string& csv_text);
ModeShareTable load_mode_share_csv(const std::filesystem::path& path);

enum class AbscissaRule { BinMidpoint, BinLow, BinHigh };

const char* to_string(AbscissaRule r);
AbscissaRule abscissa_rule_from_string(const std::string& s);

struct DrivingRatioModel {
  double a_param = 0.0;
  double b_param = 0.0;
  double sse = 0.0;
};

struct FitOptions {
  double step_tolerance = 1e-9;
  int max_iterations = 500;
};

// Least-squares fit of y ≈ A(1 − e^{−Bx}) from a 4×4 grid of starts with a
// Levenberg–Marquardt damped Gauss–Newton step. A is kept in [0, 1], B > 0.
DrivingRatioModel fit_saturating_exponential(std::span<const double> x, std::span<const double> y,
                                             const FitOptions& opts = {});

DrivingRatioModel fit_driving_ratio(const ModeShareTable& table,
                                    AbscissaRule rule = AbscissaRule::BinMidpoint,
                                    const FitOptions& opts = {});

double driving_ratio(const DrivingRatioModel& model, double d_km);

TripMatrix apply_driving_ratio(const TripMatrix& trips, const DistanceMatrix& dist,
                               const DrivingRatioModel& model);

enum class PprFormula {
  Households,  // PARs per household: σ / (τ · area / χ)
  Literal,     // σ / (τ · χ) as printed, τ taken as a plain number
};

const char* to_string(PprFormula f);
PprFormula ppr_formula_from_string(const std::string& s);

struct PprEntry {
  double gamma = 0.0;
  double raw_ppr = 0.0;
  double households = 0.0;
  bool no_households = false;  // σ > 0 with zero households; γ forced to 1
  bool clamped = false;        // raw value exceeded the cap or 1
};

PprEntry compute_ppr(const Zone& zone, std::optional<double> cap = std::nullopt,
                     PprFormula formula = PprFormula::Households);

}  // namespace chargecast::corrections
