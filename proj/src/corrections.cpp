#include "chargecast/corrections.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "chargecast/errors.hpp"
#include "chargecast/geometry.hpp"
#include "chargecast/ingest.hpp"
#include "chargecast/kernels.hpp"
#include "csv.hpp"

namespace chargecast::corrections {

ModeShareTable ModeShareTable::brussels_defaults() {
  return {{{0.0, 1.0, 0.17},
           {1.0, 2.0, 0.40},
           {2.0, 5.0, 0.59},
           {5.0, 10.0, 0.72},
           {10.0, 20.0, 0.78},
           {20.0, 50.0, 0.74}}};
}

void validate(const ModeShareTable& table) {
  if (table.bins.empty()) throw SchemaError("mode-share table has no bins");
  for (std::size_t k = 0; k < table.bins.size(); ++k) {
    const auto& b = table.bins[k];
    if (!(b.lo_km < b.hi_km) || b.lo_km < 0.0) {
      throw SchemaError("mode-share bin " + std::to_string(k) + " needs 0 <= lo < hi");
    }
    if (!(b.drive_share >= 0.0 && b.drive_share <= 1.0)) {
      throw SchemaError("mode-share bin " + std::to_string(k) + " share must be in [0, 1]");
    }
    if (k > 0 && b.lo_km != table.bins[k - 1].hi_km) {
      throw SchemaError("mode-share bins must be contiguous (bin " + std::to_string(k) + ")");
    }
  }
}

ModeShareTable parse_mode_share_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  ModeShareTable table;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line.starts_with('#')) continue;
    const auto f = csv::split(line);
    if (!header) {
      if (f != std::vector<std::string>{"lo_km", "hi_km", "drive_share"}) {
        throw SchemaError("mode-share CSV needs header lo_km,hi_km,drive_share");
      }
      header = true;
      continue;
    }
    if (f.size() != 3) throw SchemaError("mode-share line " + std::to_string(line_no) + ": 3 fields expected");
    try {
      table.bins.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2])});
    } catch (const std::exception&) {
      throw SchemaError("mode-share line " + std::to_string(line_no) + ": non-numeric field");
    }
  }
  validate(table);
  return table;
}

ModeShareTable load_mode_share_csv(const std::filesystem::path& path) {
  return parse_mode_share_csv(ingest::read_text_file(path));
}

const char* to_string(AbscissaRule r) {
  switch (r) {
    case AbscissaRule::BinMidpoint: return "midpoint";
    case AbscissaRule::BinLow: return "low";
    case AbscissaRule::BinHigh: return "high";
  }
  return "midpoint";
}

AbscissaRule abscissa_rule_from_string(const std::string& s) {
  if (s == "midpoint") return AbscissaRule::BinMidpoint;
  if (s == "low") return AbscissaRule::BinLow;
  if (s == "high") return AbscissaRule::BinHigh;
  throw ConfigError("unknown abscissa rule '" + s + "' (midpoint|low|high)");
}

namespace {

struct Curve {
  std::span<const double> x;
  std::span<const double> y;

  double sse(double a, double b) const {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double r = y[k] - a * (1.0 - std::exp(-b * x[k]));
      s += r * r;
    }
    return s;
  }
};

struct StartResult {
  double a;
  double b;
  double sse;
};

StartResult levenberg_marquardt(const Curve& c, double a, double b, const FitOptions& opts) {
  double sse = c.sse(a, b);
  double lambda = 1e-3;
  for (int it = 0; it < opts.max_iterations; ++it) {
    // Normal equations for the residual r = y − f.
    double h00 = 0.0, h01 = 0.0, h11 = 0.0, g0 = 0.0, g1 = 0.0;
    for (std::size_t k = 0; k < c.x.size(); ++k) {
      const double e = std::exp(-b * c.x[k]);
      const double ja = 1.0 - e;
      const double jb = a * c.x[k] * e;
      const double r = c.y[k] - a * ja;
      h00 += ja * ja;
      h01 += ja * jb;
      h11 += jb * jb;
      g0 += ja * r;
      g1 += jb * r;
    }
    bool accepted = false;
    bool converged = false;
    while (!accepted) {
      const double d00 = h00 + lambda * std::max(h00, 1e-12);
      const double d11 = h11 + lambda * std::max(h11, 1e-12);
      const double det = d00 * d11 - h01 * h01;
      if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
        lambda *= 10.0;
      } else {
        const double da = (d11 * g0 - h01 * g1) / det;
        const double db = (d00 * g1 - h01 * g0) / det;
        const double na = std::clamp(a + da, 0.0, 1.0);
        const double nb = std::max(b + db, 1e-12);
        const double nsse = c.sse(na, nb);
        if (std::isfinite(nsse) && nsse <= sse) {
          const double step = std::max(std::abs(na - a), std::abs(nb - b));
          a = na;
          b = nb;
          sse = nsse;
          lambda = std::max(lambda / 10.0, 1e-15);
          accepted = true;
          converged = step < opts.step_tolerance;
        } else {
          lambda *= 10.0;
        }
      }
      if (lambda > 1e15) {
        // No descent direction left: stationary point.
        return {a, b, sse};
      }
    }
    if (converged) break;
  }
  return {a, b, sse};
}

}  // namespace

DrivingRatioModel fit_saturating_exponential(std::span<const double> x, std::span<const double> y,
                                             const FitOptions& opts) {
  if (x.size() != y.size()) throw DimensionMismatch("x and y must have the same length");
  std::set<double> distinct(x.begin(), x.end());
  if (x.size() < 2 || distinct.size() < 2) {
    throw PreconditionViolation("fit needs at least 2 points with distinct abscissae");
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) throw DegenerateData("non-finite fit input");
  }
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
    throw DegenerateData("all shares are zero");
  }

  const Curve curve{x, y};
  constexpr std::array<double, 4> kStartA{0.25, 0.5, 0.75, 1.0};
  constexpr std::array<double, 4> kStartB{0.1, 0.5, 1.0, 2.0};
  std::optional<StartResult> best;
  for (double a0 : kStartA) {
    for (double b0 : kStartB) {
      const StartResult r = levenberg_marquardt(curve, a0, b0, opts);
      if (!std::isfinite(r.sse) || !std::isfinite(r.a) || !std::isfinite(r.b)) continue;
      if (!best || r.sse < best->sse) best = r;
    }
  }
  if (!best) throw FitDiverged("no start converged to a finite solution");
  return {best->a, best->b, best->sse};
}

DrivingRatioModel fit_driving_ratio(const ModeShareTable& table, AbscissaRule rule,
                                    const FitOptions& opts) {
  validate(table);
  if (table.bins.size() < 2) throw PreconditionViolation("driving-ratio fit needs at least 2 bins");
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& bin : table.bins) {
    switch (rule) {
      case AbscissaRule::BinMidpoint: x.push_back(0.5 * (bin.lo_km + bin.hi_km)); break;
      case AbscissaRule::BinLow: x.push_back(bin.lo_km); break;
      case AbscissaRule::BinHigh: x.push_back(bin.hi_km); break;
    }
    y.push_back(bin.drive_share);
  }
  return fit_saturating_exponential(x, y, opts);
}

double driving_ratio(const DrivingRatioModel& model, double d_km) {
  return model.a_param * (1.0 - std::exp(-model.b_param * d_km));
}

TripMatrix apply_driving_ratio(const TripMatrix& trips, const DistanceMatrix& dist,
                               const DrivingRatioModel& model) {
  const std::size_t n = trips.regular.size();
  if (trips.irregular.size() != n || dist.km.size() != n || trips.zone_ids != dist.zone_ids) {
    throw DimensionMismatch("trip and distance matrices do not describe the same zones");
  }
  TripMatrix out{trips.zone_ids, Matrix(n), Matrix(n)};
  kernels::omp::scale_by_driving_ratio(trips.regular, dist.km, model.a_param, model.b_param,
                                       out.regular);
  kernels::omp::scale_by_driving_ratio(trips.irregular, dist.km, model.a_param, model.b_param,
                                       out.irregular);
  return out;
}

const char* to_string(PprFormula f) {
  return f == PprFormula::Literal ? "literal" : "households";
}

PprFormula ppr_formula_from_string(const std::string& s) {
  if (s == "households") return PprFormula::Households;
  if (s == "literal") return PprFormula::Literal;
  throw ConfigError("unknown PPR formula '" + s + "' (households|literal)");
}

PprEntry compute_ppr(const Zone& zone, std::optional<double> cap, PprFormula formula) {
  if (!(zone.household_size_chi > 0.0)) {
    throw PreconditionViolation("zone '" + zone.id + "': household size must be > 0");
  }
  if (cap && !(*cap >= 0.0 && *cap <= 1.0)) throw ConfigError("PPR cap must be in [0, 1]");

  PprEntry e;
  if (formula == PprFormula::Households) {
    const double area = geometry::polygon_area_km2(zone.polygon);
    e.households = zone.pop_density_tau * area / zone.household_size_chi;
  } else {
    e.households = zone.pop_density_tau * zone.household_size_chi;
  }

  if (e.households > 0.0) {
    e.raw_ppr = zone.par_count_sigma / e.households;
  } else if (zone.par_count_sigma > 0.0) {
    e.raw_ppr = std::numeric_limits<double>::infinity();
    e.no_households = true;
  } else {
    e.raw_ppr = 0.0;
  }

  const double upper = std::min(cap.value_or(1.0), 1.0);
  e.gamma = e.no_households ? upper : std::min(e.raw_ppr, upper);
  e.clamped = e.raw_ppr > e.gamma;
  return e;
}

}  // namespace chargecast::corrections
