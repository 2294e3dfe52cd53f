// Five-way split of zone demand: normal residential, normal office,
// semi-rapid, fast, and privately absorbed (home charging).
#pragma once

#include <string>
#include <vector>

#include "chargecast/geometry.hpp"
#include "chargecast/types.hpp"

namespace chargecast::segmentation {

struct ResidentialShare {
  double alpha = 1.0;
  double residential_km = 0.0;
  double classified_km = 0.0;
  bool degenerate = false;  // no classified road in the zone; alpha forced to 1
};

ResidentialShare residential_share(const Zone& zone, const std::vector<HighwayRecord>& highways,
                                   double epsilon_km = geometry::kDefaultSplitToleranceKm);

// All zones at once; each highway is split a single time.
std::vector<ResidentialShare> residential_shares(const std::vector<Zone>& zones,
                                                 const std::vector<HighwayRecord>& highways,
                                                 double epsilon_km = geometry::kDefaultSplitToleranceKm);

struct PoiAreaEntry {
  double a_office = 0.0;
  double a_semi = 0.0;
  double a_fast = 0.0;
  double sum_a = 0.0;

  friend bool operator==(const PoiAreaEntry&, const PoiAreaEntry&) = default;
};

GeoPoint representative_point(const PoiRecord& poi);

PoiAreaEntry poi_area_table(const Zone& zone, const std::vector<PoiRecord>& pois);
std::vector<PoiAreaEntry> poi_area_tables(const std::vector<Zone>& zones,
                                          const std::vector<PoiRecord>& pois);

enum class EmptyPoiPolicy { FoldIntoResidential, Error };

const char* to_string(EmptyPoiPolicy p);
EmptyPoiPolicy empty_poi_policy_from_string(const std::string& s);

// kWh per day.
struct SegmentedEntry {
  double phi_nres = 0.0;
  double phi_noff = 0.0;
  double phi_sem = 0.0;
  double phi_rap = 0.0;
  double phi_par = 0.0;
  bool empty_poi_fallback = false;

  double total() const { return phi_nres + phi_noff + phi_sem + phi_rap + phi_par; }
  double public_total() const { return phi_nres + phi_noff + phi_sem + phi_rap; }
};

SegmentedEntry segment_demand(double delta_regular, double delta_irregular, double alpha,
                              double gamma, const PoiAreaEntry& areas,
                              EmptyPoiPolicy policy = EmptyPoiPolicy::FoldIntoResidential);

struct SegmentedDemand {
  std::vector<std::string> zone_ids;
  std::vector<SegmentedEntry> entries;
};

std::string segmented_demand_to_csv(const SegmentedDemand& s);
SegmentedDemand segmented_demand_from_csv(const std::string& csv_text);

}  // namespace chargecast::segmentation
