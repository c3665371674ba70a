#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llc/common.hpp"
#include "llc/criticality.hpp"
#include "llc/hazard.hpp"
#include "llc/ingest.hpp"
#include "llc/visitation.hpp"

namespace llc {

// V_{f,j}: visits into each facility from residents of each ZCTA.
struct ZctaVisitTable {
  // zcta -> (facility -> visits)
  std::map<std::string, std::map<std::string, std::uint64_t>> visits;
};

// Aggregates zone-level visits through the crosswalk. Origin zones absent
// from the crosswalk are excluded with a counted warning.
ZctaVisitTable zcta_visits(const VisitationNetwork& network, const CrosswalkTable& crosswalk,
                           WarningLog& warnings);

struct RegionalIndex {
  std::string zcta_id;
  int year = 0;
  double vwme = 0.0;
  std::uint64_t visit_weight_total = 0;
  std::uint64_t facility_count = 0;  // facilities contributing positive weight
};

// Visitation-weighted mean of fc * fe over the given (facility, weight)
// pairs. Returns nullopt when the total weight is zero (insufficient data).
// fc_of: facility -> criticality value; fe_of: facility -> exposure for the
// target year. A positively weighted facility missing either is an error.
std::optional<RegionalIndex> vwme_index(
    const std::string& zcta_id, int year,
    const std::map<std::string, std::uint64_t>& facility_weights,
    const std::map<std::string, double>& fc_of, const std::map<std::string, double>& fe_of);

enum class VwmeMembership { behavioral, containment };

struct RegionalOptions {
  VwmeMembership membership = VwmeMembership::behavioral;
  bool use_fc_raw = false;
};

// All indices for both scenario years, sorted by (zcta, year). In
// containment mode only facilities geographically inside the ZCTA's member
// zones contribute; facility_zcta supplies that mapping.
std::vector<RegionalIndex> compute_regional_indices(
    const ZctaVisitTable& table, const std::vector<CriticalityScore>& scores,
    const std::vector<FacilityExposure>& exposures, const RegionalOptions& options,
    const std::map<std::string, std::string>& facility_zcta);

struct RegionalSummary {
  std::uint64_t zcta_count = 0;
  double mean_2020 = 0.0;
  double mean_2060 = 0.0;
  double delta_mean = 0.0;
  std::optional<double> pct_change_mean;  // absent when mean_2020 is 0
  std::uint64_t above_mean_2020 = 0;      // strictly above that year's mean
  std::uint64_t above_mean_2060 = 0;
  std::int64_t delta_above = 0;
  std::optional<double> pct_change_above;
};

RegionalSummary regional_summary(const std::vector<RegionalIndex>& indices);

}  // namespace llc
