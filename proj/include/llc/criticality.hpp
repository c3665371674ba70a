#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llc/common.hpp"
#include "llc/geometry.hpp"
#include "llc/ingest.hpp"
#include "llc/visitation.hpp"

namespace llc {

struct DependenceEntry {
  std::string origin_zone_id;
  std::uint64_t visits = 0;
  int substitutability = 1;
  double dependence = 0.0;  // visits / substitutability
};

// Per-facility catchment with substitutability-adjusted visit contributions,
// entries sorted by origin zone id.
struct DependenceVector {
  std::string facility_id;
  std::vector<DependenceEntry> entries;

  std::size_t catchment_size() const { return entries.size(); }
};

enum class CriticalityLevel { low, medium, high };

std::string_view to_string(CriticalityLevel level);

// fc_norm bands: low < medium_min; medium in [medium_min, high_min); high >= high_min.
struct ClassThresholds {
  double medium_min = 0.30;
  double high_min = 0.50;
};

struct CriticalityScore {
  std::string facility_id;
  FacilityCategory category = FacilityCategory::grocery;
  double fc_raw = 0.0;
  double fc_norm = 0.0;
  CriticalityLevel level = CriticalityLevel::low;
  std::uint64_t catchment_size = 0;
};

enum class NormGrouping { per_category, global };

// Origin zones with at least one recorded visit, sorted by zone_id.
// Throws on a facility with no recorded visits (score undefined).
std::vector<std::string> catchment(const VisitationNetwork& network,
                                   const std::string& facility_id);

// Throws when a catchment zone is absent from the adjacency graph.
DependenceVector dependence_vector(const VisitationNetwork& network,
                                   const std::string& facility_id,
                                   const AdjacencyGraph& adjacency);

// Arithmetic mean of the dependence entries.
double functional_criticality(const DependenceVector& dv);

// Min-max within each group; a constant group maps every member to 0 with a
// warning. Fills fc_norm in place.
void normalize_scores(std::vector<CriticalityScore>& scores, NormGrouping grouping,
                      WarningLog& warnings);

// Throws on fc_norm outside [0, 1].
CriticalityLevel classify_level(double fc_norm, const ClassThresholds& thresholds = {});

struct CategorySummary {
  FacilityCategory category = FacilityCategory::grocery;
  std::uint64_t total = 0;
  std::uint64_t count[3] = {0, 0, 0};  // indexed by CriticalityLevel
  double pct[3] = {0, 0, 0};           // rounded to 1 decimal
  double mean_fc_norm = 0.0;
};

std::vector<CategorySummary> category_summary(const std::vector<CriticalityScore>& scores);

struct CriticalityResult {
  std::vector<CriticalityScore> scores;         // sorted by facility_id
  std::vector<std::string> empty_catchment;     // facilities with no visits, sorted
};

// Scores every facility with a non-empty catchment; facilities without visits
// are listed separately rather than given a score.
CriticalityResult score_facilities(const VisitationNetwork& network,
                                   const std::vector<FacilityRecord>& facilities,
                                   const AdjacencyGraph& adjacency, NormGrouping grouping,
                                   const ClassThresholds& thresholds, WarningLog& warnings,
                                   unsigned jobs = 1);

}  // namespace llc
