#include "llc/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace llc {

std::string_view to_string(CriticalityLevel level) {
  switch (level) {
    case CriticalityLevel::low: return "low";
    case CriticalityLevel::medium: return "medium";
    case CriticalityLevel::high: return "high";
  }
  return "low";
}

std::vector<std::string> catchment(const VisitationNetwork& network,
                                   const std::string& facility_id) {
  if (!network.has_facility(facility_id)) {
    throw ValidationError("facility '" + facility_id + "' has an empty catchment");
  }
  std::vector<std::string> origins;
  for (const auto& origin : network.origin_ids()) {
    if (network.visits(origin, facility_id) > 0) origins.push_back(origin);
  }
  if (origins.empty()) {
    throw ValidationError("facility '" + facility_id + "' has an empty catchment");
  }
  std::sort(origins.begin(), origins.end());
  return origins;
}

DependenceVector dependence_vector(const VisitationNetwork& network,
                                   const std::string& facility_id,
                                   const AdjacencyGraph& adjacency) {
  DependenceVector dv;
  dv.facility_id = facility_id;
  for (const auto& origin : catchment(network, facility_id)) {
    if (!adjacency.contains(origin)) {
      throw ValidationError("catchment zone '" + origin + "' of facility '" + facility_id +
                            "' is missing from the zone set");
    }
    DependenceEntry entry;
    entry.origin_zone_id = origin;
    entry.visits = network.visits(origin, facility_id);
    entry.substitutability = adjacency.substitutability(origin);
    entry.dependence = static_cast<double>(entry.visits) / entry.substitutability;
    dv.entries.push_back(std::move(entry));
  }
  return dv;
}

double functional_criticality(const DependenceVector& dv) {
  if (dv.entries.empty()) {
    throw ValidationError("facility '" + dv.facility_id + "' has an empty catchment");
  }
  double sum = 0.0;
  for (const auto& entry : dv.entries) sum += entry.dependence;
  return sum / static_cast<double>(dv.entries.size());
}

void normalize_scores(std::vector<CriticalityScore>& scores, NormGrouping grouping,
                      WarningLog& warnings) {
  if (scores.empty()) throw ValidationError("cannot normalize an empty score set");
  auto group_of = [&](const CriticalityScore& s) -> std::string {
    return grouping == NormGrouping::global ? "all" : std::string(to_string(s.category));
  };
  struct Range {
    double min = 0, max = 0;
    bool any = false;
  };
  std::map<std::string, Range> ranges;
  for (const auto& s : scores) {
    auto& r = ranges[group_of(s)];
    if (!r.any) {
      r.min = r.max = s.fc_raw;
      r.any = true;
    } else {
      r.min = std::min(r.min, s.fc_raw);
      r.max = std::max(r.max, s.fc_raw);
    }
  }
  for (const auto& [group, r] : ranges) {
    if (r.max == r.min) {
      warnings.add("constant_norm_group",
                   "group '" + group + "' has constant raw score " + format_sig6(r.min) +
                       "; all members normalized to 0");
    }
  }
  for (auto& s : scores) {
    const Range& r = ranges[group_of(s)];
    s.fc_norm = r.max == r.min ? 0.0 : (s.fc_raw - r.min) / (r.max - r.min);
  }
}

CriticalityLevel classify_level(double fc_norm, const ClassThresholds& thresholds) {
  if (!(fc_norm >= 0.0 && fc_norm <= 1.0)) {
    throw ValidationError("normalized score " + format_sig6(fc_norm) + " outside [0, 1]");
  }
  if (fc_norm < thresholds.medium_min) return CriticalityLevel::low;
  if (fc_norm < thresholds.high_min) return CriticalityLevel::medium;
  return CriticalityLevel::high;
}

std::vector<CategorySummary> category_summary(const std::vector<CriticalityScore>& scores) {
  std::map<std::string, CategorySummary> by_category;
  std::map<std::string, double> norm_sum;
  for (const auto& s : scores) {
    const std::string key{to_string(s.category)};
    auto& summary = by_category[key];
    summary.category = s.category;
    summary.total++;
    summary.count[static_cast<int>(s.level)]++;
    norm_sum[key] += s.fc_norm;
  }
  std::vector<CategorySummary> out;
  for (auto& [key, summary] : by_category) {
    for (int i = 0; i < 3; ++i) {
      summary.pct[i] =
          round_decimals(100.0 * static_cast<double>(summary.count[i]) /
                             static_cast<double>(summary.total),
                         1);
    }
    summary.mean_fc_norm = norm_sum[key] / static_cast<double>(summary.total);
    out.push_back(summary);
  }
  return out;
}

CriticalityResult score_facilities(const VisitationNetwork& network,
                                   const std::vector<FacilityRecord>& facilities,
                                   const AdjacencyGraph& adjacency, NormGrouping grouping,
                                   const ClassThresholds& thresholds, WarningLog& warnings,
                                   unsigned jobs) {
  CriticalityResult result;
  // Substitutability per interned origin, shared across facilities.
  const auto& origins = network.origin_ids();
  std::vector<int> subst(origins.size(), 0);
  for (std::size_t i = 0; i < origins.size(); ++i) {
    subst[i] = adjacency.contains(origins[i]) ? adjacency.substitutability(origins[i]) : -1;
  }
  const auto columns = network.facility_columns();

  std::vector<const FacilityRecord*> scored;
  for (const auto& f : facilities) {
    if (network.has_facility(f.facility_id)) {
      scored.push_back(&f);
    } else {
      result.empty_catchment.push_back(f.facility_id);
    }
  }
  std::sort(result.empty_catchment.begin(), result.empty_catchment.end());
  std::sort(scored.begin(), scored.end(),
            [](const FacilityRecord* a, const FacilityRecord* b) {
              return a->facility_id < b->facility_id;
            });

  result.scores.resize(scored.size());
  parallel_for(scored.size(), jobs, [&](std::size_t k) {
    const FacilityRecord& f = *scored[k];
    // has_facility above guarantees the index exists and the column is non-empty.
    const auto& column = columns[*network.facility_index(f.facility_id)];
    double sum = 0.0;
    for (const auto& entry : column) {
      const int s = subst[entry.origin_index];
      if (s < 0) {
        throw ValidationError("catchment zone '" + origins[entry.origin_index] +
                              "' of facility '" + f.facility_id +
                              "' is missing from the zone set");
      }
      sum += static_cast<double>(entry.count) / s;
    }
    CriticalityScore score;
    score.facility_id = f.facility_id;
    score.category = f.category;
    score.fc_raw = sum / static_cast<double>(column.size());
    score.catchment_size = column.size();
    result.scores[k] = std::move(score);
  });

  if (!result.scores.empty()) {
    normalize_scores(result.scores, grouping, warnings);
    for (auto& s : result.scores) s.level = classify_level(s.fc_norm, thresholds);
  }
  if (!result.empty_catchment.empty()) {
    for (const auto& id : result.empty_catchment) {
      warnings.add("empty_catchment", "facility '" + id + "' has no recorded visits");
    }
  }
  return result;
}

}  // namespace llc
