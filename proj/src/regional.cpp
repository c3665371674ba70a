#include "llc/regional.hpp"

#include <algorithm>
#include <cmath>

namespace llc {

ZctaVisitTable zcta_visits(const VisitationNetwork& network, const CrosswalkTable& crosswalk,
                           WarningLog& warnings) {
  ZctaVisitTable table;
  for (const auto& row : network.sorted_rows()) {
    const std::string origin(row.origin_zone_id);
    auto zcta = crosswalk.zcta_for(origin);
    if (!zcta) {
      warnings.add("unmapped_origin_zone",
                   "zone '" + origin + "' is not in the crosswalk; its visits are excluded");
      continue;
    }
    table.visits[*zcta][std::string(row.facility_id)] += row.count;
  }
  return table;
}

std::optional<RegionalIndex> vwme_index(
    const std::string& zcta_id, int year,
    const std::map<std::string, std::uint64_t>& facility_weights,
    const std::map<std::string, double>& fc_of, const std::map<std::string, double>& fe_of) {
  double numerator = 0.0;
  std::uint64_t weight_total = 0;
  std::uint64_t contributing = 0;
  for (const auto& [facility, weight] : facility_weights) {
    if (weight == 0) continue;
    auto fc = fc_of.find(facility);
    if (fc == fc_of.end()) {
      throw ValidationError("facility '" + facility + "' has visits from ZCTA '" + zcta_id +
                            "' but no criticality score");
    }
    auto fe = fe_of.find(facility);
    if (fe == fe_of.end()) {
      throw ValidationError("facility '" + facility + "' has visits from ZCTA '" + zcta_id +
                            "' but no exposure for year " + std::to_string(year));
    }
    numerator += fc->second * fe->second * static_cast<double>(weight);
    weight_total += weight;
    contributing++;
  }
  if (weight_total == 0) return std::nullopt;
  RegionalIndex index;
  index.zcta_id = zcta_id;
  index.year = year;
  index.vwme = numerator / static_cast<double>(weight_total);
  index.visit_weight_total = weight_total;
  index.facility_count = contributing;
  return index;
}

std::vector<RegionalIndex> compute_regional_indices(
    const ZctaVisitTable& table, const std::vector<CriticalityScore>& scores,
    const std::vector<FacilityExposure>& exposures, const RegionalOptions& options,
    const std::map<std::string, std::string>& facility_zcta) {
  std::map<std::string, double> fc_of;
  for (const auto& s : scores) {
    fc_of[s.facility_id] = options.use_fc_raw ? s.fc_raw : s.fc_norm;
  }
  std::map<int, std::map<std::string, double>> fe_by_year;
  for (const auto& e : exposures) {
    for (const auto& [year, fe] : e.fe) fe_by_year[year][e.facility_id] = fe;
  }

  std::vector<RegionalIndex> indices;
  for (const auto& [zcta, weights] : table.visits) {
    std::map<std::string, std::uint64_t> effective;
    if (options.membership == VwmeMembership::behavioral) {
      effective = weights;
    } else {
      for (const auto& [facility, weight] : weights) {
        auto home = facility_zcta.find(facility);
        if (home != facility_zcta.end() && home->second == zcta) effective[facility] = weight;
      }
    }
    for (const auto& [year, fe_of] : fe_by_year) {
      auto index = vwme_index(zcta, year, effective, fc_of, fe_of);
      if (index) indices.push_back(std::move(*index));
    }
  }
  std::sort(indices.begin(), indices.end(), [](const RegionalIndex& a, const RegionalIndex& b) {
    if (a.zcta_id != b.zcta_id) return a.zcta_id < b.zcta_id;
    return a.year < b.year;
  });
  return indices;
}

RegionalSummary regional_summary(const std::vector<RegionalIndex>& indices) {
  if (indices.empty()) throw ValidationError("no regional indices to summarize");
  std::vector<double> v2020, v2060;
  for (const auto& index : indices) {
    if (index.year == 2020) v2020.push_back(index.vwme);
    if (index.year == 2060) v2060.push_back(index.vwme);
  }
  if (v2020.empty() || v2060.empty()) {
    throw ValidationError("regional summary needs indices for both scenario years");
  }
  auto mean = [](const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  };
  RegionalSummary summary;
  summary.zcta_count = v2020.size();
  summary.mean_2020 = mean(v2020);
  summary.mean_2060 = mean(v2060);
  summary.delta_mean = summary.mean_2060 - summary.mean_2020;
  if (summary.mean_2020 != 0.0) {
    summary.pct_change_mean = summary.delta_mean / summary.mean_2020 * 100.0;
  }
  for (double v : v2020) {
    if (v > summary.mean_2020) summary.above_mean_2020++;
  }
  for (double v : v2060) {
    if (v > summary.mean_2060) summary.above_mean_2060++;
  }
  summary.delta_above = static_cast<std::int64_t>(summary.above_mean_2060) -
                        static_cast<std::int64_t>(summary.above_mean_2020);
  if (summary.above_mean_2020 > 0) {
    summary.pct_change_above = static_cast<double>(summary.delta_above) /
                               static_cast<double>(summary.above_mean_2020) * 100.0;
  }
  return summary;
}

}  // namespace llc
