#include "llc/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace llc {

GridRaster combine_perils(const std::vector<const GridRaster*>& layers,
                          const std::vector<std::string>& labels) {
  if (layers.empty()) throw ValidationError("no layers to combine");
  const GridRaster& reference = *layers[0];
  for (std::size_t i = 1; i < layers.size(); ++i) {
    if (!layers[i]->same_geometry(reference)) {
      const std::string a = labels.size() > 0 ? labels[0] : "layer 0";
      const std::string b = labels.size() > i ? labels[i] : "layer " + std::to_string(i);
      throw ValidationError("grid geometry mismatch between " + a + " and " + b);
    }
  }
  GridRaster out;
  out.ncols = reference.ncols;
  out.nrows = reference.nrows;
  out.xllcorner = reference.xllcorner;
  out.yllcorner = reference.yllcorner;
  out.cellsize = reference.cellsize;
  out.nodata = reference.nodata;
  out.values.resize(reference.values.size());
  const std::size_t n = reference.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    float best = out.nodata;
    bool any = false;
    for (const GridRaster* layer : layers) {
      const float v = layer->values[i];
      if (layer->is_nodata(v)) continue;
      if (!any || v > best) best = v;
      any = true;
    }
    out.values[i] = any ? best : out.nodata;
  }
  return out;
}

DepthSample facility_mean_depth(const GridRaster& raster, PlanarPoint facility,
                                double buffer_m, WarningLog* warnings,
                                const std::string& context) {
  const std::vector<double> cells = sample_buffer_cells(raster, facility, buffer_m);
  if (cells.empty() && warnings) {
    warnings->add("buffer_no_coverage",
                  (context.empty() ? std::string("facility") : context) +
                      ": buffer sampled no raster cells");
  }
  double sum = 0.0;
  std::size_t positive = 0;
  for (double v : cells) {
    if (v > 0.0) {
      sum += v;
      positive++;
    }
  }
  DepthSample sample;
  sample.cells = cells.size();
  if (positive > 0) {
    sample.depth_ft = sum / static_cast<double>(positive);
    sample.flooded = true;
  }
  return sample;
}

double aep_weighted_exposure(const std::map<double, double>& depths,
                             const std::map<double, double>& weights) {
  for (const auto& [aep, w] : weights) {
    if (!(w > 0.0)) {
      throw ValidationError("non-positive weight " + format_sig6(w) + " for aep " +
                            format_sig6(aep));
    }
    if (!depths.count(aep)) {
      throw ValidationError("missing depth for return period with aep " + format_sig6(aep));
    }
  }
  // Ascending-AEP accumulation: smallest products first.
  double fe = 0.0;
  for (const auto& [aep, depth] : depths) {
    auto it = weights.find(aep);
    if (it == weights.end()) {
      throw ValidationError("depth present for aep " + format_sig6(aep) + " without a weight");
    }
    fe += depth * it->second;
  }
  return fe;
}

std::vector<DeltaCohortStats> delta_exposure(
    std::vector<FacilityExposure>& exposures,
    const std::map<std::string, FacilityCategory>& category_of) {
  std::map<std::string, std::vector<double>> deltas_by_category;
  for (auto& e : exposures) {
    auto y2020 = e.fe.find(2020);
    auto y2060 = e.fe.find(2060);
    if (y2020 == e.fe.end() || y2060 == e.fe.end()) {
      throw ValidationError("facility '" + e.facility_id +
                            "' is missing exposure for one of the scenario years");
    }
    e.delta = y2060->second - y2020->second;
    auto cat = category_of.find(e.facility_id);
    if (cat != category_of.end()) {
      deltas_by_category[std::string(to_string(cat->second))].push_back(e.delta);
    }
  }
  std::vector<DeltaCohortStats> stats;
  for (auto& [name, deltas] : deltas_by_category) {
    DeltaCohortStats s;
    s.category = *parse_category(name);
    s.count = deltas.size();
    std::size_t positive = 0;
    for (double d : deltas) {
      if (d > 0.0) positive++;
    }
    s.share_positive = static_cast<double>(positive) / static_cast<double>(deltas.size());
    std::sort(deltas.begin(), deltas.end());
    const std::size_t n = deltas.size();
    s.median_delta = n % 2 ? deltas[n / 2] : 0.5 * (deltas[n / 2 - 1] + deltas[n / 2]);
    stats.push_back(s);
  }
  return stats;
}

std::vector<ExposureSummaryRow> exposure_summary(const std::vector<FacilityExposure>& exposures) {
  std::set<std::pair<int, double>> keys;
  for (const auto& e : exposures) {
    for (const auto& [key, sample] : e.depths) keys.insert(key);
  }
  std::vector<ExposureSummaryRow> rows;
  for (const auto& [year, aep] : keys) {
    ExposureSummaryRow row;
    row.year = year;
    row.aep = aep;
    double sum = 0.0;
    std::size_t flooded = 0, total = 0;
    for (const auto& e : exposures) {
      auto it = e.depths.find({year, aep});
      if (it == e.depths.end()) continue;
      total++;
      const double d = it->second.depth_ft;
      sum += d;
      row.max_depth_ft = std::max(row.max_depth_ft, d);
      if (d > 0.0) flooded++;
    }
    if (total == 0) continue;
    row.mean_depth_ft = sum / static_cast<double>(total);
    row.pct_flooded = 100.0 * static_cast<double>(flooded) / static_cast<double>(total);
    rows.push_back(row);
  }
  // Years ascending, then most-frequent return period (largest aep) first.
  std::sort(rows.begin(), rows.end(), [](const ExposureSummaryRow& a, const ExposureSummaryRow& b) {
    if (a.year != b.year) return a.year < b.year;
    return a.aep > b.aep;
  });
  return rows;
}

}  // namespace llc
