#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llc/common.hpp"
#include "llc/geometry.hpp"
#include "llc/ingest.hpp"

namespace llc {

// Buffered mean depth over the positive cells only; a facility with no
// positive cell in its buffer is "not flooded". cells counts every sampled
// (non-nodata) cell, so 0 means the buffer found no raster coverage.
struct DepthSample {
  double depth_ft = 0.0;
  bool flooded = false;
  std::size_t cells = 0;
};

struct FacilityExposure {
  std::string facility_id;
  // (year, aep) -> buffered mean depth
  std::map<std::pair<int, double>, DepthSample> depths;
  std::map<int, double> fe;  // year -> AEP-weighted exposure
  double delta = 0.0;        // fe[2060] - fe[2020]

  std::map<double, double> depths_for_year(int year) const {
    std::map<double, double> out;
    for (const auto& [key, sample] : depths) {
      if (key.first == year) out[key.second] = sample.depth_ft;
    }
    return out;
  }
};

// Per-cell maximum across perils; a cell is nodata only when nodata in every
// input. labels name the layers in mismatch errors.
GridRaster combine_perils(const std::vector<const GridRaster*>& layers,
                          const std::vector<std::string>& labels);

// Mean over sampled cells with value > 0. Warns (code "buffer_no_coverage")
// when the buffer contains no sampled cell at all.
DepthSample facility_mean_depth(const GridRaster& raster, PlanarPoint facility,
                                double buffer_m, WarningLog* warnings = nullptr,
                                const std::string& context = "");

// Exact weighted sum over ascending AEP. The depth and weight key sets must
// coincide: a depth without a weight or a weight without a depth is an error.
double aep_weighted_exposure(const std::map<double, double>& depths,
                             const std::map<double, double>& weights);

struct DeltaCohortStats {
  FacilityCategory category = FacilityCategory::grocery;
  std::size_t count = 0;
  double share_positive = 0.0;  // fraction of facilities with delta > 0
  double median_delta = 0.0;
};

// Fills fe deltas in place and returns per-category cohort statistics.
// category_of maps facility_id -> category.
std::vector<DeltaCohortStats> delta_exposure(
    std::vector<FacilityExposure>& exposures,
    const std::map<std::string, FacilityCategory>& category_of);

struct ExposureSummaryRow {
  int year = 0;
  double aep = 0.0;
  double max_depth_ft = 0.0;
  double mean_depth_ft = 0.0;  // over all facilities, dry ones included
  double pct_flooded = 0.0;    // share of facilities with depth > 0, in percent
};

// One row per (year, aep) present in the samples; years ascending, aep
// descending (most frequent return period first).
std::vector<ExposureSummaryRow> exposure_summary(const std::vector<FacilityExposure>& exposures);

}  // namespace llc
