#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "llc/config.hpp"
#include "llc/criticality.hpp"
#include "llc/hazard.hpp"
#include "llc/ingest.hpp"
#include "llc/regional.hpp"

namespace llc {

// Executes the configured subcommand, writing artifacts into cfg.out_dir.
// Throws UsageError/FileError for bad invocations or unreadable inputs and
// ValidationError/WriteError for bad data or failed emissions.
void run_pipeline(const RunConfig& cfg);

// Readers for this tool's own artifacts, for entering the pipeline midway.
std::vector<CriticalityScore> load_scores_csv(const std::filesystem::path& path);
std::vector<FacilityExposure> load_fe_csv(const std::filesystem::path& path);

// Drops OD rows pointing at facilities absent from the facility table, with
// a counted warning per dropped row.
VisitationNetwork filter_network_to_facilities(const VisitationNetwork& network,
                                               const std::vector<FacilityRecord>& facilities,
                                               WarningLog& warnings);

struct HazardResult {
  std::vector<FacilityExposure> exposures;  // sorted by facility_id
  std::vector<DeltaCohortStats> delta_stats;
  std::vector<ExposureSummaryRow> summary_rows;
  std::map<int, std::map<double, double>> weights_by_year;
};

// Streams raster groups one (year, aep) at a time: load perils, combine,
// sample every facility, release. Peak raster memory stays bounded by one
// group regardless of manifest size.
HazardResult compute_exposures(const std::vector<FacilityRecord>& facilities,
                               const std::vector<RasterManifestEntry>& manifest,
                               double buffer_m, double aep_scale, WarningLog& warnings,
                               unsigned jobs);

}  // namespace llc
