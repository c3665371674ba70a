#pragma once

#include <optional>
#include <string>
#include <vector>

#include "llc/common.hpp"
#include "llc/criticality.hpp"
#include "llc/synth.hpp"

namespace llc {

inline constexpr const char* kToolVersion = "0.1.0";

// Resolved run configuration: command line beats config file beats defaults.
struct RunConfig {
  std::string subcommand;

  // Input paths, empty when not given.
  std::string zones_path;
  std::string facilities_path;
  std::string pings_path;
  std::string od_path;
  std::string adjacency_path;
  std::string manifest_path;
  std::string crosswalk_path;
  std::string scores_path;
  std::string fe_path;
  std::string out_dir = "out";

  // Tunables.
  double min_dwell_hours = 24.0;
  double gap_cap_hours = 6.0;
  double visit_radius_m = 50.0;
  double min_visit_dwell_min = 5.0;
  double buffer_m = 100.0;
  std::string norm = "per-category";  // or "global"
  std::string thresholds = "0.30,0.50";
  double aep_scale = 1.0;
  bool allow_custom_aep = false;
  bool containment = false;
  bool fc_raw = false;
  unsigned jobs = 0;  // 0 = resolve to available parallelism

  SynthParams synth;

  // Derived at validation time.
  ClassThresholds class_thresholds;
  NormGrouping grouping = NormGrouping::per_category;
  unsigned effective_jobs = 1;
};

// Parses argv (applying an optional --config file). Throws UsageError on bad
// usage; returns nullopt when help was requested and printed.
std::optional<RunConfig> parse_config(int argc, const char* const* argv);

// Validates cross-field constraints and fills the derived fields.
void finalize_config(RunConfig& cfg);

}  // namespace llc
