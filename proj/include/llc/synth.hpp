#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "llc/common.hpp"

namespace llc {

// Deterministic synthetic-county generator. One seeded stream drives every
// draw, so a given parameter set always produces byte-identical files.
struct SynthParams {
  std::uint64_t seed = 42;
  int n_zones = 100;
  int n_hospitals = 20;
  int n_groceries = 80;
  int n_devices = 50;
  std::uint64_t visit_total = 10000;  // exact in od mode, a target in pings mode
  double zipf_exponent = 1.5;
  int raster_dim = 200;
  double raster_cellsize = 0.0;  // 0 = size cells so the grid covers the region
  double depth_growth_2060 = 1.3;
  bool pings_mode = false;  // emit pings.csv instead of od.csv
};

// Zone mesh shape: rows is the largest divisor of n_zones not exceeding
// sqrt(n_zones); cols = n_zones / rows. Zones index row-major.
std::pair<int, int> mesh_shape(int n_zones);

// Writes zones.geojson, facilities.csv, crosswalk.csv, od.csv or pings.csv,
// manifest.csv plus its .asc rasters, and ledger.json into out_dir. Returns
// the emitted file names in emission order.
std::vector<std::string> generate_scenario(const SynthParams& params,
                                           const std::filesystem::path& out_dir);

}  // namespace llc
