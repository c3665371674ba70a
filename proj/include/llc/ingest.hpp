#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llc/csv.hpp"
#include "llc/geometry.hpp"
#include "llc/visitation.hpp"

namespace llc {

enum class FacilityCategory { hospital, grocery };

std::string_view to_string(FacilityCategory category);
std::optional<FacilityCategory> parse_category(std::string_view s);

struct FacilityRecord {
  std::string facility_id;
  FacilityCategory category = FacilityCategory::grocery;
  PlanarPoint location;
  std::string naics;  // optional
};

enum class Peril { pluvial, fluvial, coastal, combined };

std::string_view to_string(Peril peril);
std::optional<Peril> parse_peril(std::string_view s);

// One hazard layer in the raster catalog.
struct RasterManifestEntry {
  int year = 0;  // 2020 or 2060
  Peril peril = Peril::pluvial;
  double aep = 0.0;
  std::filesystem::path path;  // resolved against the manifest's directory
};

inline constexpr double kStandardAeps[5] = {0.20, 0.10, 0.04, 0.01, 0.002};
inline constexpr int kScenarioYears[2] = {2020, 2060};

struct CrosswalkTable {
  std::map<std::string, std::string> zone_to_zcta;

  std::optional<std::string> zcta_for(const std::string& zone_id) const {
    auto it = zone_to_zcta.find(zone_id);
    if (it == zone_to_zcta.end()) return std::nullopt;
    return it->second;
  }
};

// GeoJSON FeatureCollection of Polygon/MultiPolygon features carrying
// properties.zone_id, coordinates in planar meters.
std::vector<ZoneGeometry> load_zones(const std::filesystem::path& path, WarningLog& warnings);

// CSV facility_id,category,x,y[,naics]
std::vector<FacilityRecord> load_facilities(const std::filesystem::path& path,
                                            WarningLog& warnings);

struct PingRecord {
  std::string device_id;
  double timestamp_utc = 0.0;  // seconds since the Unix epoch
  PlanarPoint location;
};

// Streaming reader over CSV device_id,timestamp,x,y; one row buffered at a
// time. Timestamps are ISO 8601 with a zone designator, converted to UTC.
class PingReader {
public:
  explicit PingReader(const std::filesystem::path& path);
  bool next(PingRecord& record);
  std::uint64_t rows_read() const { return reader_.rows_read(); }
  std::size_t max_buffered_bytes() const { return reader_.max_buffered_bytes(); }

private:
  CsvReader reader_;
  std::vector<std::string_view> fields_;
};

// Parses an ISO 8601 timestamp with zone designator to UTC epoch seconds.
std::optional<double> parse_iso8601_utc(std::string_view s);

// CSV origin_zone_id,facility_id,visits. Duplicate pairs summed, zero-visit
// rows dropped, negative visits rejected.
VisitationNetwork load_od(const std::filesystem::path& path, WarningLog& warnings);
void write_od(const VisitationNetwork& network, const std::filesystem::path& path);

// Esri ASCII grid with the six standard header keys.
GridRaster load_raster(const std::filesystem::path& path);
void write_raster(const GridRaster& raster, const std::filesystem::path& path);

// CSV year,peril,aep,path. AEPs restricted to the standard five unless
// allow_custom_aep is set. Relative paths resolve against the manifest file.
std::vector<RasterManifestEntry> load_manifest(const std::filesystem::path& path,
                                               bool allow_custom_aep, WarningLog& warnings);

// CSV zone_id,zcta_id
CrosswalkTable load_crosswalk(const std::filesystem::path& path, WarningLog& warnings);

// Interchange format for stage entry: zone_id,substitutability,neighbor_ids
// with neighbor ids ';'-joined.
void write_adjacency(const AdjacencyGraph& graph, const std::filesystem::path& path);
AdjacencyGraph load_adjacency(const std::filesystem::path& path);

}  // namespace llc
