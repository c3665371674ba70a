#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "llc/common.hpp"

namespace llc {

// Planar metric coordinates (meters east / north). No geodesic math anywhere.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

inline bool finite_point(PlanarPoint p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

// Closed ring: first vertex equals last.
using Ring = std::vector<PlanarPoint>;

// rings[0] is the exterior; any further rings are holes.
struct PolygonShape {
  std::vector<Ring> rings;
};

struct Bounds {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
  bool contains(PlanarPoint p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

struct ZoneGeometry {
  std::string zone_id;
  std::vector<PolygonShape> parts;

  // Unsigned area: exterior rings minus holes, summed over parts.
  double area() const;
  Bounds bounds() const;
};

double ring_signed_area(const Ring& ring);

// Zone contiguity with substitutability floored at 1 for isolated zones.
struct AdjacencyGraph {
  std::map<std::string, std::set<std::string>> neighbors;

  bool contains(const std::string& zone_id) const {
    return neighbors.count(zone_id) != 0;
  }
  int substitutability(const std::string& zone_id) const;
};

// Coordinates closer than this are treated as coincident when testing
// boundary sharing.
inline constexpr double kContiguityToleranceMeters = 1e-6;

// Rook-style contiguity: two zones are neighbors iff their boundaries share
// a collinear segment of positive length. Corner-only contact does not count.
AdjacencyGraph build_contiguity_graph(const std::vector<ZoneGeometry>& zones);

enum class PointLocation { outside, boundary, interior };

// Even-odd containment over all rings of one polygon part; boundary detected
// within a small absolute tolerance.
PointLocation locate_point_in_part(const PolygonShape& part, PlanarPoint p);

// Boundary counts as inside.
bool zone_contains(const ZoneGeometry& zone, PlanarPoint p);

// Grid-bucketed point->zone lookup for repeated queries. Holds pointers into
// the zone vector passed at construction; the caller keeps it alive.
class ZoneIndex {
public:
  explicit ZoneIndex(const std::vector<ZoneGeometry>& zones);

  // Zone containing p (boundary inclusive); lexicographically smallest
  // zone_id wins on overlap, with a counted warning when a log is supplied.
  std::optional<std::string> locate(PlanarPoint p, WarningLog* warnings = nullptr) const;

  std::size_t zone_count() const { return zones_.size(); }

private:
  std::vector<const ZoneGeometry*> zones_;
  std::vector<Bounds> bounds_;
  Bounds extent_{};
  double cell_size_ = 1.0;
  int grid_cols_ = 0, grid_rows_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;

  std::size_t cell_index(int cx, int cy) const {
    return static_cast<std::size_t>(cy) * grid_cols_ + cx;
  }
};

// One-shot form of the lookup.
std::optional<std::string> locate_zone(PlanarPoint p, const std::vector<ZoneGeometry>& zones,
                                       WarningLog* warnings = nullptr);

// Row-major depth grid in feet; row 0 is the northernmost row.
struct GridRaster {
  int ncols = 0;
  int nrows = 0;
  double xllcorner = 0.0;
  double yllcorner = 0.0;
  double cellsize = 0.0;
  float nodata = -9999.0f;
  std::vector<float> values;

  bool is_nodata(float v) const { return v == nodata; }
  float at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * ncols + col];
  }
  double cell_center_x(int col) const { return xllcorner + (col + 0.5) * cellsize; }
  double cell_center_y(int row) const {
    return yllcorner + (nrows - row - 0.5) * cellsize;
  }
  bool same_geometry(const GridRaster& other) const {
    return ncols == other.ncols && nrows == other.nrows &&
           xllcorner == other.xllcorner && yllcorner == other.yllcorner &&
           cellsize == other.cellsize;
  }
};

// Values of all non-nodata cells whose center lies within Euclidean distance
// <= radius of center. Empty if the buffer misses the raster entirely.
std::vector<double> sample_buffer_cells(const GridRaster& raster, PlanarPoint center,
                                        double radius_m);

}  // namespace llc
