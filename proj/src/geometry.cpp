#include "llc/geometry.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace llc {

double ring_signed_area(const Ring& ring) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    acc += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  }
  return 0.5 * acc;
}

double ZoneGeometry::area() const {
  double total = 0.0;
  for (const auto& part : parts) {
    for (std::size_t r = 0; r < part.rings.size(); ++r) {
      double a = std::abs(ring_signed_area(part.rings[r]));
      total += (r == 0) ? a : -a;
    }
  }
  return total;
}

Bounds ZoneGeometry::bounds() const {
  Bounds b{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
           std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& part : parts) {
    for (const auto& ring : part.rings) {
      for (auto p : ring) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
      }
    }
  }
  return b;
}

int AdjacencyGraph::substitutability(const std::string& zone_id) const {
  auto it = neighbors.find(zone_id);
  if (it == neighbors.end()) return 1;
  return std::max<std::size_t>(1, it->second.size());
}

namespace {

struct Segment {
  PlanarPoint a, b;
  std::uint32_t zone;
};

// Shared boundary test: both endpoints of one segment lie on the other's
// supporting line (within tol) and the projected intervals overlap by more
// than tol.
bool segments_share_length(const Segment& s, const Segment& t, double tol) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double len = std::hypot(dx, dy);
  if (len <= tol) return false;

  auto line_dist = [&](PlanarPoint p) {
    return std::abs(dx * (p.y - s.a.y) - dy * (p.x - s.a.x)) / len;
  };
  if (line_dist(t.a) > tol || line_dist(t.b) > tol) return false;

  auto project = [&](PlanarPoint p) {
    return (dx * (p.x - s.a.x) + dy * (p.y - s.a.y)) / len;
  };
  double u1 = project(t.a);
  double u2 = project(t.b);
  if (u1 > u2) std::swap(u1, u2);
  const double lo = std::max(0.0, u1);
  const double hi = std::min(len, u2);
  return hi - lo > tol;
}

struct CellKey {
  std::int64_t key;
  bool operator==(const CellKey& o) const { return key == o.key; }
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    return std::hash<std::int64_t>()(k.key);
  }
};

CellKey make_cell(double x, double y, double cell) {
  auto gx = static_cast<std::int64_t>(std::floor(x / cell));
  auto gy = static_cast<std::int64_t>(std::floor(y / cell));
  return CellKey{(gx << 32) ^ (gy & 0xffffffffll)};
}

}  // namespace

AdjacencyGraph build_contiguity_graph(const std::vector<ZoneGeometry>& zones) {
  const double tol = kContiguityToleranceMeters;

  std::unordered_set<std::string> seen;
  for (const auto& z : zones) {
    if (!seen.insert(z.zone_id).second) {
      throw ValidationError("duplicate zone_id '" + z.zone_id + "'");
    }
    if (z.area() < 1e-12) {
      throw ValidationError("degenerate polygon (area 0) for zone '" + z.zone_id + "'");
    }
  }

  std::vector<Segment> segments;
  double length_sum = 0.0;
  for (std::uint32_t zi = 0; zi < zones.size(); ++zi) {
    for (const auto& part : zones[zi].parts) {
      for (const auto& ring : part.rings) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
          double len = std::hypot(ring[i + 1].x - ring[i].x, ring[i + 1].y - ring[i].y);
          if (len <= tol) continue;
          segments.push_back({ring[i], ring[i + 1], zi});
          length_sum += len;
        }
      }
    }
  }

  AdjacencyGraph graph;
  for (const auto& z : zones) graph.neighbors[z.zone_id];

  if (!segments.empty()) {
    const double cell = std::max(tol * 4, length_sum / segments.size());
    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> grid;
    for (std::uint32_t si = 0; si < segments.size(); ++si) {
      const auto& s = segments[si];
      const double min_x = std::min(s.a.x, s.b.x) - tol;
      const double max_x = std::max(s.a.x, s.b.x) + tol;
      const double min_y = std::min(s.a.y, s.b.y) - tol;
      const double max_y = std::max(s.a.y, s.b.y) + tol;
      for (double gx = std::floor(min_x / cell); gx <= std::floor(max_x / cell); ++gx) {
        for (double gy = std::floor(min_y / cell); gy <= std::floor(max_y / cell); ++gy) {
          grid[make_cell(gx * cell + cell / 2, gy * cell + cell / 2, cell)].push_back(si);
        }
      }
    }

    std::unordered_set<std::uint64_t> tested;
    for (const auto& [key, bucket] : grid) {
      for (std::size_t i = 0; i < bucket.size(); ++i) {
        for (std::size_t j = i + 1; j < bucket.size(); ++j) {
          const auto& s = segments[bucket[i]];
          const auto& t = segments[bucket[j]];
          if (s.zone == t.zone) continue;
          std::uint64_t pair_key =
              (std::uint64_t(std::min(bucket[i], bucket[j])) << 32) |
              std::max(bucket[i], bucket[j]);
          if (!tested.insert(pair_key).second) continue;
          if (segments_share_length(s, t, tol) || segments_share_length(t, s, tol)) {
            graph.neighbors[zones[s.zone].zone_id].insert(zones[t.zone].zone_id);
            graph.neighbors[zones[t.zone].zone_id].insert(zones[s.zone].zone_id);
          }
        }
      }
    }
  }
  return graph;
}

namespace {

constexpr double kBoundaryTolerance = 1e-9;

bool point_on_segment(PlanarPoint p, PlanarPoint a, PlanarPoint b, double tol) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) {
    return std::hypot(p.x - a.x, p.y - a.y) <= tol;
  }
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const double cx = a.x + t * dx;
  const double cy = a.y + t * dy;
  return std::hypot(p.x - cx, p.y - cy) <= tol;
}

}  // namespace

PointLocation locate_point_in_part(const PolygonShape& part, PlanarPoint p) {
  bool inside = false;
  for (const auto& ring : part.rings) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      if (point_on_segment(p, ring[i], ring[i + 1], kBoundaryTolerance)) {
        return PointLocation::boundary;
      }
      const PlanarPoint a = ring[i];
      const PlanarPoint b = ring[i + 1];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (x_at > p.x) inside = !inside;
      }
    }
  }
  return inside ? PointLocation::interior : PointLocation::outside;
}

bool zone_contains(const ZoneGeometry& zone, PlanarPoint p) {
  for (const auto& part : zone.parts) {
    if (locate_point_in_part(part, p) != PointLocation::outside) return true;
  }
  return false;
}

ZoneIndex::ZoneIndex(const std::vector<ZoneGeometry>& zones) {
  zones_.reserve(zones.size());
  bounds_.reserve(zones.size());
  for (const auto& z : zones) {
    zones_.push_back(&z);
    bounds_.push_back(z.bounds());
  }
  if (zones_.empty()) {
    grid_cols_ = grid_rows_ = 1;
    cells_.resize(1);
    return;
  }
  extent_ = bounds_[0];
  double area_sum = 0.0;
  for (const auto& b : bounds_) {
    extent_.min_x = std::min(extent_.min_x, b.min_x);
    extent_.min_y = std::min(extent_.min_y, b.min_y);
    extent_.max_x = std::max(extent_.max_x, b.max_x);
    extent_.max_y = std::max(extent_.max_y, b.max_y);
    area_sum += (b.max_x - b.min_x) * (b.max_y - b.min_y);
  }
  cell_size_ = std::max(1e-9, std::sqrt(area_sum / static_cast<double>(zones_.size())));
  grid_cols_ = std::max(1, static_cast<int>((extent_.max_x - extent_.min_x) / cell_size_) + 1);
  grid_rows_ = std::max(1, static_cast<int>((extent_.max_y - extent_.min_y) / cell_size_) + 1);
  cells_.resize(static_cast<std::size_t>(grid_cols_) * grid_rows_);
  for (std::uint32_t zi = 0; zi < zones_.size(); ++zi) {
    const auto& b = bounds_[zi];
    const int cx0 = static_cast<int>((b.min_x - extent_.min_x) / cell_size_);
    const int cx1 = static_cast<int>((b.max_x - extent_.min_x) / cell_size_);
    const int cy0 = static_cast<int>((b.min_y - extent_.min_y) / cell_size_);
    const int cy1 = static_cast<int>((b.max_y - extent_.min_y) / cell_size_);
    for (int cy = cy0; cy <= cy1; ++cy) {
      for (int cx = cx0; cx <= cx1; ++cx) {
        if (cx < 0 || cy < 0 || cx >= grid_cols_ || cy >= grid_rows_) continue;
        cells_[cell_index(cx, cy)].push_back(zi);
      }
    }
  }
}

std::optional<std::string> ZoneIndex::locate(PlanarPoint p, WarningLog* warnings) const {
  if (zones_.empty() || !finite_point(p) || !extent_.contains(p)) return std::nullopt;
  const int cx = std::clamp(static_cast<int>((p.x - extent_.min_x) / cell_size_), 0, grid_cols_ - 1);
  const int cy = std::clamp(static_cast<int>((p.y - extent_.min_y) / cell_size_), 0, grid_rows_ - 1);

  const std::string* best = nullptr;
  int hits = 0;
  for (std::uint32_t zi : cells_[cell_index(cx, cy)]) {
    if (!bounds_[zi].contains(p)) continue;
    if (zone_contains(*zones_[zi], p)) {
      ++hits;
      if (!best || zones_[zi]->zone_id < *best) best = &zones_[zi]->zone_id;
    }
  }
  if (!best) return std::nullopt;
  if (hits > 1 && warnings) {
    warnings->add("overlapping_zones", "point (" + format_sig6(p.x) + ", " + format_sig6(p.y) +
                                           ") contained by " + std::to_string(hits) +
                                           " zones; picked '" + *best + "'");
  }
  return *best;
}

std::optional<std::string> locate_zone(PlanarPoint p, const std::vector<ZoneGeometry>& zones,
                                       WarningLog* warnings) {
  ZoneIndex index(zones);
  return index.locate(p, warnings);
}

std::vector<double> sample_buffer_cells(const GridRaster& raster, PlanarPoint center,
                                        double radius_m) {
  std::vector<double> out;
  if (raster.ncols <= 0 || raster.nrows <= 0 || raster.cellsize <= 0 || radius_m <= 0) {
    return out;
  }
  // Candidate columns whose centers fall in [center.x - r, center.x + r].
  auto col_of = [&](double x) { return (x - raster.xllcorner) / raster.cellsize - 0.5; };
  int col_lo = static_cast<int>(std::ceil(col_of(center.x - radius_m) - 1e-12));
  int col_hi = static_cast<int>(std::floor(col_of(center.x + radius_m) + 1e-12));
  col_lo = std::max(col_lo, 0);
  col_hi = std::min(col_hi, raster.ncols - 1);
  if (col_lo > col_hi) return out;

  // Row 0 is the northernmost row; convert the y window to row indices.
  auto row_of = [&](double y) { return raster.nrows - 0.5 - (y - raster.yllcorner) / raster.cellsize; };
  int row_lo = static_cast<int>(std::ceil(row_of(center.y + radius_m) - 1e-12));
  int row_hi = static_cast<int>(std::floor(row_of(center.y - radius_m) + 1e-12));
  row_lo = std::max(row_lo, 0);
  row_hi = std::min(row_hi, raster.nrows - 1);

  const double r2 = radius_m * radius_m;
  for (int row = row_lo; row <= row_hi; ++row) {
    const double dy = raster.cell_center_y(row) - center.y;
    for (int col = col_lo; col <= col_hi; ++col) {
      const double dx = raster.cell_center_x(col) - center.x;
      if (dx * dx + dy * dy > r2) continue;
      const float v = raster.at(row, col);
      if (!raster.is_nodata(v)) out.push_back(static_cast<double>(v));
    }
  }
  return out;
}

}  // namespace llc
