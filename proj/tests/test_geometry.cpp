#include <doctest.h>

#include <cmath>
#include <random>

#include "llc/geometry.hpp"

using namespace llc;

namespace {

ZoneGeometry square(const std::string& id, double x, double y, double size) {
  ZoneGeometry z;
  z.zone_id = id;
  Ring ring = {{x, y}, {x + size, y}, {x + size, y + size}, {x, y + size}, {x, y}};
  z.parts.push_back(PolygonShape{{ring}});
  return z;
}

}  // namespace

TEST_CASE("signed area is positive for counterclockwise rings") {
  Ring ccw = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  CHECK(ring_signed_area(ccw) == 1.0);
  Ring cw(ccw.rbegin(), ccw.rend());
  CHECK(ring_signed_area(cw) == -1.0);
}

TEST_CASE("zone area subtracts holes and sums parts") {
  ZoneGeometry z = square("Z", 0, 0, 10);
  Ring hole = {{2, 2}, {2, 4}, {4, 4}, {4, 2}, {2, 2}};  // cw hole, area 4
  z.parts[0].rings.push_back(hole);
  z.parts.push_back(square("ignored", 20, 20, 2).parts[0]);
  CHECK(z.area() == doctest::Approx(100.0 - 4.0 + 4.0));
  const Bounds b = z.bounds();
  CHECK(b.min_x == 0.0);
  CHECK(b.max_x == 22.0);
}

TEST_CASE("grid of squares yields rook adjacency without corner contact") {
  // 2x2 arrangement; diagonal pairs touch only at the shared corner.
  std::vector<ZoneGeometry> zones = {square("Z00", 0, 0, 1), square("Z01", 1, 0, 1),
                                     square("Z10", 0, 1, 1), square("Z11", 1, 1, 1)};
  const AdjacencyGraph graph = build_contiguity_graph(zones);
  CHECK(graph.neighbors.at("Z00") == std::set<std::string>{"Z01", "Z10"});
  CHECK(graph.neighbors.at("Z11") == std::set<std::string>{"Z01", "Z10"});
  CHECK(graph.neighbors.at("Z00").count("Z11") == 0);
  CHECK(graph.substitutability("Z00") == 2);
}

TEST_CASE("substitutability floors at one for isolated zones") {
  std::vector<ZoneGeometry> zones = {square("A", 0, 0, 1), square("B", 5, 5, 1)};
  const AdjacencyGraph graph = build_contiguity_graph(zones);
  CHECK(graph.neighbors.at("A").empty());
  CHECK(graph.substitutability("A") == 1);
  CHECK(graph.substitutability("unknown") == 1);
}

TEST_CASE("partial edge overlap counts, sub-tolerance overlap does not") {
  std::vector<ZoneGeometry> partial = {square("A", 0, 0, 1), square("B", 1, 0.5, 1)};
  CHECK(build_contiguity_graph(partial).neighbors.at("A").count("B") == 1);

  // Overlapping segment of length 5e-7 along x=1, below the 1e-6 tolerance.
  std::vector<ZoneGeometry> tiny = {square("A", 0, 0, 1), square("B", 1, 1 - 5e-7, 1)};
  CHECK(build_contiguity_graph(tiny).neighbors.at("A").count("B") == 0);
}

TEST_CASE("zone containment honors holes and includes boundaries") {
  ZoneGeometry z = square("Z", 0, 0, 10);
  Ring hole = {{2, 2}, {2, 4}, {4, 4}, {4, 2}, {2, 2}};
  z.parts[0].rings.push_back(hole);
  CHECK(zone_contains(z, {1, 1}));
  CHECK_FALSE(zone_contains(z, {3, 3}));  // inside the hole
  CHECK(zone_contains(z, {0, 5}));        // outer boundary
  CHECK_FALSE(zone_contains(z, {11, 5}));
}

TEST_CASE("zone index locates points and resolves overlap deterministically") {
  std::vector<ZoneGeometry> zones = {square("ZB", 0, 0, 2), square("ZA", 0, 0, 2),
                                     square("ZC", 10, 10, 2)};
  const ZoneIndex index(zones);
  CHECK(index.zone_count() == 3);
  WarningLog log;
  auto hit = index.locate({1, 1}, &log);
  REQUIRE(hit);
  CHECK(*hit == "ZA");  // lexicographically smallest of the overlapping pair
  CHECK(log.count("overlapping_zones") == 1);
  CHECK(index.locate({11, 11}) == std::optional<std::string>("ZC"));
  CHECK_FALSE(index.locate({100, 100}));
}

TEST_CASE("raster rows run north to south") {
  GridRaster r;
  r.ncols = 3;
  r.nrows = 2;
  r.xllcorner = 0;
  r.yllcorner = 0;
  r.cellsize = 10;
  r.values = {1, 2, 3, 4, 5, 6};
  CHECK(r.at(0, 0) == 1.0f);
  CHECK(r.at(1, 2) == 6.0f);
  CHECK(r.cell_center_x(0) == 5.0);
  CHECK(r.cell_center_y(0) == 15.0);  // top row sits at the high-y edge
  CHECK(r.cell_center_y(1) == 5.0);
  CHECK(r.is_nodata(-9999.0f));
}

TEST_CASE("buffer sampling selects cell centers within the radius inclusively") {
  GridRaster r;
  r.ncols = 3;
  r.nrows = 3;
  r.xllcorner = 0;
  r.yllcorner = 0;
  r.cellsize = 10;
  r.values = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  const PlanarPoint center{15, 15};

  auto cells = sample_buffer_cells(r, center, 10.0);
  CHECK(cells.size() == 5);  // center plus the four rook neighbors at exactly 10 m
  cells = sample_buffer_cells(r, center, 9.999);
  CHECK(cells.size() == 1);
  cells = sample_buffer_cells(r, center, 14.15);
  CHECK(cells.size() == 9);  // corners at ~14.142 m now included
  cells = sample_buffer_cells(r, {1000, 1000}, 10.0);
  CHECK(cells.empty());

  r.values[4] = r.nodata;
  cells = sample_buffer_cells(r, center, 10.0);
  CHECK(cells.size() == 4);  // nodata center dropped
}

TEST_CASE("buffer sampling matches exhaustive enumeration on random rasters") {
  std::mt19937_64 rng(2024);
  auto real = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
  };
  for (int trial = 0; trial < 50; ++trial) {
    GridRaster r;
    r.ncols = 1 + static_cast<int>(rng() % 30);
    r.nrows = 1 + static_cast<int>(rng() % 30);
    r.xllcorner = real(-500, 500);
    r.yllcorner = real(-500, 500);
    r.cellsize = real(0.5, 30);
    r.values.resize(static_cast<std::size_t>(r.ncols) * r.nrows);
    for (auto& v : r.values) {
      const int kind = static_cast<int>(rng() % 4);
      v = kind == 0 ? r.nodata : (kind == 1 ? 0.0f : static_cast<float>(real(0, 12)));
    }
    const PlanarPoint p{real(r.xllcorner - 50, r.xllcorner + r.ncols * r.cellsize + 50),
                        real(r.yllcorner - 50, r.yllcorner + r.nrows * r.cellsize + 50)};
    const double radius = real(0.5, 120);

    std::vector<double> expected;
    for (int row = 0; row < r.nrows; ++row) {
      for (int col = 0; col < r.ncols; ++col) {
        const double dx = r.cell_center_x(col) - p.x;
        const double dy = r.cell_center_y(row) - p.y;
        if (dx * dx + dy * dy > radius * radius) continue;
        if (r.is_nodata(r.at(row, col))) continue;
        expected.push_back(r.at(row, col));
      }
    }
    CHECK(sample_buffer_cells(r, p, radius) == expected);
  }
}
