#include <doctest.h>

#include <random>

#include "llc/ingest.hpp"
#include "support.hpp"

using namespace llc;
using testsupport::ScratchDir;
using testsupport::read_file;
using testsupport::write_file;

TEST_CASE("zone loader reads polygons and multipolygons with holes") {
  ScratchDir dir("zones_ok");
  const auto path = dir / "zones.geojson";
  write_file(path, R"({"type":"FeatureCollection","features":[
    {"type":"Feature","properties":{"zone_id":"A"},"geometry":{"type":"Polygon",
     "coordinates":[[[0,0],[80,0],[80,80],[0,80],[0,0]],
                    [[40,40],[60,40],[60,60],[40,60],[40,40]]]}},
    {"type":"Feature","properties":{"zone_id":"B"},"geometry":{"type":"MultiPolygon",
     "coordinates":[[[[80,0],[170,0],[170,80],[80,80],[80,0]]],
                    [[[-50,-50],[-10,-50],[-10,-10],[-50,-10],[-50,-50]]]]}}
  ]})");
  WarningLog log;
  const auto zones = load_zones(path, log);
  REQUIRE(zones.size() == 2);
  CHECK(zones[0].zone_id == "A");
  CHECK(zones[0].parts.size() == 1);
  CHECK(zones[0].parts[0].rings.size() == 2);
  CHECK(zones[1].parts.size() == 2);
  CHECK(log.count("lonlat_suspect") == 1);  // every coordinate fits lon/lat ranges
}

TEST_CASE("zone loader rejects malformed collections with feature context") {
  ScratchDir dir("zones_bad");
  auto expect_error = [&](const std::string& name, const std::string& body,
                          const std::string& needle) {
    const auto path = dir / name;
    write_file(path, body);
    WarningLog log;
    CHECK_THROWS_WITH_AS(load_zones(path, log), doctest::Contains(needle.c_str()),
                         ValidationError);
  };
  expect_error("not_fc.geojson", R"({"type":"Feature"})", "FeatureCollection");
  expect_error("no_id.geojson",
               R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{},
                 "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}]})",
               "zone_id");
  expect_error("dup.geojson",
               R"({"type":"FeatureCollection","features":[
                 {"type":"Feature","properties":{"zone_id":"A"},"geometry":{"type":"Polygon",
                  "coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}},
                 {"type":"Feature","properties":{"zone_id":"A"},"geometry":{"type":"Polygon",
                  "coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}]})",
               "duplicate zone_id");
  expect_error("open_ring.geojson",
               R"({"type":"FeatureCollection","features":[
                 {"type":"Feature","properties":{"zone_id":"A"},"geometry":{"type":"Polygon",
                  "coordinates":[[[0,0],[1,0],[1,1],[0,1]]]}}]})",
               "feature 0");
  expect_error("short_ring.geojson",
               R"({"type":"FeatureCollection","features":[
                 {"type":"Feature","properties":{"zone_id":"A"},"geometry":{"type":"Polygon",
                  "coordinates":[[[0,0],[1,0],[0,0]]]}}]})",
               "feature 0");
  WarningLog log;
  CHECK_THROWS_AS(load_zones(dir / "absent.geojson", log), FileError);
  write_file(dir / "junk.geojson", "{not json");
  CHECK_THROWS_AS(load_zones(dir / "junk.geojson", log), ValidationError);
}

TEST_CASE("facility loader enforces schema and keeps optional naics") {
  ScratchDir dir("facilities");
  const auto ok = dir / "f.csv";
  write_file(ok, "facility_id,category,x,y,naics\nH1,hospital,1000,2000,622110\n"
                 "G1,grocery,1500,2500,\n");
  WarningLog log;
  const auto facilities = load_facilities(ok, log);
  REQUIRE(facilities.size() == 2);
  CHECK(facilities[0].category == FacilityCategory::hospital);
  CHECK(facilities[0].naics == "622110");
  CHECK(facilities[1].naics == "");
  CHECK(facilities[1].location.x == 1500.0);

  const auto no_naics = dir / "plain.csv";
  write_file(no_naics, "facility_id,category,x,y\nH1,hospital,1,2\n");
  CHECK(load_facilities(no_naics, log).size() == 1);

  auto expect_error = [&](const std::string& name, const std::string& body,
                          const std::string& needle) {
    const auto path = dir / name;
    write_file(path, body);
    WarningLog w;
    CHECK_THROWS_WITH_AS(load_facilities(path, w), doctest::Contains(needle.c_str()),
                         ValidationError);
  };
  expect_error("dup.csv", "facility_id,category,x,y\nH1,hospital,1,2\nH1,grocery,3,4\n",
               "duplicate facility_id");
  expect_error("cat.csv", "facility_id,category,x,y\nH1,school,1,2\n", "category");
  expect_error("num.csv", "facility_id,category,x,y\nH1,hospital,abc,2\n", ":2:");
  expect_error("nan.csv", "facility_id,category,x,y\nH1,hospital,nan,2\n", ":2:");
}

TEST_CASE("timestamp parsing covers zone designators and rejects bad fields") {
  CHECK(parse_iso8601_utc("1970-01-01T00:00:00Z") == 0.0);
  CHECK(parse_iso8601_utc("2020-01-01T00:00:00Z") == 1577836800.0);
  CHECK(parse_iso8601_utc("2020-02-29T00:00:00Z") == 1582934400.0);  // leap day
  CHECK(parse_iso8601_utc("1970-01-01t01:00:00+01:00") == 0.0);
  CHECK(parse_iso8601_utc("1969-12-31 23:00:00-01:00") == 0.0);
  CHECK(parse_iso8601_utc("1970-01-01T01:30:00+0130") == 0.0);
  CHECK(parse_iso8601_utc("1970-01-01T01:00:00+01") == 0.0);
  CHECK(parse_iso8601_utc("1970-01-01T00:00:00.500Z") == 0.5);
  CHECK(parse_iso8601_utc("1970-01-01T00:00:00.25z") == 0.25);

  for (const char* bad :
       {"", "2020-01-01", "2020-01-01T00:00:00", "2020-13-01T00:00:00Z",
        "2020-01-32T00:00:00Z", "2021-02-29T00:00:00Z", "2020-01-01T24:00:00Z",
        "2020-01-01T00:60:00Z", "2020-01-01T00:00:60Z", "2020-01-01T00:00:00+24:00",
        "2020-01-01T00:00:00+01:60", "garbage", "2020-1-01T00:00:00Z",
        "2020-01-01T00:00:00.Z"}) {
    CAPTURE(bad);
    CHECK_FALSE(parse_iso8601_utc(bad));
  }
}

TEST_CASE("ping reader streams rows and flags malformed timestamps") {
  ScratchDir dir("pings");
  const auto path = dir / "pings.csv";
  write_file(path, "device_id,timestamp,x,y\nD1,2020-01-01T00:00:00Z,10,20\n"
                   "D2,2020-01-01T00:05:00Z,30,40\n");
  PingReader reader(path);
  PingRecord record;
  REQUIRE(reader.next(record));
  CHECK(record.device_id == "D1");
  CHECK(record.timestamp_utc == 1577836800.0);
  CHECK(record.location.y == 20.0);
  REQUIRE(reader.next(record));
  CHECK_FALSE(reader.next(record));
  CHECK(reader.rows_read() == 2);

  const auto bad = dir / "bad.csv";
  write_file(bad, "device_id,timestamp,x,y\nD1,yesterday,10,20\n");
  PingReader broken(bad);
  CHECK_THROWS_WITH_AS(broken.next(record), doctest::Contains("malformed timestamp"),
                       ValidationError);
}

TEST_CASE("od loader sums duplicates, drops zeros, rejects negatives") {
  ScratchDir dir("od");
  const auto path = dir / "od.csv";
  write_file(path, "origin_zone_id,facility_id,visits\nZ1,F1,3\nZ1,F2,0\nZ1,F1,2\nZ2,F1,7\n");
  WarningLog log;
  const auto network = load_od(path, log);
  CHECK(network.visits("Z1", "F1") == 5);
  CHECK(network.visits("Z2", "F1") == 7);
  CHECK(network.total_visits() == 12);
  CHECK(network.pair_count() == 2);
  CHECK_FALSE(network.has_facility("F2"));  // zero-visit row dropped entirely
  CHECK(log.count("od_zero_visit_rows") == 1);

  const auto neg = dir / "neg.csv";
  write_file(neg, "origin_zone_id,facility_id,visits\nZ1,F1,-1\n");
  CHECK_THROWS_WITH_AS(load_od(neg, log), doctest::Contains("negative"), ValidationError);
  const auto frac = dir / "frac.csv";
  write_file(frac, "origin_zone_id,facility_id,visits\nZ1,F1,1.5\n");
  CHECK_THROWS_AS(load_od(frac, log), ValidationError);
}

TEST_CASE("od writer emits canonical sorted rows") {
  ScratchDir dir("od_write");
  VisitationNetwork network;
  network.add_visits("Z2", "F1", 7);
  network.add_visits("Z1", "F2", 1);
  network.add_visits("Z1", "F1", 5);
  const auto path = dir / "od.csv";
  write_od(network, path);
  CHECK(read_file(path) ==
        "origin_zone_id,facility_id,visits\nZ1,F1,5\nZ1,F2,1\nZ2,F1,7\n");
  WarningLog log;
  const auto back = load_od(path, log);
  CHECK(back.total_visits() == 13);
}

TEST_CASE("raster loader parses headers case- and order-insensitively") {
  ScratchDir dir("raster");
  const auto path = dir / "d.asc";
  write_file(path, "NROWS 2\nncols 3\nxllcorner 10.5\nYLLCORNER -4\ncellsize 30\n"
                   "NODATA_value -1\n0 0.5 1.25\n-1 2 0\n");
  const GridRaster r = load_raster(path);
  CHECK(r.ncols == 3);
  CHECK(r.nrows == 2);
  CHECK(r.xllcorner == 10.5);
  CHECK(r.yllcorner == -4.0);
  CHECK(r.cellsize == 30.0);
  CHECK(r.nodata == -1.0f);
  CHECK(r.at(0, 2) == 1.25f);
  CHECK(r.is_nodata(r.at(1, 0)));

  auto expect_error = [&](const std::string& name, const std::string& body,
                          const std::string& needle) {
    const auto p = dir / name;
    write_file(p, body);
    CHECK_THROWS_WITH_AS(load_raster(p), doctest::Contains(needle.c_str()), ValidationError);
  };
  expect_error("missing_key.asc", "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n0 0\n",
               "NODATA_value");
  expect_error("repeat.asc",
               "ncols 2\nncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n0 0\n",
               "ncols");
  expect_error("short_row.asc",
               "ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n0 0\n",
               "expected 3");
  expect_error("surplus.asc",
               "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n0\n1\n",
               "");
  expect_error("negative.asc",
               "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n-2\n",
               "negative depth");
  expect_error("bad_cellsize.asc",
               "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 0\nNODATA_value -9999\n0\n",
               "cellsize");
}

TEST_CASE("raster writer round-trips values exactly") {
  ScratchDir dir("raster_rt");
  GridRaster r;
  r.ncols = 3;
  r.nrows = 2;
  r.xllcorner = -12.25;
  r.yllcorner = 7.5;
  r.cellsize = 25;
  r.nodata = -9999.0f;
  r.values = {0.0f, 1.23f, -9999.0f, 4.56f, 0.01f, 2.0f};
  const auto path = dir / "out.asc";
  write_raster(r, path);
  const GridRaster back = load_raster(path);
  CHECK(back.same_geometry(r));
  CHECK(back.values == r.values);
}

TEST_CASE("manifest loader validates years, perils, and the standard AEP ladder") {
  ScratchDir dir("manifest");
  write_file(dir / "a.asc", "x");
  const auto path = dir / "manifest.csv";
  write_file(path, "year,peril,aep,path\n2020,pluvial,0.20,a.asc\n2060,fluvial,0.002,a.asc\n");
  WarningLog log;
  const auto entries = load_manifest(path, false, log);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].year == 2020);
  CHECK(entries[0].peril == Peril::pluvial);
  CHECK(entries[0].aep == 0.20);
  CHECK(entries[0].path == dir / "a.asc");  // resolved against the manifest directory

  auto expect_error = [&](const std::string& body, const std::string& needle) {
    const auto p = dir / "bad.csv";
    write_file(p, body);
    WarningLog w;
    CHECK_THROWS_WITH_AS(load_manifest(p, false, w), doctest::Contains(needle.c_str()),
                         ValidationError);
  };
  expect_error("year,peril,aep,path\n2021,pluvial,0.20,a.asc\n", "year");
  expect_error("year,peril,aep,path\n2020,combined,0.20,a.asc\n", "peril");
  expect_error("year,peril,aep,path\n2020,pluvial,0.15,a.asc\n", "aep");
  expect_error("year,peril,aep,path\n2020,pluvial,0,a.asc\n", "aep");
  expect_error("year,peril,aep,path\n2020,pluvial,0.20,a.asc\n2020,pluvial,0.20,a.asc\n",
               "duplicate");

  const auto custom = dir / "custom.csv";
  write_file(custom, "year,peril,aep,path\n2020,pluvial,0.15,a.asc\n");
  WarningLog w2;
  const auto loose = load_manifest(custom, true, w2);
  CHECK(loose.size() == 1);
  CHECK(w2.count("custom_aep") == 1);
}

TEST_CASE("crosswalk loader flags conflicts and duplicates") {
  ScratchDir dir("crosswalk");
  const auto ok = dir / "cw.csv";
  write_file(ok, "zone_id,zcta_id\nZ1,C1\nZ2,C1\nZ1,C1\n");
  WarningLog log;
  const auto table = load_crosswalk(ok, log);
  CHECK(table.zone_to_zcta.size() == 2);
  CHECK(*table.zcta_for("Z1") == "C1");
  CHECK_FALSE(table.zcta_for("Z9"));
  CHECK(log.count("crosswalk_duplicate_row") == 1);

  const auto conflict = dir / "conflict.csv";
  write_file(conflict, "zone_id,zcta_id\nZ1,C1\nZ1,C2\n");
  CHECK_THROWS_WITH_AS(load_crosswalk(conflict, log), doctest::Contains("Z1"),
                       ValidationError);

  const auto empty = dir / "empty.csv";
  write_file(empty, "zone_id,zcta_id\n");
  WarningLog log2;
  load_crosswalk(empty, log2);
  CHECK(log2.count("crosswalk_empty") == 1);
}

TEST_CASE("adjacency file round-trips and is validated on load") {
  ScratchDir dir("adjacency");
  AdjacencyGraph graph;
  graph.neighbors["A"] = {"B", "C"};
  graph.neighbors["B"] = {"A"};
  graph.neighbors["C"] = {"A"};
  graph.neighbors["D"] = {};
  const auto path = dir / "adj.csv";
  write_adjacency(graph, path);
  const AdjacencyGraph back = load_adjacency(path);
  CHECK(back.neighbors == graph.neighbors);
  CHECK(back.substitutability("A") == 2);
  CHECK(back.substitutability("D") == 1);

  const auto asym = dir / "asym.csv";
  write_file(asym, "zone_id,substitutability,neighbor_ids\nA,1,B\nB,1,\n");
  CHECK_THROWS_WITH_AS(load_adjacency(asym), doctest::Contains("symmetr"), ValidationError);
  const auto wrong_count = dir / "count.csv";
  write_file(wrong_count, "zone_id,substitutability,neighbor_ids\nA,3,B\nB,1,A\n");
  CHECK_THROWS_AS(load_adjacency(wrong_count), ValidationError);
  const auto self_loop = dir / "self.csv";
  write_file(self_loop, "zone_id,substitutability,neighbor_ids\nA,1,A\n");
  CHECK_THROWS_AS(load_adjacency(self_loop), ValidationError);
}

TEST_CASE("loaders survive random byte mutations without crashing") {
  ScratchDir dir("fuzz");
  const std::string zones = testsupport::zones_geojson(
      {{"A", 0, 0, 100}, {"B", 100, 0, 100}, {"C", 0, 100, 100}});
  const std::string od = "origin_zone_id,facility_id,visits\nZ1,F1,3\nZ2,F1,11\nZ1,F2,4\n";
  const std::string raster =
      "ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n"
      "0 1.5 2\n-9999 0 3.25\n";

  std::mt19937_64 rng(1234);
  auto mutate = [&](std::string text) {
    const std::size_t edits = 1 + rng() % 4;
    for (std::size_t e = 0; e < edits && !text.empty(); ++e) {
      const std::size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0: text[pos] = static_cast<char>(rng() % 256); break;
        case 1: text.erase(pos, 1); break;
        default: text.insert(pos, 1, static_cast<char>('0' + rng() % 10)); break;
      }
    }
    return text;
  };

  for (int i = 0; i < 200; ++i) {
    write_file(dir / "z.geojson", mutate(zones));
    WarningLog log;
    try {
      load_zones(dir / "z.geojson", log);
    } catch (const ValidationError&) {
    } catch (const FileError&) {
    }
  }
  for (int i = 0; i < 200; ++i) {
    write_file(dir / "od.csv", mutate(od));
    WarningLog log;
    try {
      load_od(dir / "od.csv", log);
    } catch (const ValidationError&) {
    } catch (const FileError&) {
    }
  }
  for (int i = 0; i < 200; ++i) {
    write_file(dir / "d.asc", mutate(raster));
    try {
      load_raster(dir / "d.asc");
    } catch (const ValidationError&) {
    } catch (const FileError&) {
    }
  }
  CHECK(true);  // reaching here means no crash or unexpected exception type
}
