#include "llc/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace llc {

std::string_view to_string(FacilityCategory category) {
  switch (category) {
    case FacilityCategory::hospital: return "hospital";
    case FacilityCategory::grocery: return "grocery";
  }
  return "grocery";
}

std::optional<FacilityCategory> parse_category(std::string_view s) {
  if (s == "hospital") return FacilityCategory::hospital;
  if (s == "grocery") return FacilityCategory::grocery;
  return std::nullopt;
}

std::string_view to_string(Peril peril) {
  switch (peril) {
    case Peril::pluvial: return "pluvial";
    case Peril::fluvial: return "fluvial";
    case Peril::coastal: return "coastal";
    case Peril::combined: return "combined";
  }
  return "combined";
}

std::optional<Peril> parse_peril(std::string_view s) {
  if (s == "pluvial") return Peril::pluvial;
  if (s == "fluvial") return Peril::fluvial;
  if (s == "coastal") return Peril::coastal;
  if (s == "combined") return Peril::combined;
  return std::nullopt;
}

namespace {

using nlohmann::json;

// All coordinates within lon/lat ranges is a strong hint the input is in
// degrees rather than planar meters.
struct LonLatHeuristic {
  bool any = false;
  bool all_in_degree_range = true;

  void feed(double x, double y) {
    any = true;
    if (std::abs(x) > 180.0 || std::abs(y) > 90.0) all_in_degree_range = false;
  }
  void report(WarningLog& warnings, const std::string& file) const {
    if (any && all_in_degree_range) {
      warnings.add("lonlat_suspect",
                   file + ": all coordinates fit lon/lat degree ranges; expected planar meters");
    }
  }
};

Ring parse_ring(const json& coords, std::size_t feature_index) {
  auto fail = [&](const std::string& what) -> void {
    throw ValidationError("feature " + std::to_string(feature_index) + ": " + what);
  };
  if (!coords.is_array() || coords.size() < 4) {
    fail("ring must be an array of at least 4 positions");
  }
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      fail("position must be an [x, y] number pair");
    }
    PlanarPoint p{pos[0].get<double>(), pos[1].get<double>()};
    if (!finite_point(p)) fail("coordinates must be finite");
    ring.push_back(p);
  }
  const PlanarPoint first = ring.front();
  const PlanarPoint last = ring.back();
  if (std::abs(first.x - last.x) > 1e-9 || std::abs(first.y - last.y) > 1e-9) {
    fail("unclosed ring (first vertex must equal last)");
  }
  return ring;
}

PolygonShape parse_polygon(const json& coords, std::size_t feature_index) {
  if (!coords.is_array() || coords.empty()) {
    throw ValidationError("feature " + std::to_string(feature_index) +
                          ": Polygon coordinates must be a non-empty array of rings");
  }
  PolygonShape shape;
  for (const auto& ring : coords) shape.rings.push_back(parse_ring(ring, feature_index));
  return shape;
}

}  // namespace

std::vector<ZoneGeometry> load_zones(const std::filesystem::path& path, WarningLog& warnings) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!root.is_object() || root.value("type", "") != "FeatureCollection" ||
      !root.contains("features") || !root["features"].is_array()) {
    throw ValidationError(path.string() + ": expected a GeoJSON FeatureCollection");
  }

  std::vector<ZoneGeometry> zones;
  std::unordered_set<std::string> seen;
  LonLatHeuristic lonlat;
  const auto& features = root["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& feature = features[i];
    auto fail = [&](const std::string& what) -> void {
      throw ValidationError(path.string() + ": feature " + std::to_string(i) + ": " + what);
    };
    if (!feature.is_object() || feature.value("type", "") != "Feature") fail("not a Feature");
    if (!feature.contains("properties") || !feature["properties"].is_object() ||
        !feature["properties"].contains("zone_id")) {
      fail("missing properties.zone_id");
    }
    const auto& id_value = feature["properties"]["zone_id"];
    if (!id_value.is_string()) fail("zone_id must be a string");
    ZoneGeometry zone;
    zone.zone_id = id_value.get<std::string>();
    if (zone.zone_id.empty()) fail("zone_id must be non-empty");
    if (!seen.insert(zone.zone_id).second) fail("duplicate zone_id '" + zone.zone_id + "'");

    if (!feature.contains("geometry") || !feature["geometry"].is_object()) fail("missing geometry");
    const auto& geometry = feature["geometry"];
    const std::string geom_type = geometry.value("type", "");
    if (!geometry.contains("coordinates")) fail("missing geometry.coordinates");
    const auto& coords = geometry["coordinates"];
    if (geom_type != "Polygon" && geom_type != "MultiPolygon") {
      fail("geometry type '" + geom_type + "' is not Polygon or MultiPolygon");
    }
    if (geom_type == "MultiPolygon" && (!coords.is_array() || coords.empty())) {
      fail("MultiPolygon must be non-empty");
    }
    try {
      if (geom_type == "Polygon") {
        zone.parts.push_back(parse_polygon(coords, i));
      } else {
        for (const auto& poly : coords) zone.parts.push_back(parse_polygon(poly, i));
      }
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
    for (const auto& part : zone.parts) {
      for (const auto& ring : part.rings) {
        for (auto p : ring) lonlat.feed(p.x, p.y);
      }
    }
    zones.push_back(std::move(zone));
  }
  lonlat.report(warnings, path.string());
  return zones;
}

std::vector<FacilityRecord> load_facilities(const std::filesystem::path& path,
                                            WarningLog& warnings) {
  CsvReader reader(path);
  reader.expect_header({"facility_id", "category", "x", "y"}, {"naics"});
  std::vector<FacilityRecord> facilities;
  std::unordered_set<std::string> seen;
  LonLatHeuristic lonlat;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != reader.column_count()) {
      reader.fail("expected " + std::to_string(reader.column_count()) + " fields, got " +
                  std::to_string(fields.size()));
    }
    FacilityRecord record;
    record.facility_id = std::string(fields[0]);
    if (record.facility_id.empty()) reader.fail("empty facility_id");
    if (!seen.insert(record.facility_id).second) {
      reader.fail("duplicate facility_id '" + record.facility_id + "'");
    }
    auto category = parse_category(fields[1]);
    if (!category) reader.fail("unknown category '" + std::string(fields[1]) + "'");
    record.category = *category;
    if (!parse_double_field(fields[2], record.location.x) ||
        !parse_double_field(fields[3], record.location.y) ||
        !finite_point(record.location)) {
      reader.fail("non-numeric coordinate");
    }
    if (fields.size() > 4) record.naics = std::string(fields[4]);
    lonlat.feed(record.location.x, record.location.y);
    facilities.push_back(std::move(record));
  }
  lonlat.report(warnings, path.string());
  return facilities;
}

namespace {

// Howard Hinnant's civil-days algorithm.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

unsigned days_in_month(int y, unsigned m) {
  static const unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[m - 1];
}

bool parse_fixed_digits(std::string_view s, std::size_t& pos, int width, int& out) {
  if (pos + width > s.size()) return false;
  int value = 0;
  for (int i = 0; i < width; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  pos += width;
  out = value;
  return true;
}

}  // namespace

std::optional<double> parse_iso8601_utc(std::string_view s) {
  std::size_t pos = 0;
  int year, month, day, hour, minute, second;
  if (!parse_fixed_digits(s, pos, 4, year)) return std::nullopt;
  if (pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  if (!parse_fixed_digits(s, pos, 2, month)) return std::nullopt;
  if (pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  if (!parse_fixed_digits(s, pos, 2, day)) return std::nullopt;
  if (pos >= s.size() || (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ')) return std::nullopt;
  ++pos;
  if (!parse_fixed_digits(s, pos, 2, hour)) return std::nullopt;
  if (pos >= s.size() || s[pos] != ':') return std::nullopt;
  ++pos;
  if (!parse_fixed_digits(s, pos, 2, minute)) return std::nullopt;
  if (pos >= s.size() || s[pos] != ':') return std::nullopt;
  ++pos;
  if (!parse_fixed_digits(s, pos, 2, second)) return std::nullopt;

  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 || day > static_cast<int>(days_in_month(year, month))) return std::nullopt;
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;

  double fraction = 0.0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    double scale = 0.1;
    bool any = false;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      fraction += (s[pos] - '0') * scale;
      scale *= 0.1;
      ++pos;
      any = true;
    }
    if (!any) return std::nullopt;
  }

  // Zone designator is mandatory.
  if (pos >= s.size()) return std::nullopt;
  int offset_seconds = 0;
  const char zone = s[pos];
  if (zone == 'Z' || zone == 'z') {
    ++pos;
  } else if (zone == '+' || zone == '-') {
    ++pos;
    int oh, om = 0;
    if (!parse_fixed_digits(s, pos, 2, oh)) return std::nullopt;
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      if (!parse_fixed_digits(s, pos, 2, om)) return std::nullopt;
    } else if (pos + 2 <= s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (!parse_fixed_digits(s, pos, 2, om)) return std::nullopt;
    }
    if (oh > 23 || om > 59) return std::nullopt;
    offset_seconds = (oh * 60 + om) * 60;
    if (zone == '-') offset_seconds = -offset_seconds;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;

  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                            static_cast<unsigned>(day));
  const double local = static_cast<double>(days) * 86400.0 + hour * 3600.0 + minute * 60.0 +
                       second + fraction;
  return local - offset_seconds;
}

PingReader::PingReader(const std::filesystem::path& path) : reader_(path) {
  reader_.expect_header({"device_id", "timestamp", "x", "y"});
}

bool PingReader::next(PingRecord& record) {
  if (!reader_.next(fields_)) return false;
  if (fields_.size() != 4) {
    reader_.fail("expected 4 fields, got " + std::to_string(fields_.size()));
  }
  record.device_id = std::string(fields_[0]);
  if (record.device_id.empty()) reader_.fail("empty device_id");
  auto ts = parse_iso8601_utc(fields_[1]);
  if (!ts) reader_.fail("malformed timestamp '" + std::string(fields_[1]) + "'");
  record.timestamp_utc = *ts;
  if (!parse_double_field(fields_[2], record.location.x) ||
      !parse_double_field(fields_[3], record.location.y) ||
      !finite_point(record.location)) {
    reader_.fail("non-numeric coordinate");
  }
  return true;
}

VisitationNetwork load_od(const std::filesystem::path& path, WarningLog& warnings) {
  CsvReader reader(path);
  reader.expect_header({"origin_zone_id", "facility_id", "visits"});
  VisitationNetwork network;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 3) {
      reader.fail("expected 3 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) reader.fail("empty origin_zone_id");
    if (fields[1].empty()) reader.fail("empty facility_id");
    std::int64_t visits = 0;
    if (!parse_int_field(fields[2], visits)) {
      reader.fail("visits must be an integer, got '" + std::string(fields[2]) + "'");
    }
    if (visits < 0) reader.fail("negative visits");
    if (visits == 0) {
      warnings.add("od_zero_visit_rows", path.string() + ":" +
                                             std::to_string(reader.line_number()) +
                                             ": zero-visit row dropped");
      continue;
    }
    network.add_visits(fields[0], fields[1], static_cast<std::uint64_t>(visits));
  }
  return network;
}

void write_od(const VisitationNetwork& network, const std::filesystem::path& path) {
  CsvWriter out(path);
  out.raw_line("origin_zone_id,facility_id,visits");
  for (const auto& row : network.sorted_rows()) {
    std::string line;
    line.reserve(row.origin_zone_id.size() + row.facility_id.size() + 24);
    line.append(row.origin_zone_id);
    line.push_back(',');
    line.append(row.facility_id);
    line.push_back(',');
    line.append(std::to_string(row.count));
    out.raw_line(line);
  }
  out.close();
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const char* skip_ws(const char* p, const char* end) {
  while (p < end && (*p == ' ' || *p == '\t')) ++p;
  return p;
}

}  // namespace

GridRaster load_raster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  auto fail = [&](std::size_t line, const std::string& what) -> void {
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + what);
  };

  const char* p = content.data();
  const char* const end = content.data() + content.size();
  std::size_t line_no = 0;

  auto next_line = [&](const char*& line_begin, const char*& line_end) {
    if (p >= end) return false;
    line_begin = p;
    const char* nl = static_cast<const char*>(memchr(p, '\n', end - p));
    line_end = nl ? nl : end;
    p = nl ? nl + 1 : end;
    if (line_end > line_begin && line_end[-1] == '\r') --line_end;
    ++line_no;
    return true;
  };

  std::unordered_map<std::string, double> header;
  const char* lb;
  const char* le;
  bool buffered_data_line = false;  // first data row, found while scanning headers
  while (header.size() < 6) {
    if (!next_line(lb, le)) break;  // the canonical-key check below names what's missing
    const char* q = skip_ws(lb, le);
    if (q == le) continue;
    // A line opening with a number is the first data row; the header is over.
    double probe = 0.0;
    if (auto [pp, pe] = std::from_chars(q, le, probe); pe == std::errc() && pp != q) {
      buffered_data_line = true;
      break;
    }
    const char* key_end = q;
    while (key_end < le && *key_end != ' ' && *key_end != '\t') ++key_end;
    std::string key = lowercase(std::string_view(q, key_end - q));
    const char* v = skip_ws(key_end, le);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(v, le, value);
    if (ec != std::errc() || skip_ws(ptr, le) != le) {
      fail(line_no, "malformed header line");
    }
    if (key != "ncols" && key != "nrows" && key != "xllcorner" && key != "yllcorner" &&
        key != "cellsize" && key != "nodata_value") {
      fail(line_no, "unknown header key '" + key + "'");
    }
    if (!header.emplace(key, value).second) fail(line_no, "repeated header key '" + key + "'");
  }
  const std::pair<const char*, const char*> required[] = {
      {"ncols", "ncols"},         {"nrows", "nrows"},
      {"xllcorner", "xllcorner"}, {"yllcorner", "yllcorner"},
      {"cellsize", "cellsize"},   {"nodata_value", "NODATA_value"}};
  for (const auto& [key, shown] : required) {
    if (!header.count(key)) {
      throw ValidationError(path.string() + ": missing header key '" + std::string(shown) + "'");
    }
  }

  GridRaster raster;
  const double ncols_d = header["ncols"];
  const double nrows_d = header["nrows"];
  if (ncols_d < 1 || ncols_d != std::floor(ncols_d) || ncols_d > 1e9) {
    throw ValidationError(path.string() + ": ncols must be a positive integer");
  }
  if (nrows_d < 1 || nrows_d != std::floor(nrows_d) || nrows_d > 1e9) {
    throw ValidationError(path.string() + ": nrows must be a positive integer");
  }
  raster.ncols = static_cast<int>(ncols_d);
  raster.nrows = static_cast<int>(nrows_d);
  raster.xllcorner = header["xllcorner"];
  raster.yllcorner = header["yllcorner"];
  raster.cellsize = header["cellsize"];
  if (!(raster.cellsize > 0)) throw ValidationError(path.string() + ": cellsize must be > 0");
  raster.nodata = static_cast<float>(header["nodata_value"]);

  raster.values.resize(static_cast<std::size_t>(raster.ncols) * raster.nrows);
  std::size_t cell = 0;
  for (int row = 0; row < raster.nrows; ++row) {
    if (buffered_data_line) {
      buffered_data_line = false;  // lb/le still hold the row found above
    } else {
      do {
        if (!next_line(lb, le)) {
          fail(line_no, "unexpected end of file: expected " + std::to_string(raster.nrows) +
                            " data rows, got " + std::to_string(row));
        }
      } while (skip_ws(lb, le) == le);  // tolerate blank lines between rows
    }

    const char* q = lb;
    int count = 0;
    while (true) {
      q = skip_ws(q, le);
      if (q == le) break;
      float value = 0.0f;
      auto [ptr, ec] = std::from_chars(q, le, value);
      if (ec != std::errc()) fail(line_no, "malformed value in data row");
      if (!std::isfinite(value)) fail(line_no, "non-finite value in data row");
      q = ptr;
      if (count >= raster.ncols) {
        fail(line_no, "data row has more than ncols=" + std::to_string(raster.ncols) + " values");
      }
      if (value < 0.0f && !raster.is_nodata(value)) {
        fail(line_no, "negative depth " + format_sig6(value));
      }
      raster.values[cell++] = value;
      ++count;
    }
    if (count != raster.ncols) {
      fail(line_no, "data row has " + std::to_string(count) + " values, expected " +
                        std::to_string(raster.ncols));
    }
  }
  // Anything left other than whitespace is surplus data.
  while (next_line(lb, le)) {
    if (skip_ws(lb, le) != le) fail(line_no, "surplus data after last expected row");
  }
  return raster;
}

void write_raster(const GridRaster& raster, const std::filesystem::path& path) {
  std::string out;
  out.reserve(static_cast<std::size_t>(raster.nrows) * (raster.ncols * 6 + 1) + 128);
  char buf[64];
  auto append_number = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
  };
  auto append_float = [&](float v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
  };
  out += "ncols " + std::to_string(raster.ncols) + "\n";
  out += "nrows " + std::to_string(raster.nrows) + "\n";
  out += "xllcorner ";
  append_number(raster.xllcorner);
  out += "\nyllcorner ";
  append_number(raster.yllcorner);
  out += "\ncellsize ";
  append_number(raster.cellsize);
  out += "\nNODATA_value ";
  append_float(raster.nodata);
  out.push_back('\n');
  std::size_t cell = 0;
  for (int row = 0; row < raster.nrows; ++row) {
    for (int col = 0; col < raster.ncols; ++col) {
      if (col) out.push_back(' ');
      append_float(raster.values[cell++]);
    }
    out.push_back('\n');
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw WriteError("cannot open " + path.string() + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw WriteError("write failed for " + path.string());
}

std::vector<RasterManifestEntry> load_manifest(const std::filesystem::path& path,
                                               bool allow_custom_aep, WarningLog& warnings) {
  CsvReader reader(path);
  reader.expect_header({"year", "peril", "aep", "path"});
  std::vector<RasterManifestEntry> entries;
  std::set<std::tuple<int, int, double>> seen;
  std::vector<std::string_view> fields;
  const std::filesystem::path base = path.parent_path();
  while (reader.next(fields)) {
    if (fields.size() != 4) {
      reader.fail("expected 4 fields, got " + std::to_string(fields.size()));
    }
    RasterManifestEntry entry;
    std::int64_t year = 0;
    if (!parse_int_field(fields[0], year) || (year != 2020 && year != 2060)) {
      reader.fail("year must be 2020 or 2060, got '" + std::string(fields[0]) + "'");
    }
    entry.year = static_cast<int>(year);
    auto peril = parse_peril(fields[1]);
    if (!peril || *peril == Peril::combined) {
      reader.fail("peril must be pluvial, fluvial, or coastal, got '" + std::string(fields[1]) +
                  "'");
    }
    entry.peril = *peril;
    if (!parse_double_field(fields[2], entry.aep) || !(entry.aep > 0.0) || entry.aep > 1.0) {
      reader.fail("aep must be a probability in (0, 1], got '" + std::string(fields[2]) + "'");
    }
    const bool standard = std::any_of(std::begin(kStandardAeps), std::end(kStandardAeps),
                                      [&](double a) { return std::abs(a - entry.aep) < 1e-12; });
    if (!standard && !allow_custom_aep) {
      reader.fail("aep " + format_sig6(entry.aep) +
                  " is not one of the standard return periods (use --allow-custom-aep to accept)");
    }
    if (!standard) {
      warnings.add("custom_aep", path.string() + ": non-standard aep " + format_sig6(entry.aep));
    }
    if (fields[3].empty()) reader.fail("empty path");
    entry.path = base / std::filesystem::path(std::string(fields[3]));
    if (!seen.emplace(entry.year, static_cast<int>(entry.peril), entry.aep).second) {
      reader.fail("duplicate manifest entry for (year, peril, aep)");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

CrosswalkTable load_crosswalk(const std::filesystem::path& path, WarningLog& warnings) {
  CsvReader reader(path);
  reader.expect_header({"zone_id", "zcta_id"});
  CrosswalkTable table;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 2) {
      reader.fail("expected 2 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) reader.fail("empty zone_id");
    if (fields[1].empty()) reader.fail("empty zcta_id");
    const std::string zone(fields[0]);
    const std::string zcta(fields[1]);
    auto [it, inserted] = table.zone_to_zcta.emplace(zone, zcta);
    if (!inserted) {
      if (it->second != zcta) {
        reader.fail("zone '" + zone + "' listed with conflicting ZCTAs '" + it->second +
                    "' and '" + zcta + "'");
      }
      warnings.add("crosswalk_duplicate_row",
                   path.string() + ":" + std::to_string(reader.line_number()) +
                       ": duplicate mapping for zone '" + zone + "'");
    }
  }
  if (table.zone_to_zcta.empty()) {
    warnings.add("crosswalk_empty", path.string() + ": crosswalk has no data rows");
  }
  return table;
}

void write_adjacency(const AdjacencyGraph& graph, const std::filesystem::path& path) {
  CsvWriter out(path);
  out.raw_line("zone_id,substitutability,neighbor_ids");
  for (const auto& [zone, neighbors] : graph.neighbors) {
    std::string line = zone;
    line.push_back(',');
    line.append(std::to_string(graph.substitutability(zone)));
    line.push_back(',');
    bool first = true;
    for (const auto& n : neighbors) {
      if (!first) line.push_back(';');
      line.append(n);
      first = false;
    }
    out.raw_line(line);
  }
  out.close();
}

AdjacencyGraph load_adjacency(const std::filesystem::path& path) {
  CsvReader reader(path);
  reader.expect_header({"zone_id", "substitutability", "neighbor_ids"});
  AdjacencyGraph graph;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 3) {
      reader.fail("expected 3 fields, got " + std::to_string(fields.size()));
    }
    const std::string zone(fields[0]);
    if (zone.empty()) reader.fail("empty zone_id");
    if (graph.neighbors.count(zone)) reader.fail("duplicate zone_id '" + zone + "'");
    auto& set = graph.neighbors[zone];
    std::string_view list = fields[2];
    while (!list.empty()) {
      const std::size_t sep = list.find(';');
      const std::string_view item = list.substr(0, sep);
      if (item.empty()) reader.fail("empty neighbor id");
      if (item == zone) reader.fail("zone '" + zone + "' lists itself as neighbor");
      set.emplace(item);
      if (sep == std::string_view::npos) break;
      list.remove_prefix(sep + 1);
    }
    std::int64_t subst = 0;
    if (!parse_int_field(fields[1], subst) ||
        subst != std::max<std::int64_t>(1, static_cast<std::int64_t>(set.size()))) {
      reader.fail("substitutability must equal max(1, neighbor count)");
    }
  }
  // Symmetry is part of the format contract.
  for (const auto& [zone, neighbors] : graph.neighbors) {
    for (const auto& n : neighbors) {
      auto it = graph.neighbors.find(n);
      if (it == graph.neighbors.end() || !it->second.count(zone)) {
        throw ValidationError(path.string() + ": adjacency is not symmetric for '" + zone +
                              "' and '" + n + "'");
      }
    }
  }
  return graph;
}

}  // namespace llc
