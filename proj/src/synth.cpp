#include "llc/synth.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include <json.hpp>

#include "llc/csv.hpp"
#include "llc/geometry.hpp"
#include "llc/ingest.hpp"
#include "llc/visitation.hpp"

namespace llc {

namespace {

using nlohmann::ordered_json;

constexpr double kZoneSize = 1000.0;            // meters per mesh cell
constexpr double kJitter = 0.3;                 // lattice jitter, fraction of cell
constexpr int kNoiseLattice = 17;               // value-noise lattice nodes per axis
constexpr double kDepthScaleFt = 20.0;          // noise-to-depth scaling
constexpr int kDays = 7;                        // calendar span of a scenario
// Anchors cover every night so same-facility visits on consecutive days are
// always separated by a home ping; otherwise their episodes would fuse into
// one run and the detector would count a single event where the ledger has two.
constexpr int kNights = kDays;
constexpr double kHomeClearance = 60.0;         // min anchor distance to any facility

// mt19937_64 is bit-portable; the mappings below avoid the
// implementation-defined standard distributions.
class Draw {
public:
  explicit Draw(std::uint64_t seed) : gen_(seed) {}

  double real() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0);
  }
  double range(double lo, double hi) { return lo + (hi - lo) * real(); }
  std::uint64_t index(std::uint64_t n) { return gen_() % n; }

private:
  std::mt19937_64 gen_;
};

struct Mesh {
  int rows = 0, cols = 0;
  std::vector<double> px, py;  // (rows+1) x (cols+1) lattice, row-major

  double lat_x(int r, int c) const { return px[static_cast<std::size_t>(r) * (cols + 1) + c]; }
  double lat_y(int r, int c) const { return py[static_cast<std::size_t>(r) * (cols + 1) + c]; }
  double width() const { return cols * kZoneSize; }
  double height() const { return rows * kZoneSize; }
};

std::string zone_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "Z%04d", index);
  return buf;
}

std::string zcta_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "C%04d", index);
  return buf;
}

Mesh build_mesh(int n_zones, Draw& draw) {
  Mesh mesh;
  auto [rows, cols] = mesh_shape(n_zones);
  mesh.rows = rows;
  mesh.cols = cols;
  const std::size_t n = static_cast<std::size_t>(rows + 1) * (cols + 1);
  mesh.px.resize(n);
  mesh.py.resize(n);
  for (int r = 0; r <= rows; ++r) {
    for (int c = 0; c <= cols; ++c) {
      double x = c * kZoneSize;
      double y = r * kZoneSize;
      if (r > 0 && r < rows && c > 0 && c < cols) {
        x += draw.range(-kJitter, kJitter) * kZoneSize;
        y += draw.range(-kJitter, kJitter) * kZoneSize;
      }
      mesh.px[static_cast<std::size_t>(r) * (cols + 1) + c] = x;
      mesh.py[static_cast<std::size_t>(r) * (cols + 1) + c] = y;
    }
  }
  return mesh;
}

// Counter-clockwise quad for zone (r, c), closed.
std::vector<std::array<double, 2>> zone_ring(const Mesh& mesh, int r, int c) {
  return {
      {mesh.lat_x(r, c), mesh.lat_y(r, c)},
      {mesh.lat_x(r, c + 1), mesh.lat_y(r, c + 1)},
      {mesh.lat_x(r + 1, c + 1), mesh.lat_y(r + 1, c + 1)},
      {mesh.lat_x(r + 1, c), mesh.lat_y(r + 1, c)},
      {mesh.lat_x(r, c), mesh.lat_y(r, c)},
  };
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw WriteError("write failed for " + path.string());
}

double sample_noise(const std::vector<double>& lattice, double u, double v) {
  const int k = kNoiseLattice;
  u = std::clamp(u, 0.0, static_cast<double>(k - 1));
  v = std::clamp(v, 0.0, static_cast<double>(k - 1));
  const int i = std::min(static_cast<int>(u), k - 2);
  const int j = std::min(static_cast<int>(v), k - 2);
  const double fu = u - i, fv = v - j;
  const double a = lattice[static_cast<std::size_t>(j) * k + i];
  const double b = lattice[static_cast<std::size_t>(j) * k + i + 1];
  const double c = lattice[static_cast<std::size_t>(j + 1) * k + i];
  const double d = lattice[static_cast<std::size_t>(j + 1) * k + i + 1];
  return (a * (1 - fu) + b * fu) * (1 - fv) + (c * (1 - fu) + d * fu) * fv;
}

float quantize2(double v) {
  return static_cast<float>(std::round(v * 100.0) / 100.0);
}

std::string iso_timestamp(std::int64_t day, std::int64_t second_of_day) {
  // The scenario calendar stays inside May 2025.
  const std::int64_t total = day * 86400 + second_of_day;
  const int dom = 1 + static_cast<int>(total / 86400);
  const int sod = static_cast<int>(total % 86400);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "2025-05-%02dT%02d:%02d:%02dZ", dom, sod / 3600,
                (sod / 60) % 60, sod % 60);
  return buf;
}

struct FacilitySpec {
  std::string id;
  std::string category;
  double x = 0, y = 0;
};

}  // namespace

std::pair<int, int> mesh_shape(int n_zones) {
  int rows = 1;
  for (int d = static_cast<int>(std::sqrt(static_cast<double>(n_zones))); d >= 1; --d) {
    if (n_zones % d == 0) {
      rows = d;
      break;
    }
  }
  return {rows, n_zones / rows};
}

std::vector<std::string> generate_scenario(const SynthParams& params,
                                           const std::filesystem::path& out_dir) {
  if (params.n_zones < 1) throw ValidationError("n_zones must be >= 1");
  const int n_fac = params.n_hospitals + params.n_groceries;
  if (params.n_hospitals < 0 || params.n_groceries < 0 || n_fac < 1) {
    throw ValidationError("facility counts must be non-negative and total at least 1");
  }
  if (params.visit_total < 1) throw ValidationError("visit_total must be >= 1");
  if (!(params.zipf_exponent > 0)) throw ValidationError("zipf_exponent must be > 0");
  if (params.raster_dim < 8) throw ValidationError("raster_dim must be >= 8");
  if (params.raster_cellsize < 0) throw ValidationError("raster_cellsize must be >= 0");
  if (!(params.depth_growth_2060 >= 1.0)) {
    throw ValidationError("depth_growth_2060 must be >= 1");
  }
  if (params.pings_mode && params.n_devices < 1) {
    throw ValidationError("pings mode needs n_devices >= 1");
  }

  std::filesystem::create_directories(out_dir);
  Draw draw(params.seed);
  std::vector<std::string> files;

  // Zone mesh and GeoJSON.
  const Mesh mesh = build_mesh(params.n_zones, draw);
  const double width = mesh.width(), height = mesh.height();
  {
    ordered_json fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = ordered_json::array();
    for (int r = 0; r < mesh.rows; ++r) {
      for (int c = 0; c < mesh.cols; ++c) {
        ordered_json feature;
        feature["type"] = "Feature";
        feature["properties"] = {{"zone_id", zone_name(r * mesh.cols + c)}};
        feature["geometry"] = {{"type", "Polygon"},
                               {"coordinates", ordered_json::array({zone_ring(mesh, r, c)})}};
        fc["features"].push_back(std::move(feature));
      }
    }
    write_text(out_dir / "zones.geojson", fc.dump(2) + "\n");
    files.push_back("zones.geojson");
  }

  // Crosswalk: 2x2 mesh blocks form one ZCTA.
  {
    const int block_cols = (mesh.cols + 1) / 2;
    std::string out = "zone_id,zcta_id\n";
    for (int r = 0; r < mesh.rows; ++r) {
      for (int c = 0; c < mesh.cols; ++c) {
        const int zcta = (r / 2) * block_cols + (c / 2);
        out += zone_name(r * mesh.cols + c) + "," + zcta_name(zcta) + "\n";
      }
    }
    write_text(out_dir / "crosswalk.csv", out);
    files.push_back("crosswalk.csv");
  }

  // Facilities, hospitals first so they take the most popular ranks.
  const double cell_eff = params.raster_cellsize > 0
                              ? params.raster_cellsize
                              : std::max(width, height) / params.raster_dim;
  double margin = 2 * cell_eff + 150.0;
  margin = std::min(margin, 0.25 * std::min(width, height));
  std::vector<FacilitySpec> facilities;
  facilities.reserve(n_fac);
  for (int i = 0; i < n_fac; ++i) {
    FacilitySpec f;
    const bool hospital = i < params.n_hospitals;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%c%04d", hospital ? 'H' : 'G',
                  hospital ? i + 1 : i - params.n_hospitals + 1);
    f.id = buf;
    f.category = hospital ? "hospital" : "grocery";
    f.x = draw.range(margin, width - margin);
    f.y = draw.range(margin, height - margin);
    facilities.push_back(std::move(f));
  }
  {
    std::string out = "facility_id,category,x,y\n";
    for (const auto& f : facilities) {
      out += f.id + "," + f.category + "," + format_shortest(f.x) + "," + format_shortest(f.y) +
             "\n";
    }
    write_text(out_dir / "facilities.csv", out);
    files.push_back("facilities.csv");
  }

  // Zipf popularity over facility list order.
  std::vector<double> zipf_cum(n_fac);
  {
    double acc = 0.0;
    for (int i = 0; i < n_fac; ++i) {
      acc += std::pow(static_cast<double>(i + 1), -params.zipf_exponent);
      zipf_cum[i] = acc;
    }
  }
  auto zipf_draw = [&]() -> int {
    const double r = draw.real() * zipf_cum.back();
    return static_cast<int>(std::upper_bound(zipf_cum.begin(), zipf_cum.end(), r) -
                            zipf_cum.begin());
  };

  std::map<std::string, std::uint64_t> per_facility_visits;
  std::map<std::string, std::uint64_t> per_zone_homes;
  std::uint64_t realized_visits = 0;

  if (!params.pings_mode) {
    VisitationNetwork network;
    std::vector<std::string> zone_ids(params.n_zones);
    for (int z = 0; z < params.n_zones; ++z) zone_ids[z] = zone_name(z);
    for (std::uint64_t v = 0; v < params.visit_total; ++v) {
      const int f = zipf_draw();
      const auto z = static_cast<std::size_t>(draw.index(params.n_zones));
      network.add_visits(zone_ids[z], facilities[f].id, 1);
      per_facility_visits[facilities[f].id]++;
    }
    realized_visits = network.total_visits();
    write_od(network, out_dir / "od.csv");
    files.push_back("od.csv");
  } else {
    // Devices: a home anchor (clear of every facility) plus nightly pings
    // that accrue 8 h of in-zone dwell per night.
    struct Device {
      std::string id;
      int home_zone = 0;
      double ax = 0, ay = 0;
    };
    std::vector<Device> devices(params.n_devices);
    std::vector<ZoneGeometry> zones;  // for containment checks
    zones.reserve(params.n_zones);
    for (int r = 0; r < mesh.rows; ++r) {
      for (int c = 0; c < mesh.cols; ++c) {
        ZoneGeometry zone;
        zone.zone_id = zone_name(r * mesh.cols + c);
        PolygonShape shape;
        Ring ring;
        for (const auto& p : zone_ring(mesh, r, c)) ring.push_back({p[0], p[1]});
        shape.rings.push_back(std::move(ring));
        zone.parts.push_back(std::move(shape));
        zones.push_back(std::move(zone));
      }
    }
    auto clear_of_facilities = [&](double x, double y) {
      for (const auto& f : facilities) {
        const double dx = f.x - x, dy = f.y - y;
        if (dx * dx + dy * dy < kHomeClearance * kHomeClearance) return false;
      }
      return true;
    };
    for (int d = 0; d < params.n_devices; ++d) {
      Device dev;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "D%05d", d + 1);
      dev.id = buf;
      dev.home_zone = static_cast<int>(draw.index(params.n_zones));
      const ZoneGeometry& zone = zones[dev.home_zone];
      const Bounds box = zone.bounds();
      bool placed = false;
      for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        const double x = draw.range(box.min_x, box.max_x);
        const double y = draw.range(box.min_y, box.max_y);
        if (zone_contains(zone, {x, y}) && clear_of_facilities(x, y)) {
          dev.ax = x;
          dev.ay = y;
          placed = true;
        }
      }
      if (!placed) {
        throw ValidationError("infeasible scenario: cannot place a home anchor in zone " +
                              zone.zone_id + " clear of facilities");
      }
      per_zone_homes[zone_name(dev.home_zone)]++;
      devices[d] = std::move(dev);
    }

    struct Ping {
      std::int64_t t = 0;  // seconds from scenario start
      int device = 0;
      double x = 0, y = 0;
    };
    std::vector<Ping> pings;
    for (int d = 0; d < params.n_devices; ++d) {
      for (int night = 0; night < kNights; ++night) {
        const std::int64_t base = static_cast<std::int64_t>(night) * 86400;
        for (std::int64_t t : {base + 20 * 3600, base + 24 * 3600, base + 28 * 3600}) {
          pings.push_back({t, d, devices[d].ax, devices[d].ay});
        }
      }
    }

    // Each visit occupies one 40-minute lane of a device's 09:00-17:00 day so
    // episodes of one device can never interleave in time; interleaved pings
    // would fragment both episodes below the detection dwell floor.
    constexpr int kSlotsPerDay = 12;
    std::set<std::tuple<int, int, int>> seen;       // (device, facility, day)
    std::set<std::tuple<int, int, int>> used_slot;  // (device, day, slot)
    for (std::uint64_t v = 0; v < params.visit_total; ++v) {
      bool placed = false;
      for (int attempt = 0; attempt < 30 && !placed; ++attempt) {
        const int d = static_cast<int>(draw.index(params.n_devices));
        const int f = zipf_draw();
        const int day = static_cast<int>(draw.index(kDays));
        const int slot = static_cast<int>(draw.index(kSlotsPerDay));
        if (seen.count({d, f, day}) || !used_slot.emplace(d, day, slot).second) continue;
        seen.emplace(d, f, day);
        const auto start = static_cast<std::int64_t>(
            day * 86400 + 9 * 3600 + slot * 2400 +
            static_cast<std::int64_t>(draw.range(0, 1500)));
        for (std::int64_t offset : {std::int64_t(0), std::int64_t(240), std::int64_t(540)}) {
          pings.push_back({start + offset, d, facilities[f].x, facilities[f].y});
        }
        per_facility_visits[facilities[f].id]++;
        realized_visits++;
        placed = true;
      }
    }

    std::sort(pings.begin(), pings.end(), [&](const Ping& a, const Ping& b) {
      if (a.t != b.t) return a.t < b.t;
      if (a.device != b.device) return a.device < b.device;
      return std::tie(a.x, a.y) < std::tie(b.x, b.y);
    });
    std::string out = "device_id,timestamp,x,y\n";
    for (const auto& p : pings) {
      out += devices[p.device].id + "," + iso_timestamp(p.t / 86400, p.t % 86400) + "," +
             format_shortest(p.x) + "," + format_shortest(p.y) + "\n";
    }
    write_text(out_dir / "pings.csv", out);
    files.push_back("pings.csv");
  }

  // Rasters: one value-noise base field per peril, thresholded per return
  // period so rarer events flood deeper and wider by construction.
  const struct {
    double aep;
    double thresh;
    const char* label;
  } kLevels[] = {
      {0.20, 0.85, "rp5"},   {0.10, 0.75, "rp10"},  {0.04, 0.65, "rp25"},
      {0.01, 0.55, "rp100"}, {0.002, 0.45, "rp500"},
  };
  const int dim = params.raster_dim;
  std::map<std::string, std::string> checksums;
  std::vector<std::string> raster_files;
  struct ManifestRow {
    int year;
    int level;
    const char* peril;
    std::string file;
  };
  std::vector<ManifestRow> manifest_rows;

  GridRaster grid;
  grid.ncols = dim;
  grid.nrows = dim;
  grid.xllcorner = 0.0;
  grid.yllcorner = 0.0;
  grid.cellsize = cell_eff;
  grid.nodata = -9999.0f;

  auto raster_to_text = [&](const GridRaster& r) {
    std::string out;
    out.reserve(static_cast<std::size_t>(r.nrows) * (r.ncols * 5 + 1) + 128);
    char buf[64];
    auto append_float = [&](float v) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out.append(buf, ptr);
    };
    out += "ncols " + std::to_string(r.ncols) + "\nnrows " + std::to_string(r.nrows) +
           "\nxllcorner " + format_shortest(r.xllcorner) + "\nyllcorner " +
           format_shortest(r.yllcorner) + "\ncellsize " + format_shortest(r.cellsize) +
           "\nNODATA_value ";
    append_float(r.nodata);
    out.push_back('\n');
    std::size_t cell = 0;
    for (int row = 0; row < r.nrows; ++row) {
      for (int col = 0; col < r.ncols; ++col) {
        if (col) out.push_back(' ');
        append_float(r.values[cell++]);
      }
      out.push_back('\n');
    }
    return out;
  };

  for (const char* peril : {"pluvial", "fluvial", "coastal"}) {
    std::vector<double> lattice(static_cast<std::size_t>(kNoiseLattice) * kNoiseLattice);
    for (auto& v : lattice) v = draw.real();
    std::vector<float> base(static_cast<std::size_t>(dim) * dim);
    const double extent = dim * cell_eff;
    for (int row = 0; row < dim; ++row) {
      const double y = (dim - row - 0.5) * cell_eff;
      const double v = y / extent * (kNoiseLattice - 1);
      for (int col = 0; col < dim; ++col) {
        const double x = (col + 0.5) * cell_eff;
        const double u = x / extent * (kNoiseLattice - 1);
        base[static_cast<std::size_t>(row) * dim + col] =
            static_cast<float>(sample_noise(lattice, u, v));
      }
    }
    for (const auto& level : kLevels) {
      std::vector<float> v2020(base.size());
      for (std::size_t i = 0; i < base.size(); ++i) {
        const double depth = std::max(0.0, (static_cast<double>(base[i]) - level.thresh)) *
                             kDepthScaleFt;
        v2020[i] = quantize2(depth);
      }
      auto set_border_nodata = [&](std::vector<float>& values) {
        for (int col = 0; col < dim; ++col) {
          values[col] = grid.nodata;
          values[static_cast<std::size_t>(dim - 1) * dim + col] = grid.nodata;
        }
        for (int row = 0; row < dim; ++row) {
          values[static_cast<std::size_t>(row) * dim] = grid.nodata;
          values[static_cast<std::size_t>(row) * dim + dim - 1] = grid.nodata;
        }
      };
      set_border_nodata(v2020);
      std::vector<float> v2060(v2020.size());
      for (std::size_t i = 0; i < v2020.size(); ++i) {
        v2060[i] = grid.is_nodata(v2020[i])
                       ? grid.nodata
                       : quantize2(static_cast<double>(v2020[i]) * params.depth_growth_2060);
      }
      for (const auto& [year, values] : {std::pair<int, std::vector<float>*>{2020, &v2020},
                                         std::pair<int, std::vector<float>*>{2060, &v2060}}) {
        grid.values = std::move(*values);
        const std::string name = "depth_" + std::to_string(year) + "_" + peril + "_" +
                                 level.label + ".asc";
        const std::string text = raster_to_text(grid);
        checksums[name] = to_hex(fnv1a64(text.data(), text.size()));
        write_text(out_dir / name, text);
        raster_files.push_back(name);
        manifest_rows.push_back(
            {year, static_cast<int>(&level - kLevels), peril, name});
        grid.values.clear();
      }
    }
  }

  {
    std::sort(manifest_rows.begin(), manifest_rows.end(),
              [](const ManifestRow& a, const ManifestRow& b) {
                if (a.year != b.year) return a.year < b.year;
                if (a.level != b.level) return a.level < b.level;
                return std::string_view(a.peril) < std::string_view(b.peril);
              });
    std::string out = "year,peril,aep,path\n";
    for (const auto& row : manifest_rows) {
      out += std::to_string(row.year) + "," + row.peril + "," +
             format_sig6(kLevels[row.level].aep) + "," + row.file + "\n";
    }
    write_text(out_dir / "manifest.csv", out);
    files.push_back("manifest.csv");
  }
  for (auto& name : raster_files) files.push_back(name);

  {
    ordered_json ledger;
    ledger["seed"] = params.seed;
    ledger["params"] = {{"n_zones", params.n_zones},
                        {"n_hospitals", params.n_hospitals},
                        {"n_groceries", params.n_groceries},
                        {"n_devices", params.n_devices},
                        {"visit_total", params.visit_total},
                        {"zipf_exponent", params.zipf_exponent},
                        {"raster_dim", params.raster_dim},
                        {"raster_cellsize", cell_eff},
                        {"depth_growth_2060", params.depth_growth_2060},
                        {"mode", params.pings_mode ? "pings" : "od"}};
    ledger["mesh"] = {{"rows", mesh.rows}, {"cols", mesh.cols}};
    ledger["region"] = {{"width_m", width}, {"height_m", height}};
    ledger["visit_total"] = realized_visits;
    ledger["per_zone_homes"] = ordered_json::object();
    for (const auto& [zone, count] : per_zone_homes) ledger["per_zone_homes"][zone] = count;
    ledger["per_facility_visits"] = ordered_json::object();
    for (const auto& [fac, count] : per_facility_visits) {
      ledger["per_facility_visits"][fac] = count;
    }
    ledger["raster_checksums"] = ordered_json::object();
    for (const auto& [name, sum] : checksums) ledger["raster_checksums"][name] = sum;
    write_text(out_dir / "ledger.json", ledger.dump(2) + "\n");
    files.push_back("ledger.json");
  }

  return files;
}

}  // namespace llc
