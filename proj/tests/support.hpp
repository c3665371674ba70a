#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "llc/common.hpp"

namespace testsupport {

// Fresh directory under the test working directory, wiped on construction
// so reruns start clean. Left in place afterwards for post-mortem looks.
class ScratchDir {
public:
  explicit ScratchDir(const std::string& name) : path_(std::filesystem::path("scratch") / name) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::uint64_t file_hash(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return llc::fnv1a64(text.data(), text.size());
}

// One GeoJSON feature per zone: axis-aligned squares given as
// (id, min_x, min_y, size) tuples.
struct SquareZone {
  std::string id;
  double x, y, size;
};

inline std::string zones_geojson(const std::vector<SquareZone>& squares) {
  std::ostringstream out;
  out << "{\"type\":\"FeatureCollection\",\"features\":[";
  for (std::size_t i = 0; i < squares.size(); ++i) {
    const auto& s = squares[i];
    if (i) out << ",";
    const double x2 = s.x + s.size, y2 = s.y + s.size;
    out << "{\"type\":\"Feature\",\"properties\":{\"zone_id\":\"" << s.id << "\"},"
        << "\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[[[" << s.x << "," << s.y
        << "],[" << x2 << "," << s.y << "],[" << x2 << "," << y2 << "],[" << s.x << "," << y2
        << "],[" << s.x << "," << s.y << "]]]}}";
  }
  out << "]}";
  return out.str();
}

}  // namespace testsupport
