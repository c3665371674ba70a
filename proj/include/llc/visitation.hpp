#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "llc/common.hpp"

namespace llc {

// Weighted bipartite origin-zone -> facility visit counts. Ids are interned
// to keep million-row networks compact; every stored count is >= 1.
class VisitationNetwork {
public:
  std::uint32_t intern_origin(std::string_view zone_id);
  std::uint32_t intern_facility(std::string_view facility_id);

  // Adds n visits (n >= 1); repeated pairs accumulate.
  void add_visits(std::string_view origin_zone_id, std::string_view facility_id,
                  std::uint64_t n);

  std::uint64_t visits(const std::string& origin_zone_id,
                       const std::string& facility_id) const;
  std::uint64_t total_visits() const { return total_; }
  std::size_t pair_count() const { return counts_.size(); }

  const std::vector<std::string>& origin_ids() const { return origin_ids_; }
  const std::vector<std::string>& facility_ids() const { return facility_ids_; }
  bool has_facility(const std::string& facility_id) const {
    return facility_lookup_.count(facility_id) != 0;
  }
  bool has_origin(const std::string& zone_id) const {
    return origin_lookup_.count(zone_id) != 0;
  }
  std::optional<std::uint32_t> facility_index(std::string_view facility_id) const {
    auto it = facility_lookup_.find(facility_id);
    if (it == facility_lookup_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::uint32_t> origin_index(std::string_view zone_id) const {
    auto it = origin_lookup_.find(zone_id);
    if (it == origin_lookup_.end()) return std::nullopt;
    return it->second;
  }

  struct Row {
    std::string_view origin_zone_id;
    std::string_view facility_id;
    std::uint64_t count;
  };
  // All entries sorted by (origin, facility); the canonical od.csv order.
  std::vector<Row> sorted_rows() const;

  struct CatchmentEntry {
    std::uint32_t origin_index;
    std::uint64_t count;
  };
  // Per-facility entries sorted by origin zone_id.
  std::vector<std::vector<CatchmentEntry>> facility_columns() const;

  const std::string& origin_name(std::uint32_t index) const { return origin_ids_[index]; }
  const std::string& facility_name(std::uint32_t index) const { return facility_ids_[index]; }

private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>()(s);
    }
  };

  std::vector<std::string> origin_ids_;
  std::vector<std::string> facility_ids_;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> origin_lookup_;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> facility_lookup_;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;  // (origin<<32|facility) -> n
  std::uint64_t total_ = 0;

  static std::uint64_t pair_key(std::uint32_t origin, std::uint32_t facility) {
    return (static_cast<std::uint64_t>(origin) << 32) | facility;
  }
};

}  // namespace llc
