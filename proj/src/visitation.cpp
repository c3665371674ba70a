#include "llc/visitation.hpp"

#include <algorithm>

namespace llc {

std::uint32_t VisitationNetwork::intern_origin(std::string_view zone_id) {
  auto it = origin_lookup_.find(zone_id);
  if (it != origin_lookup_.end()) return it->second;
  auto index = static_cast<std::uint32_t>(origin_ids_.size());
  origin_ids_.emplace_back(zone_id);
  origin_lookup_.emplace(origin_ids_.back(), index);
  return index;
}

std::uint32_t VisitationNetwork::intern_facility(std::string_view facility_id) {
  auto it = facility_lookup_.find(facility_id);
  if (it != facility_lookup_.end()) return it->second;
  auto index = static_cast<std::uint32_t>(facility_ids_.size());
  facility_ids_.emplace_back(facility_id);
  facility_lookup_.emplace(facility_ids_.back(), index);
  return index;
}

void VisitationNetwork::add_visits(std::string_view origin_zone_id,
                                   std::string_view facility_id, std::uint64_t n) {
  if (n == 0) return;
  const std::uint32_t o = intern_origin(origin_zone_id);
  const std::uint32_t f = intern_facility(facility_id);
  counts_[pair_key(o, f)] += n;
  total_ += n;
}

std::uint64_t VisitationNetwork::visits(const std::string& origin_zone_id,
                                        const std::string& facility_id) const {
  auto oi = origin_lookup_.find(origin_zone_id);
  auto fi = facility_lookup_.find(facility_id);
  if (oi == origin_lookup_.end() || fi == facility_lookup_.end()) return 0;
  auto it = counts_.find(pair_key(oi->second, fi->second));
  return it == counts_.end() ? 0 : it->second;
}

std::vector<VisitationNetwork::Row> VisitationNetwork::sorted_rows() const {
  std::vector<Row> rows;
  rows.reserve(counts_.size());
  for (const auto& [key, count] : counts_) {
    const auto o = static_cast<std::uint32_t>(key >> 32);
    const auto f = static_cast<std::uint32_t>(key & 0xffffffffu);
    rows.push_back({origin_ids_[o], facility_ids_[f], count});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.origin_zone_id != b.origin_zone_id) return a.origin_zone_id < b.origin_zone_id;
    return a.facility_id < b.facility_id;
  });
  return rows;
}

std::vector<std::vector<VisitationNetwork::CatchmentEntry>>
VisitationNetwork::facility_columns() const {
  std::vector<std::vector<CatchmentEntry>> columns(facility_ids_.size());
  for (const auto& [key, count] : counts_) {
    const auto o = static_cast<std::uint32_t>(key >> 32);
    const auto f = static_cast<std::uint32_t>(key & 0xffffffffu);
    columns[f].push_back({o, count});
  }
  for (auto& column : columns) {
    std::sort(column.begin(), column.end(),
              [this](const CatchmentEntry& a, const CatchmentEntry& b) {
                return origin_ids_[a.origin_index] < origin_ids_[b.origin_index];
              });
  }
  return columns;
}

}  // namespace llc
