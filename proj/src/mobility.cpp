#include "llc/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace llc {

FacilityIndex::FacilityIndex(const std::vector<FacilityRecord>& facilities, double radius_m)
    : facilities_(facilities), radius_(radius_m) {
  if (!(radius_m > 0)) throw ValidationError("visit radius must be > 0");
  if (facilities.empty()) return;
  double min_x = facilities[0].location.x, max_x = min_x;
  double min_y = facilities[0].location.y, max_y = min_y;
  for (const auto& f : facilities) {
    min_x = std::min(min_x, f.location.x);
    max_x = std::max(max_x, f.location.x);
    min_y = std::min(min_y, f.location.y);
    max_y = std::max(max_y, f.location.y);
  }
  cell_ = radius_m;
  origin_x_ = min_x;
  origin_y_ = min_y;
  cols_ = static_cast<int>((max_x - min_x) / cell_) + 1;
  rows_ = static_cast<int>((max_y - min_y) / cell_) + 1;
  cells_.resize(static_cast<std::size_t>(cols_) * rows_);
  for (std::size_t i = 0; i < facilities.size(); ++i) {
    const auto& p = facilities[i].location;
    const int cx = static_cast<int>((p.x - origin_x_) / cell_);
    const int cy = static_cast<int>((p.y - origin_y_) / cell_);
    cells_[static_cast<std::size_t>(cy) * cols_ + cx].push_back(static_cast<std::uint32_t>(i));
  }
}

std::optional<std::size_t> FacilityIndex::nearest_within(PlanarPoint p) const {
  if (facilities_.empty()) return std::nullopt;
  const int cx = static_cast<int>(std::floor((p.x - origin_x_) / cell_));
  const int cy = static_cast<int>(std::floor((p.y - origin_y_) / cell_));
  const double r2 = radius_ * radius_;
  std::optional<std::size_t> best;
  double best_d2 = 0.0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int gx = cx + dx, gy = cy + dy;
      if (gx < 0 || gy < 0 || gx >= cols_ || gy >= rows_) continue;
      for (std::uint32_t i : cells_[static_cast<std::size_t>(gy) * cols_ + gx]) {
        const auto& q = facilities_[i].location;
        const double ddx = q.x - p.x, ddy = q.y - p.y;
        const double d2 = ddx * ddx + ddy * ddy;
        if (d2 > r2) continue;
        if (!best || d2 < best_d2 ||
            (d2 == best_d2 && facilities_[i].facility_id < facilities_[*best].facility_id)) {
          best = i;
          best_d2 = d2;
        }
      }
    }
  }
  return best;
}

namespace {

void sort_by_time(std::vector<PingRecord>& pings) {
  std::stable_sort(pings.begin(), pings.end(), [](const PingRecord& a, const PingRecord& b) {
    return a.timestamp_utc < b.timestamp_utc;
  });
}

}  // namespace

std::optional<std::string> infer_home_zone(std::vector<PingRecord> pings,
                                           const ZoneIndex& zones,
                                           const MobilityParams& params) {
  if (pings.size() < 2) return std::nullopt;
  sort_by_time(pings);
  std::vector<std::optional<std::string>> zone_of(pings.size());
  for (std::size_t i = 0; i < pings.size(); ++i) zone_of[i] = zones.locate(pings[i].location);

  const double gap_cap_s = params.gap_cap_hours * 3600.0;
  std::map<std::string, double> dwell;
  for (std::size_t i = 1; i < pings.size(); ++i) {
    const double gap = pings[i].timestamp_utc - pings[i - 1].timestamp_utc;
    if (gap > gap_cap_s) continue;
    if (!zone_of[i] || !zone_of[i - 1] || *zone_of[i] != *zone_of[i - 1]) continue;
    dwell[*zone_of[i]] += gap;
  }

  const double threshold_s = params.min_dwell_hours * 3600.0;
  std::optional<std::string> best;
  double best_dwell = 0.0;
  for (const auto& [zone, seconds] : dwell) {  // key order makes ties lexicographic
    if (seconds > threshold_s && (!best || seconds > best_dwell)) {
      best = zone;
      best_dwell = seconds;
    }
  }
  return best;
}

std::vector<VisitEvent> detect_visits(std::vector<PingRecord> pings,
                                      const std::vector<FacilityRecord>& facilities,
                                      const FacilityIndex& index,
                                      const MobilityParams& params) {
  std::vector<VisitEvent> events;
  if (pings.empty()) return events;
  sort_by_time(pings);

  const double floor_s = params.min_visit_dwell_min * 60.0;
  std::set<std::pair<std::string, std::int64_t>> seen;  // (facility, day)
  std::optional<std::size_t> current;
  double episode_start = 0.0, episode_end = 0.0;

  auto flush = [&]() {
    if (!current) return;
    if (episode_end - episode_start >= floor_s) {
      const auto day = static_cast<std::int64_t>(std::floor(episode_start / 86400.0));
      const std::string& facility = facilities[*current].facility_id;
      if (seen.emplace(facility, day).second) {
        events.push_back(VisitEvent{pings[0].device_id, facility, day});
      }
    }
    current = std::nullopt;
  };

  for (const auto& ping : pings) {
    const auto attributed = index.nearest_within(ping.location);
    if (attributed == current) {
      if (current) episode_end = ping.timestamp_utc;
      continue;
    }
    flush();
    if (attributed) {
      current = attributed;
      episode_start = episode_end = ping.timestamp_utc;
    }
  }
  flush();
  return events;
}

VisitationNetwork build_visitation_network(
    const std::vector<VisitEvent>& events,
    const std::map<std::string, std::string>& home_by_device, WarningLog& warnings) {
  VisitationNetwork network;
  for (const auto& event : events) {
    auto home = home_by_device.find(event.device_id);
    if (home == home_by_device.end()) {
      warnings.add("homeless_device_event",
                   "device '" + event.device_id + "' has no inferred home; event dropped");
      continue;
    }
    network.add_visits(home->second, event.facility_id, 1);
  }
  return network;
}

}  // namespace llc
