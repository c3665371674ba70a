#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llc/common.hpp"
#include "llc/geometry.hpp"
#include "llc/ingest.hpp"
#include "llc/visitation.hpp"

namespace llc {

// One deduplicated facility visit: at most one per (device, facility, day).
struct VisitEvent {
  std::string device_id;
  std::string facility_id;
  std::int64_t day = 0;  // UTC days since the Unix epoch
};

struct MobilityParams {
  double min_dwell_hours = 24.0;     // home dwell must strictly exceed this
  double gap_cap_hours = 6.0;        // max ping gap that still accrues dwell
  double visit_radius_m = 50.0;
  double min_visit_dwell_min = 5.0;  // episode span floor
};

// Grid-bucketed nearest-facility-within-radius lookup over facility points.
class FacilityIndex {
public:
  FacilityIndex(const std::vector<FacilityRecord>& facilities, double radius_m);

  // Index into the facility vector of the nearest facility within the radius;
  // distance ties break toward the smaller facility_id.
  std::optional<std::size_t> nearest_within(PlanarPoint p) const;

private:
  const std::vector<FacilityRecord>& facilities_;
  double radius_ = 0.0;
  double origin_x_ = 0.0, origin_y_ = 0.0;
  double cell_ = 1.0;
  int cols_ = 0, rows_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
};

// Cumulative dwell per zone with a gap cap: the time between consecutive
// pings accrues to a zone only when both pings resolve to that zone and the
// gap does not exceed the cap. Returns the zone with maximal dwell if it
// strictly exceeds min_dwell_hours; lexicographic tie-break; none otherwise.
// Pings are sorted by timestamp internally if needed.
std::optional<std::string> infer_home_zone(std::vector<PingRecord> pings,
                                           const ZoneIndex& zones,
                                           const MobilityParams& params);

// Episode detection: maximal runs of consecutive pings attributed to the same
// facility (nearest within radius) spanning at least the dwell floor, then
// deduplicated to one event per (device, facility, UTC day of episode start).
std::vector<VisitEvent> detect_visits(std::vector<PingRecord> pings,
                                      const std::vector<FacilityRecord>& facilities,
                                      const FacilityIndex& index,
                                      const MobilityParams& params);

// v_{i,f} = events by devices homed in zone i visiting facility f. Events
// from devices with no inferred home are dropped with a counted warning.
VisitationNetwork build_visitation_network(
    const std::vector<VisitEvent>& events,
    const std::map<std::string, std::string>& home_by_device, WarningLog& warnings);

}  // namespace llc
