#include <doctest.h>

#include "llc/regional.hpp"

using namespace llc;

namespace {

CriticalityScore score(const std::string& id, double fc_raw, double fc_norm) {
  CriticalityScore s;
  s.facility_id = id;
  s.fc_raw = fc_raw;
  s.fc_norm = fc_norm;
  return s;
}

FacilityExposure exposure(const std::string& id, double fe2020, double fe2060) {
  FacilityExposure e;
  e.facility_id = id;
  e.fe[2020] = fe2020;
  e.fe[2060] = fe2060;
  return e;
}

RegionalIndex index_row(const std::string& zcta, int year, double vwme) {
  RegionalIndex r;
  r.zcta_id = zcta;
  r.year = year;
  r.vwme = vwme;
  return r;
}

}  // namespace

TEST_CASE("zcta aggregation routes visits through the crosswalk") {
  VisitationNetwork network;
  network.add_visits("Z1", "F1", 3);
  network.add_visits("Z2", "F1", 4);
  network.add_visits("Z3", "F2", 5);
  network.add_visits("Zx", "F1", 99);  // not in the crosswalk
  CrosswalkTable crosswalk;
  crosswalk.zone_to_zcta = {{"Z1", "C1"}, {"Z2", "C1"}, {"Z3", "C2"}};
  WarningLog log;
  const ZctaVisitTable table = zcta_visits(network, crosswalk, log);
  CHECK(table.visits.at("C1").at("F1") == 7);
  CHECK(table.visits.at("C2").at("F2") == 5);
  CHECK(table.visits.size() == 2);
  CHECK(log.count("unmapped_origin_zone") == 1);
}

TEST_CASE("weighted mean exposure matches the hand-computed value") {
  const std::map<std::string, std::uint64_t> weights = {{"F1", 1}, {"F2", 3}};
  const std::map<std::string, double> fc = {{"F1", 1.0}, {"F2", 1.0}};
  const std::map<std::string, double> fe = {{"F1", 1.0}, {"F2", 4.0}};
  const auto index = vwme_index("C1", 2020, weights, fc, fe);
  REQUIRE(index);
  CHECK(index->vwme == 3.25);  // (1*1*1 + 3*1*4) / 4
  CHECK(index->visit_weight_total == 4);
  CHECK(index->facility_count == 2);
}

TEST_CASE("zero-weight regions produce no index") {
  const std::map<std::string, std::uint64_t> weights = {{"F1", 0}};
  CHECK_FALSE(vwme_index("C1", 2020, weights, {{"F1", 1.0}}, {{"F1", 1.0}}));
  CHECK_FALSE(vwme_index("C1", 2020, {}, {}, {}));
}

TEST_CASE("positively weighted facilities must have scores and exposures") {
  const std::map<std::string, std::uint64_t> weights = {{"F1", 2}};
  CHECK_THROWS_WITH_AS(vwme_index("C1", 2020, weights, {}, {{"F1", 1.0}}),
                       doctest::Contains("no criticality score"), ValidationError);
  CHECK_THROWS_WITH_AS(vwme_index("C1", 2020, weights, {{"F1", 1.0}}, {}),
                       doctest::Contains("no exposure for year 2020"), ValidationError);
}

TEST_CASE("regional indices cover both years and honor membership and fc choice") {
  ZctaVisitTable table;
  table.visits["C1"] = {{"F1", 1}, {"F2", 3}};
  const std::vector<CriticalityScore> scores = {score("F1", 10.0, 1.0),
                                                score("F2", 20.0, 1.0)};
  const std::vector<FacilityExposure> exposures = {exposure("F1", 1.0, 2.0),
                                                   exposure("F2", 4.0, 8.0)};
  RegionalOptions behavioral;
  const auto indices = compute_regional_indices(table, scores, exposures, behavioral, {});
  REQUIRE(indices.size() == 2);
  CHECK(indices[0].year == 2020);
  CHECK(indices[0].vwme == 3.25);
  CHECK(indices[1].year == 2060);
  CHECK(indices[1].vwme == 6.5);

  RegionalOptions raw = behavioral;
  raw.use_fc_raw = true;
  const auto raw_indices = compute_regional_indices(table, scores, exposures, raw, {});
  CHECK(raw_indices[0].vwme == (1 * 10.0 * 1.0 + 3 * 20.0 * 4.0) / 4.0);

  RegionalOptions contained = behavioral;
  contained.membership = VwmeMembership::containment;
  // Only F1 physically sits in C1; F2 is elsewhere.
  const std::map<std::string, std::string> facility_zcta = {{"F1", "C1"}, {"F2", "C9"}};
  const auto inside = compute_regional_indices(table, scores, exposures, contained,
                                               facility_zcta);
  REQUIRE(inside.size() == 2);
  CHECK(inside[0].vwme == 1.0);  // F1 only: 1*1*1 / 1
  CHECK(inside[0].facility_count == 1);
}

TEST_CASE("regional summary reproduces the two-decimal change arithmetic") {
  std::vector<RegionalIndex> indices = {
      index_row("C1", 2020, 10.0), index_row("C1", 2060, 18.0),
      index_row("C2", 2020, 14.42), index_row("C2", 2060, 22.92)};
  const RegionalSummary summary = regional_summary(indices);
  CHECK(summary.zcta_count == 2);
  CHECK(format_fixed(summary.mean_2020, 2) == "12.21");
  CHECK(format_fixed(summary.mean_2060, 2) == "20.46");
  CHECK(format_fixed(summary.delta_mean, 2) == "8.25");
  REQUIRE(summary.pct_change_mean);
  CHECK(format_fixed(*summary.pct_change_mean, 2) == "67.57");
  CHECK(format_fixed(round_decimals(*summary.pct_change_mean, 1), 1) == "67.6");
}

TEST_CASE("above-mean counts change as expected across scenario years") {
  std::vector<RegionalIndex> indices;
  for (int i = 0; i < 100; ++i) {
    const std::string zcta = "C" + std::to_string(1000 + i);
    indices.push_back(index_row(zcta, 2020, i < 48 ? 2.0 : 1.0));
    indices.push_back(index_row(zcta, 2060, i < 60 ? 2.0 : 1.0));
  }
  const RegionalSummary summary = regional_summary(indices);
  CHECK(summary.above_mean_2020 == 48);  // mean 1.48, strictly above
  CHECK(summary.above_mean_2060 == 60);  // mean 1.6
  CHECK(summary.delta_above == 12);
  REQUIRE(summary.pct_change_above);
  CHECK(format_fixed(*summary.pct_change_above, 2) == "25.00");
}

TEST_CASE("summary rejects incomplete year coverage and zero baselines drop percents") {
  CHECK_THROWS_AS(regional_summary({}), ValidationError);
  CHECK_THROWS_AS(regional_summary({index_row("C1", 2020, 1.0)}), ValidationError);
  const RegionalSummary zero = regional_summary(
      {index_row("C1", 2020, 0.0), index_row("C1", 2060, 1.0)});
  CHECK_FALSE(zero.pct_change_mean);
  CHECK_FALSE(zero.pct_change_above);
  CHECK(zero.delta_mean == 1.0);
}
