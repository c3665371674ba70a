#include "llc/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "llc/mobility.hpp"
#include "llc/synth.hpp"

namespace llc {

namespace {

using nlohmann::ordered_json;

void require_input(const std::string& path, const std::string& flag,
                   const std::string& subcommand) {
  if (path.empty()) {
    throw UsageError(subcommand + " requires " + flag);
  }
}

std::optional<CriticalityLevel> parse_level(std::string_view s) {
  if (s == "low") return CriticalityLevel::low;
  if (s == "medium") return CriticalityLevel::medium;
  if (s == "high") return CriticalityLevel::high;
  return std::nullopt;
}

// Writes artifacts one by one; a failed write leaves a manifest of what had
// already landed next to the outputs.
class ArtifactSink {
public:
  ArtifactSink(std::filesystem::path out_dir, std::vector<std::string>& outputs)
      : out_dir_(std::move(out_dir)), outputs_(outputs) {}

  void write(const std::string& name,
             const std::function<void(const std::filesystem::path&)>& emit) {
    try {
      emit(out_dir_ / name);
    } catch (const WriteError& e) {
      write_partial_manifest(name, e.what());
      throw;
    }
    outputs_.push_back(name);
  }

private:
  void write_partial_manifest(const std::string& failed, const std::string& error) const {
    ordered_json manifest;
    manifest["completed"] = outputs_;
    manifest["failed"] = failed;
    manifest["error"] = error;
    std::ofstream out(out_dir_ / "partial_outputs.json", std::ios::binary);
    if (out) out << manifest.dump(2) << "\n";
  }

  std::filesystem::path out_dir_;
  std::vector<std::string>& outputs_;
};

struct Bundle {
  std::vector<ZoneGeometry> zones;
  std::vector<FacilityRecord> facilities;
  AdjacencyGraph adjacency;
  VisitationNetwork network;
  CriticalityResult crit;
  HazardResult hazard;
  CrosswalkTable crosswalk;
  ZctaVisitTable zcta_table;
  std::vector<RegionalIndex> indices;
  std::map<std::string, std::string> facility_zcta;  // containment mode only
};

VisitationNetwork mobility_stage(const RunConfig& cfg, const std::vector<ZoneGeometry>& zones,
                                 const std::vector<FacilityRecord>& facilities,
                                 WarningLog& warnings, ordered_json& notes) {
  const ZoneIndex zone_index(zones);
  const FacilityIndex facility_index(facilities, cfg.visit_radius_m);
  MobilityParams params;
  params.min_dwell_hours = cfg.min_dwell_hours;
  params.gap_cap_hours = cfg.gap_cap_hours;
  params.visit_radius_m = cfg.visit_radius_m;
  params.min_visit_dwell_min = cfg.min_visit_dwell_min;

  std::unordered_map<std::string, std::size_t> slot_of;
  std::vector<std::string> device_ids;
  std::vector<std::vector<PingRecord>> pings_by_device;
  {
    PingReader reader(cfg.pings_path);
    PingRecord record;
    while (reader.next(record)) {
      auto [it, inserted] = slot_of.try_emplace(record.device_id, device_ids.size());
      if (inserted) {
        device_ids.push_back(record.device_id);
        pings_by_device.emplace_back();
      }
      pings_by_device[it->second].push_back(record);
    }
  }

  std::vector<std::size_t> order(device_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return device_ids[a] < device_ids[b]; });

  struct DeviceResult {
    std::optional<std::string> home;
    std::vector<VisitEvent> events;
  };
  std::vector<DeviceResult> results(order.size());
  parallel_for(order.size(), cfg.effective_jobs, [&](std::size_t k) {
    auto& pings = pings_by_device[order[k]];
    results[k].home = infer_home_zone(pings, zone_index, params);
    results[k].events = detect_visits(std::move(pings), facilities, facility_index, params);
  });

  std::map<std::string, std::string> home_by_device;
  std::vector<VisitEvent> events;
  std::size_t homed = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::string& device = device_ids[order[k]];
    if (results[k].home) {
      home_by_device[device] = *results[k].home;
      homed++;
    }
    for (auto& e : results[k].events) events.push_back(std::move(e));
  }
  VisitationNetwork network = build_visitation_network(events, home_by_device, warnings);
  notes["mobility"] = {{"devices", device_ids.size()},
                       {"devices_homed", homed},
                       {"visit_events", events.size()},
                       {"events_dropped", warnings.count("homeless_device_event")}};
  return network;
}

// ---- artifact emitters ----

void write_scores_csv(const std::filesystem::path& path, const CriticalityResult& crit) {
  CsvWriter out(path);
  out.raw_line("facility_id,category,fc_raw,fc_norm,level,catchment_size");
  for (const auto& s : crit.scores) {
    out.raw_line(s.facility_id + "," + std::string(to_string(s.category)) + "," +
                 format_sig6(s.fc_raw) + "," + format_sig6(s.fc_norm) + "," +
                 std::string(to_string(s.level)) + "," + std::to_string(s.catchment_size));
  }
  out.close();
}

void write_category_summary_csv(const std::filesystem::path& path,
                                const std::vector<CategorySummary>& summaries) {
  CsvWriter out(path);
  out.raw_line("category,level,count,pct,mean_fc_norm");
  for (const auto& s : summaries) {
    const char* levels[3] = {"low", "medium", "high"};
    for (int i = 0; i < 3; ++i) {
      out.raw_line(std::string(to_string(s.category)) + "," + levels[i] + "," +
                   std::to_string(s.count[i]) + "," + format_fixed(s.pct[i], 1) + ",");
    }
    out.raw_line(std::string(to_string(s.category)) + ",all," + std::to_string(s.total) +
                 ",100.0," + format_sig6(s.mean_fc_norm));
  }
  out.close();
}

void write_exposure_csv(const std::filesystem::path& path,
                        const std::vector<FacilityExposure>& exposures) {
  CsvWriter out(path);
  out.raw_line("facility_id,year,aep,depth_ft,flooded");
  for (const auto& e : exposures) {
    // map order is (year asc, aep asc); emit most frequent return period first.
    std::vector<std::pair<std::pair<int, double>, DepthSample>> rows(e.depths.begin(),
                                                                     e.depths.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      if (a.first.first != b.first.first) return a.first.first < b.first.first;
      return a.first.second > b.first.second;
    });
    for (const auto& [key, sample] : rows) {
      out.raw_line(e.facility_id + "," + std::to_string(key.first) + "," +
                   format_sig6(key.second) + "," + format_sig6(sample.depth_ft) + "," +
                   (sample.flooded ? "true" : "false"));
    }
  }
  out.close();
}

void write_fe_csv(const std::filesystem::path& path,
                  const std::vector<FacilityExposure>& exposures) {
  CsvWriter out(path);
  out.raw_line("facility_id,fe_2020,fe_2060,delta");
  for (const auto& e : exposures) {
    out.raw_line(e.facility_id + "," + format_sig6(e.fe.at(2020)) + "," +
                 format_sig6(e.fe.at(2060)) + "," + format_sig6(e.delta));
  }
  out.close();
}

std::string return_period_label(double aep) {
  return "1-in-" + std::to_string(static_cast<long long>(std::llround(1.0 / aep)));
}

void write_exposure_summary_csv(const std::filesystem::path& path,
                                const std::vector<ExposureSummaryRow>& rows) {
  CsvWriter out(path);
  out.raw_line("year,aep,return_period,max_depth_ft,mean_depth_ft,pct_flooded");
  for (const auto& r : rows) {
    out.raw_line(std::to_string(r.year) + "," + format_sig6(r.aep) + "," +
                 return_period_label(r.aep) + "," + format_fixed(r.max_depth_ft, 2) + "," +
                 format_fixed(r.mean_depth_ft, 2) + "," + format_fixed(r.pct_flooded, 2));
  }
  out.close();
}

void write_vwme_csv(const std::filesystem::path& path,
                    const std::vector<RegionalIndex>& indices) {
  CsvWriter out(path);
  out.raw_line("zcta_id,year,vwme,visit_weight_total,facility_count");
  for (const auto& index : indices) {
    out.raw_line(index.zcta_id + "," + std::to_string(index.year) + "," +
                 format_sig6(index.vwme) + "," + std::to_string(index.visit_weight_total) +
                 "," + std::to_string(index.facility_count));
  }
  out.close();
}

void write_regional_summary_csv(const std::filesystem::path& path,
                                const RegionalSummary& summary) {
  CsvWriter out(path);
  out.raw_line("metric,value_2020,value_2060,delta,pct_change");
  out.raw_line("mean_vwme," + format_fixed(summary.mean_2020, 2) + "," +
               format_fixed(summary.mean_2060, 2) + "," + format_fixed(summary.delta_mean, 2) +
               "," +
               (summary.pct_change_mean ? format_fixed(*summary.pct_change_mean, 2) : ""));
  out.raw_line("zctas_above_mean," + std::to_string(summary.above_mean_2020) + "," +
               std::to_string(summary.above_mean_2060) + "," +
               std::to_string(summary.delta_above) + "," +
               (summary.pct_change_above ? format_fixed(*summary.pct_change_above, 2) : ""));
  out.close();
}

void dump_json(const std::filesystem::path& path, const ordered_json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open " + path.string() + " for writing");
  out << value.dump(2) << "\n";
  if (!out) throw WriteError("write failed for " + path.string());
}

void write_facilities_geojson(const std::filesystem::path& path, const Bundle& bundle) {
  std::map<std::string, const CriticalityScore*> score_of;
  for (const auto& s : bundle.crit.scores) score_of[s.facility_id] = &s;
  std::map<std::string, const FacilityExposure*> exposure_of;
  for (const auto& e : bundle.hazard.exposures) exposure_of[e.facility_id] = &e;

  std::vector<const FacilityRecord*> sorted;
  for (const auto& f : bundle.facilities) sorted.push_back(&f);
  std::sort(sorted.begin(), sorted.end(), [](const FacilityRecord* a, const FacilityRecord* b) {
    return a->facility_id < b->facility_id;
  });

  ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = ordered_json::array();
  for (const FacilityRecord* f : sorted) {
    ordered_json props;
    props["facility_id"] = f->facility_id;
    props["category"] = std::string(to_string(f->category));
    auto s = score_of.find(f->facility_id);
    if (s != score_of.end()) {
      props["fc_raw"] = s->second->fc_raw;
      props["fc_norm"] = s->second->fc_norm;
      props["level"] = std::string(to_string(s->second->level));
      props["catchment_size"] = s->second->catchment_size;
    } else {
      props["fc_raw"] = nullptr;
      props["fc_norm"] = nullptr;
      props["level"] = nullptr;
      props["catchment_size"] = nullptr;
    }
    auto e = exposure_of.find(f->facility_id);
    if (e != exposure_of.end()) {
      props["fe_2020"] = e->second->fe.at(2020);
      props["fe_2060"] = e->second->fe.at(2060);
      props["delta"] = e->second->delta;
    } else {
      props["fe_2020"] = nullptr;
      props["fe_2060"] = nullptr;
      props["delta"] = nullptr;
    }
    ordered_json feature;
    feature["type"] = "Feature";
    feature["properties"] = std::move(props);
    feature["geometry"] = {{"type", "Point"},
                           {"coordinates", {f->location.x, f->location.y}}};
    fc["features"].push_back(std::move(feature));
  }
  dump_json(path, fc);
}

void write_zctas_geojson(const std::filesystem::path& path, const Bundle& bundle) {
  // Member zones per ZCTA, sorted for stable geometry order.
  std::map<std::string, std::vector<const ZoneGeometry*>> members;
  {
    std::map<std::string, const ZoneGeometry*> zone_of;
    for (const auto& z : bundle.zones) zone_of[z.zone_id] = &z;
    for (const auto& [zone, zcta] : bundle.crosswalk.zone_to_zcta) {
      auto it = zone_of.find(zone);
      members[zcta];  // every crosswalk ZCTA gets a feature
      if (it != zone_of.end()) members[zcta].push_back(it->second);
    }
  }
  std::map<std::pair<std::string, int>, const RegionalIndex*> index_of;
  for (const auto& index : bundle.indices) {
    index_of[{index.zcta_id, index.year}] = &index;
  }

  ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = ordered_json::array();
  for (const auto& [zcta, zones] : members) {
    ordered_json props;
    props["zcta_id"] = zcta;
    auto i2020 = index_of.find({zcta, 2020});
    auto i2060 = index_of.find({zcta, 2060});
    props["vwme_2020"] = i2020 != index_of.end() ? ordered_json(i2020->second->vwme)
                                                 : ordered_json(nullptr);
    props["vwme_2060"] = i2060 != index_of.end() ? ordered_json(i2060->second->vwme)
                                                 : ordered_json(nullptr);
    props["delta"] = (i2020 != index_of.end() && i2060 != index_of.end())
                         ? ordered_json(i2060->second->vwme - i2020->second->vwme)
                         : ordered_json(nullptr);

    ordered_json geometry;
    if (zones.empty()) {
      geometry = nullptr;
    } else {
      geometry["type"] = "MultiPolygon";
      auto& coords = geometry["coordinates"] = ordered_json::array();
      for (const ZoneGeometry* zone : zones) {
        for (const auto& part : zone->parts) {
          ordered_json polygon = ordered_json::array();
          for (const auto& ring : part.rings) {
            ordered_json points = ordered_json::array();
            for (const auto& p : ring) points.push_back({p.x, p.y});
            polygon.push_back(std::move(points));
          }
          coords.push_back(std::move(polygon));
        }
      }
    }
    ordered_json feature;
    feature["type"] = "Feature";
    feature["properties"] = std::move(props);
    feature["geometry"] = std::move(geometry);
    fc["features"].push_back(std::move(feature));
  }
  dump_json(path, fc);
}

ordered_json config_echo(const RunConfig& cfg) {
  ordered_json config;
  config["out"] = cfg.out_dir;
  config["min_dwell_hours"] = cfg.min_dwell_hours;
  config["gap_cap_hours"] = cfg.gap_cap_hours;
  config["visit_radius_m"] = cfg.visit_radius_m;
  config["min_visit_dwell_min"] = cfg.min_visit_dwell_min;
  config["buffer_m"] = cfg.buffer_m;
  config["norm"] = cfg.norm;
  config["thresholds"] = cfg.thresholds;
  config["aep_scale"] = cfg.aep_scale;
  config["allow_custom_aep"] = cfg.allow_custom_aep;
  config["containment"] = cfg.containment;
  config["fc_raw"] = cfg.fc_raw;
  config["jobs"] = cfg.effective_jobs;
  config["seed"] = cfg.synth.seed;
  config["n_zones"] = cfg.synth.n_zones;
  config["n_hospitals"] = cfg.synth.n_hospitals;
  config["n_groceries"] = cfg.synth.n_groceries;
  config["n_devices"] = cfg.synth.n_devices;
  config["visit_total"] = cfg.synth.visit_total;
  config["zipf_exponent"] = cfg.synth.zipf_exponent;
  config["raster_dim"] = cfg.synth.raster_dim;
  config["raster_cellsize"] = cfg.synth.raster_cellsize;
  config["depth_growth_2060"] = cfg.synth.depth_growth_2060;
  config["emit_pings"] = cfg.synth.pings_mode;
  return config;
}

void write_run_metadata(const std::filesystem::path& out_dir, const RunConfig& cfg,
                        const WarningLog& warnings, const std::vector<std::string>& outputs,
                        const ordered_json& notes) {
  ordered_json meta;
  meta["tool"] = "llc";
  meta["version"] = kToolVersion;
  meta["subcommand"] = cfg.subcommand;
  ordered_json inputs = ordered_json::object();
  auto put = [&](const char* key, const std::string& value) {
    if (!value.empty()) inputs[key] = value;
  };
  put("zones", cfg.zones_path);
  put("facilities", cfg.facilities_path);
  put("pings", cfg.pings_path);
  put("od", cfg.od_path);
  put("adjacency", cfg.adjacency_path);
  put("manifest", cfg.manifest_path);
  put("crosswalk", cfg.crosswalk_path);
  put("scores", cfg.scores_path);
  put("fe", cfg.fe_path);
  meta["inputs"] = std::move(inputs);
  meta["config"] = config_echo(cfg);
  ordered_json warn = ordered_json::object();
  for (const auto& [code, count] : warnings.counts()) warn[code] = count;
  meta["warnings"] = std::move(warn);
  meta["outputs"] = outputs;
  if (!notes.empty()) meta["notes"] = notes;
  dump_json(out_dir / "run_metadata.json", meta);
}

void log_warnings(const WarningLog& warnings) {
  for (const auto& [code, count] : warnings.counts()) {
    std::cerr << "[llc] warning " << code << ": " << count << " occurrence"
              << (count == 1 ? "" : "s") << "\n";
  }
}

std::map<std::string, std::string> locate_facility_zctas(
    const std::vector<FacilityRecord>& facilities, const std::vector<ZoneGeometry>& zones,
    const CrosswalkTable& crosswalk, WarningLog& warnings) {
  std::map<std::string, std::string> out;
  const ZoneIndex index(zones);
  for (const auto& f : facilities) {
    auto zone = index.locate(f.location, nullptr);
    if (!zone) {
      warnings.add("facility_outside_zones",
                   "facility '" + f.facility_id + "' lies outside every zone");
      continue;
    }
    auto zcta = crosswalk.zcta_for(*zone);
    if (!zcta) {
      warnings.add("facility_zone_unmapped", "facility '" + f.facility_id + "' sits in zone '" +
                                                 *zone + "' which has no ZCTA mapping");
      continue;
    }
    out[f.facility_id] = *zcta;
  }
  return out;
}

// ---- stage drivers ----

void stage_regional_outputs(const Bundle& bundle, ArtifactSink& sink) {
  sink.write("vwme.csv", [&](const std::filesystem::path& p) { write_vwme_csv(p, bundle.indices); });
  const RegionalSummary summary = regional_summary(bundle.indices);
  sink.write("regional_summary.csv", [&](const std::filesystem::path& p) {
    write_regional_summary_csv(p, summary);
  });
}

void add_delta_notes(const HazardResult& hazard, ordered_json& notes) {
  ordered_json stats = ordered_json::array();
  for (const auto& s : hazard.delta_stats) {
    stats.push_back({{"category", std::string(to_string(s.category))},
                     {"facilities", s.count},
                     {"share_delta_positive", s.share_positive},
                     {"median_delta", s.median_delta}});
  }
  notes["delta_stats"] = std::move(stats);
}

void add_criticality_notes(const CriticalityResult& crit, ordered_json& notes) {
  if (!crit.empty_catchment.empty()) {
    notes["empty_catchment"] = crit.empty_catchment;
  }
}

Bundle compute_bundle(const RunConfig& cfg, WarningLog& warnings, ArtifactSink& sink,
                      ordered_json& notes, bool write_stage_artifacts) {
  Bundle bundle;
  bundle.zones = load_zones(cfg.zones_path, warnings);
  bundle.facilities = load_facilities(cfg.facilities_path, warnings);
  if (!cfg.adjacency_path.empty()) {
    bundle.adjacency = load_adjacency(cfg.adjacency_path);
  } else {
    bundle.adjacency = build_contiguity_graph(bundle.zones);
  }
  if (write_stage_artifacts) {
    sink.write("adjacency.csv", [&](const std::filesystem::path& p) {
      write_adjacency(bundle.adjacency, p);
    });
  }

  if (!cfg.pings_path.empty()) {
    bundle.network = mobility_stage(cfg, bundle.zones, bundle.facilities, warnings, notes);
    if (write_stage_artifacts) {
      sink.write("od.csv",
                 [&](const std::filesystem::path& p) { write_od(bundle.network, p); });
    }
  } else {
    bundle.network = load_od(cfg.od_path, warnings);
  }
  bundle.network = filter_network_to_facilities(bundle.network, bundle.facilities, warnings);

  bundle.crit = score_facilities(bundle.network, bundle.facilities, bundle.adjacency,
                                 cfg.grouping, cfg.class_thresholds, warnings,
                                 cfg.effective_jobs);
  add_criticality_notes(bundle.crit, notes);

  const auto manifest = load_manifest(cfg.manifest_path, cfg.allow_custom_aep, warnings);
  bundle.hazard = compute_exposures(bundle.facilities, manifest, cfg.buffer_m, cfg.aep_scale,
                                    warnings, cfg.effective_jobs);
  add_delta_notes(bundle.hazard, notes);

  bundle.crosswalk = load_crosswalk(cfg.crosswalk_path, warnings);
  bundle.zcta_table = zcta_visits(bundle.network, bundle.crosswalk, warnings);
  RegionalOptions options;
  options.membership =
      cfg.containment ? VwmeMembership::containment : VwmeMembership::behavioral;
  options.use_fc_raw = cfg.fc_raw;
  if (cfg.containment) {
    bundle.facility_zcta =
        locate_facility_zctas(bundle.facilities, bundle.zones, bundle.crosswalk, warnings);
  }
  bundle.indices = compute_regional_indices(bundle.zcta_table, bundle.crit.scores,
                                            bundle.hazard.exposures, options,
                                            bundle.facility_zcta);
  return bundle;
}

void emit_report_bundle(const Bundle& bundle, ArtifactSink& sink) {
  sink.write("scores.csv",
             [&](const std::filesystem::path& p) { write_scores_csv(p, bundle.crit); });
  sink.write("category_summary.csv", [&](const std::filesystem::path& p) {
    write_category_summary_csv(p, category_summary(bundle.crit.scores));
  });
  sink.write("exposure.csv", [&](const std::filesystem::path& p) {
    write_exposure_csv(p, bundle.hazard.exposures);
  });
  sink.write("fe.csv", [&](const std::filesystem::path& p) {
    write_fe_csv(p, bundle.hazard.exposures);
  });
  sink.write("exposure_summary.csv", [&](const std::filesystem::path& p) {
    write_exposure_summary_csv(p, bundle.hazard.summary_rows);
  });
  stage_regional_outputs(bundle, sink);
  sink.write("facilities.geojson", [&](const std::filesystem::path& p) {
    write_facilities_geojson(p, bundle);
  });
  sink.write("zctas.geojson",
             [&](const std::filesystem::path& p) { write_zctas_geojson(p, bundle); });
}

}  // namespace

std::vector<CriticalityScore> load_scores_csv(const std::filesystem::path& path) {
  CsvReader reader(path);
  reader.expect_header({"facility_id", "category", "fc_raw", "fc_norm", "level",
                        "catchment_size"});
  std::vector<CriticalityScore> scores;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 6) {
      reader.fail("expected 6 fields, got " + std::to_string(fields.size()));
    }
    CriticalityScore s;
    s.facility_id = std::string(fields[0]);
    auto category = parse_category(fields[1]);
    if (!category) reader.fail("unknown category '" + std::string(fields[1]) + "'");
    s.category = *category;
    std::int64_t catchment = 0;
    if (!parse_double_field(fields[2], s.fc_raw) || !parse_double_field(fields[3], s.fc_norm) ||
        !parse_int_field(fields[5], catchment) || catchment < 1) {
      reader.fail("malformed numeric field");
    }
    auto level = parse_level(fields[4]);
    if (!level) reader.fail("unknown level '" + std::string(fields[4]) + "'");
    s.level = *level;
    s.catchment_size = static_cast<std::uint64_t>(catchment);
    scores.push_back(std::move(s));
  }
  return scores;
}

std::vector<FacilityExposure> load_fe_csv(const std::filesystem::path& path) {
  CsvReader reader(path);
  reader.expect_header({"facility_id", "fe_2020", "fe_2060", "delta"});
  std::vector<FacilityExposure> exposures;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 4) {
      reader.fail("expected 4 fields, got " + std::to_string(fields.size()));
    }
    FacilityExposure e;
    e.facility_id = std::string(fields[0]);
    double fe2020 = 0, fe2060 = 0;
    if (!parse_double_field(fields[1], fe2020) || !parse_double_field(fields[2], fe2060) ||
        !parse_double_field(fields[3], e.delta)) {
      reader.fail("malformed numeric field");
    }
    e.fe[2020] = fe2020;
    e.fe[2060] = fe2060;
    exposures.push_back(std::move(e));
  }
  return exposures;
}

VisitationNetwork filter_network_to_facilities(const VisitationNetwork& network,
                                               const std::vector<FacilityRecord>& facilities,
                                               WarningLog& warnings) {
  std::unordered_set<std::string> known;
  for (const auto& f : facilities) known.insert(f.facility_id);
  bool all_known = true;
  for (const auto& id : network.facility_ids()) {
    if (!known.count(id)) {
      all_known = false;
      break;
    }
  }
  if (all_known) return network;
  VisitationNetwork filtered;
  for (const auto& row : network.sorted_rows()) {
    if (known.count(std::string(row.facility_id))) {
      filtered.add_visits(row.origin_zone_id, row.facility_id, row.count);
    } else {
      warnings.add("od_unknown_facility", "facility '" + std::string(row.facility_id) +
                                              "' is not in the facility table; row dropped");
    }
  }
  return filtered;
}

HazardResult compute_exposures(const std::vector<FacilityRecord>& facilities,
                               const std::vector<RasterManifestEntry>& manifest,
                               double buffer_m, double aep_scale, WarningLog& warnings,
                               unsigned jobs) {
  if (manifest.empty()) throw ValidationError("raster manifest has no layers");
  std::map<std::pair<int, double>, std::vector<const RasterManifestEntry*>> groups;
  for (const auto& entry : manifest) groups[{entry.year, entry.aep}].push_back(&entry);

  std::vector<const FacilityRecord*> sorted;
  for (const auto& f : facilities) sorted.push_back(&f);
  std::sort(sorted.begin(), sorted.end(), [](const FacilityRecord* a, const FacilityRecord* b) {
    return a->facility_id < b->facility_id;
  });

  HazardResult result;
  result.exposures.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    result.exposures[i].facility_id = sorted[i]->facility_id;
  }

  for (const auto& [key, entries] : groups) {
    GridRaster combined;
    {
      std::vector<GridRaster> rasters;
      std::vector<const GridRaster*> pointers;
      std::vector<std::string> labels;
      rasters.reserve(entries.size());
      for (const auto* entry : entries) {
        rasters.push_back(load_raster(entry->path));
        labels.push_back(entry->path.string());
      }
      for (const auto& r : rasters) pointers.push_back(&r);
      combined = combine_perils(pointers, labels);
    }
    std::vector<DepthSample> samples(sorted.size());
    parallel_for(sorted.size(), jobs, [&](std::size_t i) {
      samples[i] = facility_mean_depth(combined, sorted[i]->location, buffer_m);
    });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (samples[i].cells == 0) {
        warnings.add("buffer_no_coverage",
                     "facility '" + sorted[i]->facility_id + "': buffer sampled no cells of " +
                         std::to_string(key.first) + " aep " + format_sig6(key.second));
      }
      result.exposures[i].depths[key] = samples[i];
    }
  }

  for (const auto& [key, entries] : groups) {
    result.weights_by_year[key.first][key.second] = key.second * aep_scale;
  }
  for (auto& exposure : result.exposures) {
    for (const auto& [year, weights] : result.weights_by_year) {
      exposure.fe[year] = aep_weighted_exposure(exposure.depths_for_year(year), weights);
    }
  }

  std::map<std::string, FacilityCategory> category_of;
  for (const auto& f : facilities) category_of[f.facility_id] = f.category;
  result.delta_stats = delta_exposure(result.exposures, category_of);
  result.summary_rows = exposure_summary(result.exposures);
  return result;
}

void run_pipeline(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw WriteError("cannot create output directory " + cfg.out_dir);

  WarningLog warnings;
  std::vector<std::string> outputs;
  ArtifactSink sink(cfg.out_dir, outputs);
  ordered_json notes = ordered_json::object();
  const std::string& sub = cfg.subcommand;

  if (sub == "synth") {
    for (auto& f : generate_scenario(cfg.synth, cfg.out_dir)) outputs.push_back(std::move(f));
  } else if (sub == "adjacency") {
    require_input(cfg.zones_path, "--zones", sub);
    const auto zones = load_zones(cfg.zones_path, warnings);
    const auto graph = build_contiguity_graph(zones);
    sink.write("adjacency.csv",
               [&](const std::filesystem::path& p) { write_adjacency(graph, p); });
    std::size_t edges = 0;
    for (const auto& [zone, neighbors] : graph.neighbors) edges += neighbors.size();
    notes["adjacency"] = {{"zones", zones.size()}, {"edges", edges / 2}};
  } else if (sub == "mobility") {
    require_input(cfg.zones_path, "--zones", sub);
    require_input(cfg.facilities_path, "--facilities", sub);
    require_input(cfg.pings_path, "--pings", sub);
    const auto zones = load_zones(cfg.zones_path, warnings);
    const auto facilities = load_facilities(cfg.facilities_path, warnings);
    const auto network = mobility_stage(cfg, zones, facilities, warnings, notes);
    sink.write("od.csv", [&](const std::filesystem::path& p) { write_od(network, p); });
  } else if (sub == "criticality") {
    require_input(cfg.od_path, "--od", sub);
    require_input(cfg.facilities_path, "--facilities", sub);
    if (cfg.adjacency_path.empty() && cfg.zones_path.empty()) {
      throw UsageError("criticality requires --adjacency or --zones");
    }
    const auto facilities = load_facilities(cfg.facilities_path, warnings);
    AdjacencyGraph adjacency;
    if (!cfg.adjacency_path.empty()) {
      adjacency = load_adjacency(cfg.adjacency_path);
    } else {
      adjacency = build_contiguity_graph(load_zones(cfg.zones_path, warnings));
    }
    auto network = load_od(cfg.od_path, warnings);
    network = filter_network_to_facilities(network, facilities, warnings);
    const auto crit = score_facilities(network, facilities, adjacency, cfg.grouping,
                                       cfg.class_thresholds, warnings, cfg.effective_jobs);
    add_criticality_notes(crit, notes);
    sink.write("scores.csv",
               [&](const std::filesystem::path& p) { write_scores_csv(p, crit); });
    sink.write("category_summary.csv", [&](const std::filesystem::path& p) {
      write_category_summary_csv(p, category_summary(crit.scores));
    });
  } else if (sub == "hazard") {
    require_input(cfg.facilities_path, "--facilities", sub);
    require_input(cfg.manifest_path, "--manifest", sub);
    const auto facilities = load_facilities(cfg.facilities_path, warnings);
    const auto manifest = load_manifest(cfg.manifest_path, cfg.allow_custom_aep, warnings);
    const auto hazard = compute_exposures(facilities, manifest, cfg.buffer_m, cfg.aep_scale,
                                          warnings, cfg.effective_jobs);
    add_delta_notes(hazard, notes);
    sink.write("exposure.csv", [&](const std::filesystem::path& p) {
      write_exposure_csv(p, hazard.exposures);
    });
    sink.write("fe.csv",
               [&](const std::filesystem::path& p) { write_fe_csv(p, hazard.exposures); });
    sink.write("exposure_summary.csv", [&](const std::filesystem::path& p) {
      write_exposure_summary_csv(p, hazard.summary_rows);
    });
  } else if (sub == "regional") {
    require_input(cfg.od_path, "--od", sub);
    require_input(cfg.crosswalk_path, "--crosswalk", sub);
    require_input(cfg.scores_path, "--scores", sub);
    require_input(cfg.fe_path, "--fe", sub);
    if (cfg.containment && (cfg.zones_path.empty() || cfg.facilities_path.empty())) {
      throw UsageError("--containment requires --zones and --facilities");
    }
    auto network = load_od(cfg.od_path, warnings);
    const auto crosswalk = load_crosswalk(cfg.crosswalk_path, warnings);
    const auto scores = load_scores_csv(cfg.scores_path);
    auto exposures = load_fe_csv(cfg.fe_path);
    const auto table = zcta_visits(network, crosswalk, warnings);
    RegionalOptions options;
    options.membership =
        cfg.containment ? VwmeMembership::containment : VwmeMembership::behavioral;
    options.use_fc_raw = cfg.fc_raw;
    std::map<std::string, std::string> facility_zcta;
    if (cfg.containment) {
      const auto zones = load_zones(cfg.zones_path, warnings);
      const auto facilities = load_facilities(cfg.facilities_path, warnings);
      facility_zcta = locate_facility_zctas(facilities, zones, crosswalk, warnings);
    }
    Bundle bundle;
    bundle.indices = compute_regional_indices(table, scores, exposures, options, facility_zcta);
    stage_regional_outputs(bundle, sink);
  } else if (sub == "report" || sub == "run-all") {
    require_input(cfg.zones_path, "--zones", sub);
    require_input(cfg.facilities_path, "--facilities", sub);
    require_input(cfg.manifest_path, "--manifest", sub);
    require_input(cfg.crosswalk_path, "--crosswalk", sub);
    if (cfg.pings_path.empty() && cfg.od_path.empty()) {
      throw UsageError(sub + " requires --pings or --od");
    }
    const Bundle bundle =
        compute_bundle(cfg, warnings, sink, notes, /*write_stage_artifacts=*/sub == "run-all");
    emit_report_bundle(bundle, sink);
  } else {
    throw UsageError("unknown subcommand '" + sub + "'");
  }

  write_run_metadata(cfg.out_dir, cfg, warnings, outputs, notes);
  log_warnings(warnings);
  std::cerr << "[llc] " << sub << ": wrote " << outputs.size() << " artifact"
            << (outputs.size() == 1 ? "" : "s") << " + run_metadata.json to " << cfg.out_dir
            << "\n";
}

}  // namespace llc
