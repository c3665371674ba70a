#include "llc/config.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace llc {

namespace {

// Accepts both plain key=value files and run_metadata.json: a leading '{'
// switches to JSON, where the flat keys plus the "inputs"/"config" objects
// become option values.
class FlexibleConfig : public CLI::ConfigBase {
public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    int c = input.peek();
    while (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      input.get();
      c = input.peek();
    }
    if (c != '{') return CLI::ConfigBase::from_config(input);

    nlohmann::json root;
    try {
      root = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::FileError(std::string("config JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    auto add = [&](const std::string& key, const nlohmann::json& value) {
      if (value.is_object() || value.is_array() || value.is_null()) return;
      CLI::ConfigItem item;
      item.name = key;
      item.inputs.push_back(value.is_string() ? value.get<std::string>() : value.dump());
      items.push_back(std::move(item));
    };
    for (const auto& [key, value] : root.items()) {
      if (key == "inputs" || key == "config") {
        for (const auto& [k, v] : value.items()) add(k, v);
      } else if (key == "tool" || key == "version" || key == "subcommand" ||
                 key == "warnings" || key == "outputs" || key == "notes") {
        continue;
      } else {
        add(key, value);
      }
    }
    return items;
  }
};

void add_options(CLI::App& app, RunConfig& cfg) {
  // Inputs. Snake_case primary names double as config-file and metadata keys.
  app.add_option("--zones", cfg.zones_path, "Zone polygons (GeoJSON FeatureCollection)");
  app.add_option("--facilities", cfg.facilities_path, "Facility table (CSV)");
  app.add_option("--pings", cfg.pings_path, "Device pings (CSV)");
  app.add_option("--od", cfg.od_path, "Origin-destination visit table (CSV)");
  app.add_option("--adjacency", cfg.adjacency_path, "Precomputed zone adjacency (CSV)");
  app.add_option("--manifest", cfg.manifest_path, "Flood raster manifest (CSV)");
  app.add_option("--crosswalk", cfg.crosswalk_path, "Zone-to-ZCTA crosswalk (CSV)");
  app.add_option("--scores", cfg.scores_path, "Precomputed criticality scores (CSV)");
  app.add_option("--fe", cfg.fe_path, "Precomputed facility exposure table (CSV)");
  app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();

  app.add_option("--min_dwell_hours,--min-dwell-hours", cfg.min_dwell_hours,
                 "Home dwell must strictly exceed this many hours")
      ->capture_default_str();
  app.add_option("--gap_cap_hours,--gap-cap-hours", cfg.gap_cap_hours,
                 "Max ping gap that still accrues dwell, hours")
      ->capture_default_str();
  app.add_option("--visit_radius_m,--visit-radius", cfg.visit_radius_m,
                 "Facility visit radius, meters")
      ->capture_default_str();
  app.add_option("--min_visit_dwell_min,--min-visit-dwell-min", cfg.min_visit_dwell_min,
                 "Visit episode span floor, minutes")
      ->capture_default_str();
  app.add_option("--buffer_m,--buffer", cfg.buffer_m, "Facility buffer radius, meters")
      ->capture_default_str();
  app.add_option("--norm", cfg.norm, "Normalization grouping: per-category or global")
      ->check(CLI::IsMember({"per-category", "global"}))
      ->capture_default_str();
  app.add_option("--thresholds", cfg.thresholds,
                 "Classification cutoffs as medium_min,high_min")
      ->capture_default_str();
  app.add_option("--aep_scale,--aep-scale", cfg.aep_scale,
                 "Multiplier applied to the AEP weights")
      ->capture_default_str();
  app.add_flag("--allow_custom_aep,--allow-custom-aep", cfg.allow_custom_aep,
               "Accept manifest AEPs outside the standard five");
  app.add_flag("--containment", cfg.containment,
               "Restrict the regional index to facilities located inside each ZCTA");
  app.add_flag("--fc_raw,--fc-raw", cfg.fc_raw,
               "Weight the regional index by raw instead of normalized criticality");
  app.add_option("--jobs", cfg.jobs, "Worker threads (0 = all available)")
      ->envname("LLC_JOBS")
      ->capture_default_str();

  app.add_option("--seed", cfg.synth.seed, "Scenario seed")->capture_default_str();
  app.add_option("--n_zones,--n-zones", cfg.synth.n_zones, "Scenario zone count")
      ->capture_default_str();
  app.add_option("--n_hospitals,--n-hospitals", cfg.synth.n_hospitals,
                 "Scenario hospital count")
      ->capture_default_str();
  app.add_option("--n_groceries,--n-groceries", cfg.synth.n_groceries,
                 "Scenario grocery count")
      ->capture_default_str();
  app.add_option("--n_devices,--n-devices", cfg.synth.n_devices, "Scenario device count")
      ->capture_default_str();
  app.add_option("--visit_total,--visit-total", cfg.synth.visit_total,
                 "Scenario visit count (exact in od mode)")
      ->capture_default_str();
  app.add_option("--zipf_exponent,--zipf", cfg.synth.zipf_exponent,
                 "Facility popularity skew")
      ->capture_default_str();
  app.add_option("--raster_dim,--raster-dim", cfg.synth.raster_dim,
                 "Scenario raster cells per axis")
      ->capture_default_str();
  app.add_option("--raster_cellsize,--raster-cellsize", cfg.synth.raster_cellsize,
                 "Scenario raster cell size, meters (0 = cover the region)")
      ->capture_default_str();
  app.add_option("--depth_growth_2060,--depth-growth", cfg.synth.depth_growth_2060,
                 "2060 depth multiplier (>= 1)")
      ->capture_default_str();
  app.add_flag("--emit_pings,--emit-pings", cfg.synth.pings_mode,
               "Scenario emits raw pings instead of an OD table");
}

}  // namespace

std::optional<RunConfig> parse_config(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"lifeline criticality and flood exposure pipeline", "llc"};
  app.require_subcommand(1);
  app.fallthrough();
  add_options(app, cfg);
  app.set_config("--config", "", "Key=value or run-metadata JSON file of defaults");
  app.config_formatter(std::make_shared<FlexibleConfig>());

  static const char* kSubcommands[] = {"adjacency", "mobility", "criticality", "hazard",
                                       "regional",  "synth",    "report",      "run-all"};
  static const char* kDescriptions[] = {
      "Build the zone contiguity graph",
      "Turn raw pings into an OD visit table",
      "Score facility criticality from an OD table",
      "Compute facility flood exposure from rasters",
      "Aggregate the regional exposure index",
      "Generate a synthetic input bundle",
      "Emit the full report bundle from inputs",
      "Run every stage end to end",
  };
  // Options all hang off the top-level app (fallthrough lets them appear after
  // the subcommand token), so subcommand help would otherwise list nothing.
  const auto shared_footer = [&app]() {
    std::string out = "Global options (before or after the subcommand):\n";
    const auto formatter = std::dynamic_pointer_cast<CLI::Formatter>(app.get_formatter());
    for (const CLI::Option* opt : app.get_options()) {
      if (opt->get_name() == "--help" || !formatter) continue;
      out += formatter->make_option(opt, false);
    }
    return out;
  };
  for (std::size_t i = 0; i < std::size(kSubcommands); ++i) {
    auto* sub = app.add_subcommand(kSubcommands[i], kDescriptions[i]);
    sub->fallthrough();
    sub->footer(shared_footer);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return std::nullopt;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  for (const auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  finalize_config(cfg);
  return cfg;
}

void finalize_config(RunConfig& cfg) {
  // thresholds: "medium_min,high_min", strictly increasing within [0, 1].
  {
    const auto comma = cfg.thresholds.find(',');
    double medium = -1.0, high = -1.0;
    bool ok = comma != std::string::npos;
    if (ok) {
      try {
        std::size_t used = 0;
        medium = std::stod(cfg.thresholds.substr(0, comma), &used);
        ok = used == comma;
        std::string rest = cfg.thresholds.substr(comma + 1);
        high = std::stod(rest, &used);
        ok = ok && used == rest.size();
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      throw UsageError("thresholds must be two comma-separated numbers, got '" +
                       cfg.thresholds + "'");
    }
    if (!(medium < high)) throw UsageError("thresholds must increase");
    if (medium < 0.0 || high > 1.0) throw UsageError("thresholds must lie within [0, 1]");
    cfg.class_thresholds.medium_min = medium;
    cfg.class_thresholds.high_min = high;
  }
  if (!(cfg.buffer_m > 0)) throw UsageError("buffer_m must be > 0");
  if (!(cfg.visit_radius_m > 0)) throw UsageError("visit_radius_m must be > 0");
  if (cfg.min_dwell_hours < 0) throw UsageError("min_dwell_hours must be >= 0");
  if (cfg.gap_cap_hours < 0) throw UsageError("gap_cap_hours must be >= 0");
  if (cfg.min_visit_dwell_min < 0) throw UsageError("min_visit_dwell_min must be >= 0");
  if (!(cfg.aep_scale > 0)) throw UsageError("aep_scale must be > 0");
  cfg.grouping = cfg.norm == "global" ? NormGrouping::global : NormGrouping::per_category;
  cfg.effective_jobs = cfg.jobs == 0 ? default_jobs() : cfg.jobs;

  if (cfg.subcommand == "run-all" && !cfg.pings_path.empty() && !cfg.od_path.empty()) {
    throw UsageError("give either --pings or --od, not both");
  }
}

}  // namespace llc
