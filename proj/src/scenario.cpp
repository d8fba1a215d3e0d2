#include "aralab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "aralab/coverage.hpp"
#include "aralab/csv.hpp"
#include "aralab/error.hpp"
#include "aralab/fsoc.hpp"
#include "aralab/orchestrator.hpp"
#include "aralab/power.hpp"
#include "aralab/radio_channel.hpp"
#include "aralab/spectrum.hpp"
#include "aralab/stack_delay.hpp"
#include "aralab/streaming.hpp"
#include "aralab/weather.hpp"
#include "aralab/xhaul.hpp"

#ifndef ARALAB_VERSION
#define ARALAB_VERSION "0.0.0"
#endif

namespace aralab {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names = {"capacity_profile", "coverage_map", "mimo_sets",
                                                 "xhaul_weather",    "fsoc_align",   "delay_cdf",
                                                 "ltl_qoe",          "orchestrator_fuzz", "telemetry"};
  return names;
}

namespace {

std::string resolve_input(const std::string& ref, const std::string& base_dir) {
  if (ref.empty()) return ref;
  const fs::path p(ref);
  if (p.is_absolute()) return ref;
  if (!base_dir.empty() && fs::exists(fs::path(base_dir) / p)) return (fs::path(base_dir) / p).string();
  return data_path(ref);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario parse error at " + describe_json_position(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario: top-level object expected");
  ScenarioConfig c;
  c.source_text = text;
  c.base_dir = base_dir;
  try {
    c.pipeline = doc.at("pipeline").get<std::string>();
    c.name = doc.value("name", c.pipeline);
    c.seed = doc.value("seed", std::uint64_t{1});
    c.catalog_path = resolve_input(doc.value("catalog", std::string()), base_dir);
    c.topology_path = resolve_input(doc.value("topology", std::string()), base_dir);
    c.params = doc.value("params", json::object());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  if (c.name.empty() || c.name.find('/') != std::string::npos || c.name == "." || c.name == "..")
    throw ConfigError("scenario name must be a plain directory name");
  if (std::find(pipeline_names().begin(), pipeline_names().end(), c.pipeline) == pipeline_names().end())
    throw ConfigError("unknown pipeline '" + c.pipeline + "'");
  if (!c.params.is_object()) throw ConfigError("scenario 'params' must be an object");
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_scenario(text, fs::path(path).parent_path().string());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string config_hash(const ScenarioConfig& c) { return fnv1a_hex(c.source_text); }

std::string default_output_root() {
  if (const char* env = std::getenv("ARA_LAB_OUT"); env && *env) return env;
  return "results";
}

namespace {

struct Inputs {
  PlatformCatalog catalog;
  Topology topology;
  std::map<std::string, std::string> hashes;  // input reference -> content hash
};

Inputs load_inputs(const ScenarioConfig& c) {
  Inputs in;
  const std::string cat_path = c.catalog_path.empty() ? default_catalog_path() : c.catalog_path;
  const std::string topo_path = c.topology_path.empty() ? default_topology_path() : c.topology_path;
  in.catalog = load_platform_catalog(cat_path);
  in.topology = load_topology(topo_path, in.catalog);
  in.hashes["catalog"] = fnv1a_hex(read_text_file(cat_path));
  in.hashes["topology"] = fnv1a_hex(read_text_file(topo_path));
  return in;
}

template <typename T>
T param(const json& p, const char* key, T fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("parameter '") + key + "' has the wrong type");
  }
}

struct Output {
  std::string dir;
  std::vector<std::string> files;
  json summary = json::object();
  std::map<std::string, std::string> extra_inputs;

  void write(const std::string& name, const std::string& text) {
    write_text_file((fs::path(dir) / name).string(), text);
    files.push_back(name);
  }
};

std::string jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

// -- capacity_profile -------------------------------------------------------

void run_capacity_profile(const ScenarioConfig& c, const Inputs& in, Output& out) {
  const json& p = c.params;
  std::vector<double> distances;
  if (p.contains("distances_m") && p.at("distances_m").is_object()) {
    const auto& r = p.at("distances_m");
    const double start = r.at("start").get<double>(), stop = r.at("stop").get<double>(),
                 step = r.at("step").get<double>();
    if (!(step > 0) || stop < start) throw ConfigError("distances_m needs start <= stop and step > 0");
    for (double d = start; d <= stop + 1e-9; d += step) distances.push_back(std::round(d * 1e6) / 1e6);
  } else {
    distances = param<std::vector<double>>(p, "distances_m", {});
  }
  const auto anchors = param<std::vector<double>>(p, "anchors_m", {});
  distances.insert(distances.end(), anchors.begin(), anchors.end());
  std::sort(distances.begin(), distances.end());
  distances.erase(std::unique(distances.begin(), distances.end()), distances.end());
  if (distances.empty()) throw ConfigError("capacity_profile needs distances");

  std::vector<RouteSegment> segments;
  for (const auto& s : param<json>(p, "segments", json::array()))
    segments.push_back({s.at("from_m").get<double>(), s.at("to_m").get<double>(),
                        blockage_from_string(s.value("blockage", std::string("partial")))});
  const auto route = build_route(distances, segments);

  std::ostringstream csv;
  csv << "platform,tx_power_w,distance_m,capacity_bps\n";
  json runs = json::array();
  for (const auto& r : param<json>(p, "runs", json::array())) {
    const std::string platform = r.at("platform").get<std::string>();
    const auto& spec = in.catalog.at(platform);
    const double tx = r.value("tx_power_w", spec.max_tx_power_w);
    auto cfg = default_ran_config(spec, tx);
    cfg.bandwidth_hz = r.value("bandwidth_hz", cfg.bandwidth_hz);
    const auto profile = capacity_profile(cfg, route, in.catalog);
    json at = json::object();
    double cutoff = 0.0;
    for (const auto& s : profile) {
      csv << platform << ',' << format_double(tx) << ',' << format_double(s.distance_m) << ','
          << format_fixed(s.capacity_bps, 1) << '\n';
      if (std::find(anchors.begin(), anchors.end(), s.distance_m) != anchors.end())
        at[format_double(s.distance_m)] = s.capacity_bps;
      if (s.capacity_bps > 0) cutoff = s.distance_m;
    }
    runs.push_back({{"platform", platform}, {"tx_power_w", tx}, {"anchors", at}, {"last_connected_m", cutoff}});
  }
  if (runs.empty()) throw ConfigError("capacity_profile needs at least one run");
  out.write("capacity_profile.csv", csv.str());
  out.summary["runs"] = runs;
}

// -- coverage_map -----------------------------------------------------------

void run_coverage_map(const ScenarioConfig& c, const Inputs& in, Output& out) {
  const json& p = c.params;
  const Site& bs = in.topology.site(param<std::string>(p, "site", "wilson-hall"));
  const auto& spec = in.catalog.at(param<std::string>(p, "platform", "AraMIMO-TVWS"));
  const double tx = param<double>(p, "tx_power_w", spec.max_tx_power_w);
  const auto cfg = default_ran_config(spec, tx);
  const json g = param<json>(p, "grid", json::object());
  GridSpec grid;
  grid.cell_size_m = g.value("cell_size_m", 250.0);
  grid.width = g.value("width", 80);
  grid.height = g.value("height", 80);
  grid.origin = {g.value("origin_x_m", bs.position.x - 0.5 * grid.width * grid.cell_size_m),
                 g.value("origin_y_m", bs.position.y - 0.5 * grid.height * grid.cell_size_m)};
  const int n = param<int>(p, "samples", 60);
  if (n < 1 || grid.width < 2 || grid.height < 2 || !(grid.cell_size_m > 0))
    throw ConfigError("coverage_map needs samples >= 1 and a grid of at least 2x2 cells");

  RngStream rng(c.seed, 10);
  std::vector<CoverageSample> samples;
  std::ostringstream scsv;
  scsv << "x_m,y_m,distance_m,capacity_bps\n";
  for (int i = 0; i < n; ++i) {
    Site ue;
    ue.id = "sample";
    ue.position = {grid.origin.x + rng.uniform() * grid.width * grid.cell_size_m,
                   grid.origin.y + rng.uniform() * grid.height * grid.cell_size_m};
    auto [d, profile] = distance_and_profile(bs, ue, in.topology.terrain());
    const double cap = ran_capacity(cfg, std::max(d, 1.0), profile, WeatherSample::clear_sky(), in.catalog);
    samples.push_back({ue.position, cap});
    scsv << format_fixed(ue.position.x, 3) << ',' << format_fixed(ue.position.y, 3) << ',' << format_fixed(d, 3)
         << ',' << format_fixed(cap, 1) << '\n';
  }
  const auto fitted = fit_coverage_map(samples, grid, param<double>(p, "tolerance", 1e-6));
  out.write("coverage_samples.csv", scsv.str());
  out.write("coverage_grid.csv", coverage_grid_to_csv(fitted));
  out.summary = {{"converged", fitted.converged}, {"iterations", fitted.iterations}, {"residual", fitted.residual}};
}

// -- mimo_sets --------------------------------------------------------------

void run_mimo_sets(const ScenarioConfig& c, const Inputs&, Output& out) {
  const json& p = c.params;
  mimo::RbPlan plan{param<int>(p, "n_rbs", 42), param<double>(p, "rb_bandwidth_hz", 540e3)};
  mimo::SchedulerParams sp;
  sp.orthogonality_threshold = param<double>(p, "orthogonality_threshold", sp.orthogonality_threshold);
  sp.spectral_efficiency_cap = param<double>(p, "spectral_efficiency_cap", sp.spectral_efficiency_cap);
  mimo::ChannelModel model;
  model.n_antennas = param<int>(p, "antennas", model.n_antennas);
  model.streams_per_ue = param<int>(p, "streams_per_ue", model.streams_per_ue);
  model.rb_innovation = param<double>(p, "rb_innovation", model.rb_innovation);
  const int seeds = param<int>(p, "seeds", 1);
  if (seeds < 1) throw ConfigError("mimo_sets needs seeds >= 1");

  std::ostringstream agg;
  agg << "set,seed,greedy_bps,force_all_bps\n";
  std::map<std::string, std::map<int, int>> hist;
  json sets = json::array();
  for (const auto& js : param<json>(p, "sets", json::array())) {
    const UeSet set = ue_set_from_json(js);
    double mean = 0.0;
    for (int k = 0; k < seeds; ++k) {
      const auto r = run_mimo_set(set, plan, sp, model, c.seed + static_cast<std::uint64_t>(k));
      agg << set.name << ',' << c.seed + k << ',' << format_fixed(r.greedy_bps, 1) << ','
          << format_fixed(r.force_all_bps, 1) << '\n';
      mean += r.greedy_bps / seeds;
      if (k == 0) {
        hist[set.name] = mimo::group_size_histogram(r.greedy);
        out.write("mimo_schedule_" + set.name + ".csv", mimo::schedule_to_csv(r.greedy));
      }
    }
    sets.push_back({{"set", set.name}, {"mean_greedy_bps", mean}});
  }
  if (sets.empty()) throw ConfigError("mimo_sets needs at least one set");
  out.write("mimo_aggregate.csv", agg.str());
  out.write("mimo_group_sizes.csv", mimo::histogram_to_csv(hist));
  out.summary["sets"] = sets;
}

// -- xhaul_weather ----------------------------------------------------------

void run_xhaul_weather(const ScenarioConfig& c, const Inputs& in, Output& out) {
  const json& p = c.params;
  const auto rains = param<std::vector<double>>(p, "rain_mmh", {0.0});
  const double margin = param<double>(p, "margin_db", 0.0);
  std::ostringstream csv;
  csv << "link,platform,distance_km,rain_mmh,mcs,rsl_dbm,snr_db,throughput_bps,available\n";
  json anchors = json::array();
  struct Named {
    std::string name, platform;
    double km, bw;
  };
  std::vector<Named> links;
  for (const auto& l : param<json>(p, "links", json::array())) {
    Named n;
    n.platform = l.at("platform").get<std::string>();
    const auto& spec = in.catalog.at(n.platform);
    n.name = l.value("name", n.platform);
    if (l.contains("between")) {
      const auto ends = l.at("between").get<std::vector<std::string>>();
      if (ends.size() != 2) throw ConfigError("'between' needs two site ids");
      n.km = distance(in.topology.site(ends[0]).position, in.topology.site(ends[1]).position) / 1000.0;
    } else {
      n.km = l.at("distance_km").get<double>();
    }
    n.bw = l.value("bandwidth_hz", spec.max_bandwidth_hz);
    links.push_back(n);
  }
  if (links.empty()) throw ConfigError("xhaul_weather needs at least one link");
  for (const auto& l : links) {
    const auto clear_cfg = adapt_mcs(l.platform, l.bw, l.km, WeatherSample::clear_sky(), margin, in.catalog);
    const auto clear = xhaul_link_state(clear_cfg, l.km, WeatherSample::clear_sky(), in.catalog);
    anchors.push_back({{"link", l.name},
                       {"platform", l.platform},
                       {"distance_km", l.km},
                       {"mcs", clear_cfg.mcs},
                       {"throughput_bps", clear.throughput_bps},
                       {"limit_bps", theoretical_limit_bps(clear_cfg, in.catalog)}});
    for (double r : rains) {
      const auto w = WeatherSample::raining(r);
      const auto cfg = adapt_mcs(l.platform, l.bw, l.km, w, margin, in.catalog);
      const auto s = xhaul_link_state(cfg, l.km, w, in.catalog);
      csv << l.name << ',' << l.platform << ',' << format_fixed(l.km, 4) << ',' << format_double(r) << ','
          << cfg.mcs << ',' << format_fixed(s.rsl_dbm, 3) << ',' << format_fixed(s.snr_db, 3) << ','
          << format_fixed(s.throughput_bps, 1) << ',' << (s.available ? 1 : 0) << '\n';
    }
  }
  out.write("xhaul_weather.csv", csv.str());
  out.write("xhaul_anchors.json", json({{"links", anchors}}).dump(2) + "\n");
  out.summary["links"] = anchors;

  // Optional mesh routing over the topology's x-haul links at each rain rate.
  const json demands_j = param<json>(p, "demands", json::array());
  if (demands_j.empty()) return;
  std::vector<MeshDemand> demands;
  for (const auto& d : demands_j)
    demands.push_back({d.at("source").get<std::string>(), d.at("sink").get<std::string>(),
                       d.at("offered_bps").get<double>()});
  std::ostringstream rcsv;
  rcsv << "rain_mmh,policy,source,sink,path,delivered_bps\n";
  auto mesh_at = [&](double rain) {
    std::vector<MeshLink> mesh;
    for (const auto& cl : in.topology.links()) {
      const auto& spec = in.catalog.at(cl.platform);
      if (spec.mcs_table.empty()) continue;
      const double km = distance(in.topology.site(cl.a).position, in.topology.site(cl.b).position) / 1000.0;
      const auto w = WeatherSample::raining(rain);
      const auto cfg = adapt_mcs(cl.platform, spec.max_bandwidth_hz, km, w, margin, in.catalog);
      mesh.push_back({cl.id, cl.a, cl.b, xhaul_link_state(cfg, km, w, in.catalog)});
    }
    return mesh;
  };
  const auto reference = mesh_at(0.0);
  for (double r : rains) {
    const auto mesh = mesh_at(r);
    for (auto policy : {RoutingPolicy::throughput_max, RoutingPolicy::fixed}) {
      for (const auto& rd : route_flows(mesh, demands, policy, &reference)) {
        rcsv << format_double(r) << ',' << (policy == RoutingPolicy::fixed ? "fixed" : "throughput_max") << ','
             << rd.demand.source << ',' << rd.demand.sink << ',';
        for (std::size_t i = 0; i < rd.path.size(); ++i) rcsv << (i ? ";" : "") << rd.path[i];
        rcsv << ',' << format_fixed(rd.delivered_bps, 1) << '\n';
      }
    }
  }
  out.write("xhaul_routing.csv", rcsv.str());
}

// -- fsoc_align -------------------------------------------------------------

void run_fsoc_align(const ScenarioConfig& c, const Inputs&, Output& out) {
  const json& p = c.params;
  fsoc::SensorModel model;
  model.distance_km = param<double>(p, "distance_km", model.distance_km);
  const fsoc::AlignmentThresholds th;
  const int trials = param<int>(p, "trials", 100);
  const double max_deg = param<double>(p, "max_offset_deg", 6.0);
  const auto max_steps = param<std::int64_t>(p, "max_steps", 400000);

  json budget = {{"distance_km", model.distance_km},
                 {"locked_rx_dbm", fsoc::fsoc_rx_power(model.spec, model.distance_km, 0.0, WeatherSample::clear_sky())},
                 {"sensitivity_dbm", model.spec.rx_sensitivity_dbm},
                 {"pointing_loss_half_angle_db", fsoc::pointing_loss_db(model.spec, model.spec.divergence_rad / 2)}};
  budget["margin_db"] = budget["locked_rx_dbm"].get<double>() - model.spec.rx_sensitivity_dbm;

  RngStream offsets(c.seed, 20);
  std::ostringstream acsv;
  acsv << "trial,init_az_rad,init_el_rad,converged,steps,final_error_rad\n";
  int converged = 0;
  for (int i = 0; i < trials; ++i) {
    const double lim = max_deg * M_PI / 180.0;
    const double az = offsets.uniform(-lim, lim), el = offsets.uniform(-lim, lim);
    const auto run = fsoc::simulate_alignment(az, el, model, th, max_steps, RngStream(c.seed, 100 + i));
    converged += run.converged ? 1 : 0;
    acsv << i << ',' << format_double(az) << ',' << format_double(el) << ',' << (run.converged ? 1 : 0) << ','
         << run.steps << ',' << format_double(run.final_state.pointing_error_rad()) << '\n';
  }

  std::ostringstream scsv;
  scsv << "rain_mmh,samples,mean_pixel,var_pixel,mean_apd_v\n";
  const int n_scint = param<int>(p, "scint_samples", 10000);
  const double dt = param<double>(p, "scint_dt_s", 0.01);
  for (double r : param<std::vector<double>>(p, "scint_rain_mmh", {0.0, 25.0})) {
    const auto series = fsoc::scintillation_series(r, n_scint * dt, dt, RngStream(c.seed, 30));
    double m = 0, m2 = 0, apd = 0;
    for (const auto& s : series) {
      m += s.cmos_mean_pixel;
      apd += s.apd_voltage;
    }
    m /= series.size();
    apd /= series.size();
    for (const auto& s : series) m2 += (s.cmos_mean_pixel - m) * (s.cmos_mean_pixel - m);
    m2 /= std::max<std::size_t>(series.size() - 1, 1);
    scsv << format_double(r) << ',' << series.size() << ',' << format_fixed(m, 6) << ',' << format_fixed(m2, 6)
         << ',' << format_fixed(apd, 6) << '\n';
  }

  std::ostringstream bcsv;
  bcsv << "snr_db,frames,frames_lost,bits,bit_errors,ber,ook_ber\n";
  const int frames = param<int>(p, "beacon_frames", 20);
  const int bits = param<int>(p, "beacon_payload_bits", 512);
  RngStream brng(c.seed, 40);
  for (double snr : param<std::vector<double>>(p, "beacon_snr_db", {0.0, 4.0, 8.0, 12.0})) {
    std::size_t lost = 0, nbits = 0, nerr = 0;
    for (int f = 0; f < frames; ++f) {
      std::vector<std::uint8_t> payload(static_cast<std::size_t>(bits));
      for (auto& b : payload) b = static_cast<std::uint8_t>(brng.below(2));
      const auto r = fsoc::beacon_roundtrip(payload, snr, brng);
      if (r.frame_lost) {
        ++lost;
        continue;
      }
      nbits += r.bits;
      nerr += r.bit_errors;
    }
    bcsv << format_double(snr) << ',' << frames << ',' << lost << ',' << nbits << ',' << nerr << ','
         << format_double(nbits ? static_cast<double>(nerr) / nbits : 0.0) << ','
         << format_double(fsoc::ook_ber(snr)) << '\n';
  }

  out.write("fsoc_budget.json", budget.dump(2) + "\n");
  out.write("fsoc_alignment.csv", acsv.str());
  out.write("fsoc_scintillation.csv", scsv.str());
  out.write("fsoc_beacon.csv", bcsv.str());
  out.summary = budget;
  out.summary["alignment_converged"] = converged;
  out.summary["alignment_trials"] = trials;
}

// -- delay_cdf --------------------------------------------------------------

void run_delay_cdf(const ScenarioConfig& c, const Inputs&, Output& out) {
  const json& p = c.params;
  stack::StackConfig cfg;
  stack::TrafficSpec traffic;
  traffic.packets = param<std::size_t>(p, "packets", traffic.packets);
  traffic.size_bytes = param<std::int64_t>(p, "size_bytes", traffic.size_bytes);
  traffic.spacing_ms = param<double>(p, "spacing_ms", traffic.spacing_ms);
  const double bound = param<double>(p, "bound_ms", 10.0);

  std::ostringstream layers, cdf;
  layers << "profile,layer,mean_ms,ci95_ms\n";
  cdf << "profile,delay_ms,fraction\n";
  json summary = json::object();
  for (const auto& name : param<std::vector<std::string>>(p, "profiles", {"no_rain", "rain"})) {
    stack::SinrProfile prof;
    if (name == "no_rain") prof = stack::SinrProfile::no_rain();
    else if (name == "rain") prof = stack::SinrProfile::rain();
    else throw ConfigError("unknown SINR profile '" + name + "'");
    const auto run = stack::run_delay_experiment(prof, traffic, cfg, RngStream(c.seed, 50));
    const auto contrib = stack::layer_contributions(run.journeys);
    json lj = json::object();
    for (auto l : stack::kLayers) {
      layers << name << ',' << stack::to_string(l) << ',' << format_fixed(contrib[l].mean_ms, 6) << ','
             << format_fixed(contrib[l].ci95_ms, 6) << '\n';
      lj[stack::to_string(l)] = contrib[l].mean_ms;
    }
    layers << name << ",total," << format_fixed(contrib.total.mean_ms, 6) << ','
           << format_fixed(contrib.total.ci95_ms, 6) << '\n';
    const auto d = stack::delay_cdf(run.journeys, bound);
    for (const auto& pt : d.points)
      cdf << name << ',' << format_fixed(pt.delay_ms, 6) << ',' << format_fixed(pt.fraction, 6) << '\n';
    out.write("delay_journeys_" + name + ".csv", stack::journeys_to_csv(run.journeys));
    out.write("delay_events_" + name + ".log", stack::format_event_log(run.events));
    summary[name] = {{"layers_ms", lj}, {"fraction_within_bound", d.fraction_within_bound}};
  }
  out.write("delay_layers.csv", layers.str());
  out.write("delay_cdf.csv", cdf.str());
  summary["bound_ms"] = bound;
  out.summary = summary;
}

// -- ltl_qoe ----------------------------------------------------------------

void run_ltl_qoe(const ScenarioConfig& c, const Inputs&, Output& out) {
  const json& p = c.params;
  const std::string ref = param<std::string>(p, "trace", "traces/bad_connectivity.csv");
  const std::string path = resolve_input(ref, c.base_dir);
  const std::string text = read_text_file(path);
  out.extra_inputs[ref] = fnv1a_hex(text);
  const auto trace = streaming::parse_trace(text);
  streaming::SessionParams sp;
  sp.overhead = param<double>(p, "overhead", sp.overhead);
  sp.bitrate_bps = param<double>(p, "bitrate_bps", sp.bitrate_bps);
  sp.fps = param<double>(p, "fps", sp.fps);
  const int seeds = param<int>(p, "seeds", 1);
  std::vector<json> rows;
  std::ostringstream fps;
  fps << "seed,transport,second,fps\n";
  for (int k = 0; k < seeds; ++k) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
    for (auto t : {streaming::Transport::ltl, streaming::Transport::udp}) {
      const auto r = streaming::stream_session(trace, sp, t, seed);
      json row = json::parse(streaming::qoe_to_json(r, t));
      row["seed"] = seed;
      rows.push_back(row);
      for (std::size_t i = 0; i < r.fps_series.size(); ++i)
        fps << seed << ',' << streaming::to_string(t) << ',' << i << ',' << format_double(r.fps_series[i]) << '\n';
    }
  }
  out.write("ltl_qoe.jsonl", jsonl(rows));
  out.write("ltl_fps.csv", fps.str());
  out.summary["sessions"] = rows.size();
}

// -- orchestrator_fuzz ------------------------------------------------------

void run_orchestrator_fuzz(const ScenarioConfig& c, const Inputs& in, Output& out) {
  const json& p = c.params;
  orch::CalendarParams cp;
  if (p.contains("interference_radius_m")) cp.interference_radius_m = p.at("interference_radius_m").get<double>();
  orch::Orchestrator o(in.topology, in.catalog, cp, param<double>(p, "download_rate_bps", 100e6));
  orch::FuzzParams fp;
  fp.requests = param<std::size_t>(p, "requests", 2000);
  fp.violation_probability = param<double>(p, "violation_probability", fp.violation_probability);
  fp.seed = c.seed;
  const auto rep = orch::run_fuzz(o, fp);
  std::vector<json> guard;
  for (const auto& e : o.guard_log()) guard.push_back(orch::to_json(e));
  out.write("journal.jsonl", o.journal_jsonl());
  out.write("guard_events.jsonl", jsonl(guard));
  out.summary = orch::to_json(rep);
  out.write("fuzz_summary.json", out.summary.dump(2) + "\n");
}

// -- telemetry --------------------------------------------------------------

void run_telemetry(const ScenarioConfig& c, const Inputs& in, Output& out) {
  const json& p = c.params;
  std::vector<std::string> sites = param<std::vector<std::string>>(p, "weather_sites", {});
  if (sites.empty())
    for (const Site* s : in.topology.sites_with_role(SiteRole::bs)) sites.push_back(s->id);
  const double wdur = param<double>(p, "weather_duration_s", 86400.0);
  const auto wx = weather_feed(sites, wdur, RngStream(c.seed, 60));
  out.write("weather.csv", weather_series_to_csv(wx));

  std::vector<power::StateChange> schedule;
  for (const auto& s : param<json>(p, "power_schedule", json::array()))
    schedule.push_back({s.at("t_s").get<double>(),
                        {power::bs_state_from_string(s.at("state").get<std::string>()), s.value("ues", 0)}});
  if (schedule.empty())
    schedule = {{0.0, {power::BsStateKind::idle_no_tx, 0}},
                {60.0, {power::BsStateKind::tx_idle, 0}},
                {120.0, {power::BsStateKind::ues_connected, 6}},
                {180.0, {power::BsStateKind::ues_transmitting, 6}}};
  const auto trace = power::power_trace(power::residence_hall_baseline(), schedule,
                                        param<double>(p, "power_duration_s", 240.0), param<double>(p, "power_step_s", 1.0));
  out.write("power.csv", power::power_trace_to_csv(trace));

  spectrum::Band band;
  const double sdur = param<double>(p, "scan_duration_s", 900.0);
  const std::string scan_site = param<std::string>(p, "scan_site", sites.front());
  const auto emitters = spectrum::rural_primary_users(band, RngStream(c.seed, 70));
  const auto grid = spectrum::spectrum_scan(scan_site, band, sdur, emitters, RngStream(c.seed, 71));
  const auto avail = spectrum::available_channels(grid);
  out.write("occupancy.csv", spectrum::occupancy_to_csv(grid));
  out.write("available_channels.json", json({{"site", scan_site}, {"channels", avail}}).dump() + "\n");
  out.summary = {{"weather_sites", sites.size()},
                 {"power_samples", trace.size()},
                 {"grid_channels", grid.channels},
                 {"grid_slots", grid.slots},
                 {"available_channels", avail.size()}};
}

using PipelineFn = std::function<void(const ScenarioConfig&, const Inputs&, Output&)>;

const std::map<std::string, PipelineFn>& pipelines() {
  static const std::map<std::string, PipelineFn> m = {
      {"capacity_profile", run_capacity_profile}, {"coverage_map", run_coverage_map},
      {"mimo_sets", run_mimo_sets},               {"xhaul_weather", run_xhaul_weather},
      {"fsoc_align", run_fsoc_align},             {"delay_cdf", run_delay_cdf},
      {"ltl_qoe", run_ltl_qoe},                   {"orchestrator_fuzz", run_orchestrator_fuzz},
      {"telemetry", run_telemetry}};
  return m;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void validate_scenario(const ScenarioConfig& c) {
  if (!pipelines().count(c.pipeline)) throw ConfigError("unknown pipeline '" + c.pipeline + "'");
  try {
    (void)load_inputs(c);
  } catch (const Error& e) {
    throw ConfigError(std::string("scenario inputs: ") + e.what());
  }
  if (c.pipeline == "ltl_qoe") {
    const std::string ref = param<std::string>(c.params, "trace", "traces/bad_connectivity.csv");
    (void)streaming::load_trace(resolve_input(ref, c.base_dir));
  }
}

ScenarioResult run_scenario(const ScenarioConfig& c, const std::string& output_root) {
  validate_scenario(c);
  const Inputs in = load_inputs(c);
  Output out;
  out.dir = (fs::path(output_root) / c.name).string();
  fs::create_directories(out.dir);
  try {
    pipelines().at(c.pipeline)(c, in, out);
  } catch (const json::exception& e) {
    throw ConfigError("scenario '" + c.name + "': bad parameter: " + e.what());
  }

  json inputs = json::object();
  for (const auto& [k, v] : in.hashes) inputs[k] = v;
  for (const auto& [k, v] : out.extra_inputs) inputs[k] = v;
  json files = json::object();
  for (const auto& f : out.files) files[f] = fnv1a_hex(read_text_file((fs::path(out.dir) / f).string()));
  json manifest = {{"name", c.name},
                   {"pipeline", c.pipeline},
                   {"seed", c.seed},
                   {"config_hash", config_hash(c)},
                   {"version", ARALAB_VERSION},
                   {"inputs", inputs},
                   {"files", files},
                   {"summary", out.summary},
                   {"created_utc", utc_now()}};
  write_text_file((fs::path(out.dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  out.files.push_back("manifest.json");
  return {out.dir, out.files, out.summary, manifest};
}

UeSet ue_set_from_json(const json& j) {
  UeSet s;
  try {
    s.name = j.at("name").get<std::string>();
    s.ue_snr_db = j.at("ue_snr_db").get<std::vector<double>>();
    s.correlation = j.value("correlation", 0.0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("UE set: ") + e.what());
  }
  if (s.ue_snr_db.empty()) throw ConfigError("UE set '" + s.name + "' has no UEs");
  if (s.correlation < 0 || s.correlation >= 1) throw ConfigError("UE set correlation must lie in [0, 1)");
  return s;
}

MimoSetResult run_mimo_set(const UeSet& set, const mimo::RbPlan& plan, const mimo::SchedulerParams& params,
                           const mimo::ChannelModel& model, std::uint64_t seed) {
  RngStream rng(seed, 3);
  const auto corr = mimo::uniform_correlation(static_cast<int>(set.ue_snr_db.size()), set.correlation);
  const auto h = mimo::synthesize_channels(set.ue_snr_db, corr, model, plan.n_rbs, rng);
  MimoSetResult r;
  r.greedy = mimo::schedule_rbs(h, plan, mimo::SchedulePolicy::greedy, params);
  r.force_all = mimo::schedule_rbs(h, plan, mimo::SchedulePolicy::force_all, params);
  r.greedy_bps = mimo::aggregate_capacity(r.greedy);
  r.force_all_bps = mimo::aggregate_capacity(r.force_all);
  return r;
}

}  // namespace aralab
