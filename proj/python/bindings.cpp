#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aralab/catalog.hpp"
#include "aralab/error.hpp"
#include "aralab/fountain.hpp"
#include "aralab/fsoc.hpp"
#include "aralab/mimo.hpp"
#include "aralab/power.hpp"
#include "aralab/radio_channel.hpp"
#include "aralab/scenario.hpp"
#include "aralab/spectrum.hpp"
#include "aralab/stack_delay.hpp"
#include "aralab/streaming.hpp"
#include "aralab/xhaul.hpp"

namespace py = pybind11;
using namespace aralab;

namespace {

const PlatformCatalog& catalog() {
  static const PlatformCatalog c = default_catalog();
  return c;
}

WeatherSample weather(double rain_mmh) {
  return rain_mmh > 0 ? WeatherSample::raining(rain_mmh) : WeatherSample::clear_sky();
}

py::dict ran_capacity_py(const std::string& platform, double tx_power_w, double distance_m, double rain_mmh) {
  const auto cfg = default_ran_config(catalog().at(platform), tx_power_w);
  const auto b = ran_link_budget(cfg, distance_m, TerrainProfile::clear(distance_m), weather(rain_mmh), catalog());
  py::dict d;
  d["path_loss_db"] = b.path_loss_db;
  d["rain_loss_db"] = b.rain_loss_db;
  d["snr_db"] = b.snr_db;
  d["capacity_bps"] = b.capacity_bps;
  return d;
}

py::dict xhaul_link_py(const std::string& platform, double distance_km, double rain_mmh, double margin_db) {
  const auto w = weather(rain_mmh);
  const auto cfg = adapt_mcs(platform, catalog().at(platform).max_bandwidth_hz, distance_km, w, margin_db, catalog());
  const auto s = xhaul_link_state(cfg, distance_km, w, catalog());
  py::dict d;
  d["mcs"] = cfg.mcs;
  d["bandwidth_hz"] = cfg.bandwidth_hz;
  d["rsl_dbm"] = s.rsl_dbm;
  d["snr_db"] = s.snr_db;
  d["throughput_bps"] = s.throughput_bps;
  d["available"] = s.available;
  d["limit_bps"] = theoretical_limit_bps(cfg, catalog());
  return d;
}

// Rows of complex channel coefficients, one row per stream.
double orthogonality_py(const std::vector<std::vector<std::complex<double>>>& rows, const std::vector<int>& group) {
  if (rows.empty() || rows.front().empty()) throw ValidationError("channel matrix must be non-empty");
  mimo::ChannelMatrix h(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw ValidationError("channel matrix rows differ in length");
    for (std::size_t j = 0; j < rows[i].size(); ++j) h(i, j) = rows[i][j];
  }
  return mimo::orthogonality(h, group);
}

py::dict delay_experiment_py(bool rain, std::size_t packets, std::int64_t size_bytes, double spacing_ms,
                             double bound_ms, std::uint64_t seed) {
  using namespace aralab::stack;
  const StackConfig cfg;
  const auto run = run_delay_experiment(rain ? SinrProfile::rain() : SinrProfile::no_rain(),
                                        TrafficSpec{packets, size_bytes, spacing_ms}, cfg, RngStream(seed));
  const auto lc = layer_contributions(run.journeys);
  py::dict layers;
  for (Layer l : {Layer::SDAP, Layer::PDCP, Layer::RLC, Layer::MAC, Layer::PHY}) layers[to_string(l).c_str()] = lc[l].mean_ms;
  py::dict d;
  d["layer_mean_ms"] = layers;
  d["total_mean_ms"] = lc.total.mean_ms;
  d["fraction_within_bound"] = delay_cdf(run.journeys, bound_ms).fraction_within_bound;
  d["packets"] = lc.packets;
  d["event_log"] = format_event_log(run.events);
  return d;
}

double fsoc_rx_power_py(double distance_km, double pointing_error_rad, double rain_mmh) {
  return fsoc::fsoc_rx_power(fsoc::OpticalLinkSpec{}, distance_km, pointing_error_rad, weather(rain_mmh));
}

// Encodes `data` and decodes it back from repair symbols only.
py::bytes fountain_roundtrip_py(const py::bytes& data, std::size_t symbol_size, std::size_t extra, std::uint64_t seed) {
  using namespace aralab::fountain;
  const std::string s = data;
  const auto block = SourceBlock::from_bytes(0, std::vector<std::uint8_t>(s.begin(), s.end()), symbol_size);
  std::vector<EncodedSymbol> syms;
  for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(block.k) + extra; ++i)
    syms.push_back(encode_symbol(block, static_cast<std::uint32_t>(block.k) + i, seed));
  const auto out = decode_block(syms);
  if (const auto* need = std::get_if<NeedMore>(&out))
    throw ValidationError("not enough independent symbols to decode");
  auto payload = std::get<std::vector<std::uint8_t>>(out);
  payload.resize(s.size());
  return py::bytes(reinterpret_cast<const char*>(payload.data()), payload.size());
}

py::dict stream_session_py(const std::string& trace_path, const std::string& transport, std::uint64_t seed) {
  using namespace aralab::streaming;
  const auto trace = load_trace(trace_path.empty() ? data_path("traces/bad_connectivity.csv") : trace_path);
  const auto r = stream_session(trace, {}, transport_from_string(transport), seed);
  py::dict d;
  d["median_fps"] = r.median_fps;
  d["stall_ratio"] = r.stall_ratio;
  d["frame_intact_ratio"] = r.frame_intact_ratio;
  d["delivered_bitrate_bps"] = r.delivered_bitrate_bps;
  d["frames"] = r.frames;
  d["fps_series"] = r.fps_series;
  return d;
}

py::dict power_model_py(const std::string& state, int ues) {
  using namespace aralab::power;
  const auto p = power_model(residence_hall_baseline(), {bs_state_from_string(state), ues});
  py::dict comps;
  for (const auto& r : p.readings) {
    py::dict c;
    c["watts"] = r.watts;
    c["amps"] = r.amps;
    c["watt_share_percent"] = watt_share_percent(p, r.component);
    comps[to_string(r.component).c_str()] = c;
  }
  py::dict d;
  d["components"] = comps;
  d["total_watts"] = p.total_watts;
  d["total_amps"] = p.total_amps;
  return d;
}

py::dict spectrum_scan_py(const std::string& site, double duration_s, std::uint64_t seed) {
  using namespace aralab::spectrum;
  const Band band;
  const auto g = spectrum_scan(site, band, duration_s, rural_primary_users(band, RngStream(seed, 1)), RngStream(seed, 2));
  py::dict d;
  d["channels"] = g.channels;
  d["slots"] = g.slots;
  d["dbm"] = g.dbm;
  d["available_channels"] = available_channels(g);
  return d;
}

py::tuple run_scenario_py(const std::string& path, const std::string& output_root) {
  const auto cfg = load_scenario(path);
  const auto r = run_scenario(cfg, output_root.empty() ? default_output_root() : output_root);
  return py::make_tuple(r.output_dir, r.files, r.summary.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "aralab simulation core";
  m.attr("__version__") = ARALAB_VERSION;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def("ran_capacity", &ran_capacity_py, py::arg("platform"), py::arg("tx_power_w"), py::arg("distance_m"),
        py::arg("rain_mmh") = 0.0, "Link budget and capacity of a RAN platform over clear terrain.");
  m.def("xhaul_link", &xhaul_link_py, py::arg("platform"), py::arg("distance_km"), py::arg("rain_mmh") = 0.0,
        py::arg("margin_db") = 0.0, "Adaptive-MCS x-haul link state.");
  m.def("orthogonality", &orthogonality_py, py::arg("channels"), py::arg("group"));
  m.def("delay_experiment", &delay_experiment_py, py::arg("rain") = false, py::arg("packets") = 100,
        py::arg("size_bytes") = 100000, py::arg("spacing_ms") = 10.0, py::arg("bound_ms") = 10.0,
        py::arg("seed") = 9);
  m.def("fsoc_rx_power", &fsoc_rx_power_py, py::arg("distance_km"), py::arg("pointing_error_rad") = 0.0,
        py::arg("rain_mmh") = 0.0);
  m.def("fountain_roundtrip", &fountain_roundtrip_py, py::arg("data"), py::arg("symbol_size") = 64,
        py::arg("extra") = 2, py::arg("seed") = 1);
  m.def("stream_session", &stream_session_py, py::arg("trace_path") = "", py::arg("transport") = "ltl",
        py::arg("seed") = 1);
  m.def("power_model", &power_model_py, py::arg("state") = "tx_idle", py::arg("ues") = 0);
  m.def("spectrum_scan", &spectrum_scan_py, py::arg("site") = "wilson-hall", py::arg("duration_s") = 900.0,
        py::arg("seed") = 1);
  m.def("run_scenario", &run_scenario_py, py::arg("path"), py::arg("output_root") = "");
  m.def("validate_scenario", [](const std::string& path) { validate_scenario(load_scenario(path)); }, py::arg("path"));
}
