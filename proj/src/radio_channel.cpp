#include "aralab/radio_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aralab/error.hpp"
#include "aralab/rain.hpp"

namespace aralab {

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double noise_floor_dbm(double bandwidth_hz, double noise_figure_db) {
  return kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

const PlatformSpec& validate(const RanLinkConfig& config, const PlatformCatalog& catalog) {
  const PlatformSpec* spec = catalog.find(config.platform);
  if (!spec) throw ConfigError("unknown platform '" + config.platform + "'");
  if (spec->kind != PlatformKind::ran)
    throw ConfigError("platform '" + config.platform + "' is not a RAN platform");
  if (!(config.tx_power_w > 0) || config.tx_power_w > spec->max_tx_power_w * (1 + 1e-12))
    throw ConfigError("tx power outside (0, " + std::to_string(spec->max_tx_power_w) + "] W");
  if (!(config.bandwidth_hz > 0) || config.bandwidth_hz > spec->max_bandwidth_hz * (1 + 1e-12))
    throw ConfigError("bandwidth outside (0, max_bandwidth]");
  if (config.carrier_hz < spec->freq_low_hz || config.carrier_hz > spec->freq_high_hz)
    throw ConfigError("carrier outside the platform band");
  return *spec;
}

RanLinkConfig default_ran_config(const PlatformSpec& spec, double tx_power_w) {
  return {spec.id, tx_power_w, spec.default_bandwidth_hz(), spec.center_frequency_hz()};
}

double path_loss_db(const RanLinkConfig& config, double distance_m, const TerrainProfile& profile,
                    const PlatformCatalog& catalog) {
  const PlatformSpec& spec = validate(config, catalog);
  const Blockage b = profile.worst_blockage();
  if (b == Blockage::blocked) return std::numeric_limits<double>::infinity();
  const auto& p = spec.propagation;
  const double d = std::max(distance_m, 1.0);
  double loss = p.ref_loss_db + 10.0 * p.path_loss_exponent * std::log10(d / p.ref_distance_m);
  if (b == Blockage::partial) loss += kPartialBlockagePenaltyDb;
  return loss;
}

RanLinkBudget ran_link_budget(const RanLinkConfig& config, double distance_m,
                              const TerrainProfile& profile, const WeatherSample& weather,
                              const PlatformCatalog& catalog) {
  const PlatformSpec& spec = validate(config, catalog);
  RanLinkBudget out;
  out.path_loss_db = path_loss_db(config, distance_m, profile, catalog);
  if (config.carrier_hz >= 6e9)
    out.rain_loss_db = rain_attenuation_db(config.carrier_hz, weather.rain_rate_mmh,
                                           effective_rain_path_km(distance_m / 1000.0, weather.rain_rate_mmh));
  const double noise = noise_floor_dbm(config.bandwidth_hz, spec.propagation.noise_figure_db);
  out.snr_db = watts_to_dbm(config.tx_power_w) - out.path_loss_db - out.rain_loss_db - noise;
  if (!std::isfinite(out.snr_db) || out.snr_db < spec.propagation.demod_threshold_db) {
    out.capacity_bps = 0.0;
    return out;
  }
  const double snr = std::pow(10.0, out.snr_db / 10.0);
  out.capacity_bps = std::min(config.bandwidth_hz * std::log2(1.0 + snr), spec.max_capacity_bps);
  return out;
}

double ran_capacity(const RanLinkConfig& config, double distance_m, const TerrainProfile& profile,
                    const WeatherSample& weather, const PlatformCatalog& catalog) {
  return ran_link_budget(config, distance_m, profile, weather, catalog).capacity_bps;
}

std::vector<CapacitySample> capacity_profile(const RanLinkConfig& config,
                                             const std::vector<RoutePoint>& route,
                                             const PlatformCatalog& catalog,
                                             const WeatherSample& weather) {
  validate(config, catalog);
  std::vector<CapacitySample> out;
  out.reserve(route.size());
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& pt : route) {
    if (!(pt.distance_m > last)) throw ValidationError("route distances must be increasing");
    last = pt.distance_m;
    out.push_back({pt.distance_m, ran_capacity(config, pt.distance_m, pt.profile, weather, catalog)});
  }
  return out;
}

std::vector<RoutePoint> build_route(const std::vector<double>& distances_m,
                                    const std::vector<RouteSegment>& segments) {
  std::vector<RoutePoint> route;
  route.reserve(distances_m.size());
  for (double d : distances_m) {
    Blockage b = Blockage::clear;
    for (const auto& s : segments)
      if (d >= s.from_m && d <= s.to_m) b = std::max(b, s.blockage);
    route.push_back({d, TerrainProfile::uniform(d, b)});
  }
  return route;
}

}  // namespace aralab
