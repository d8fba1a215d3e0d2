#include "aralab/fsoc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aralab/csv.hpp"
#include "aralab/error.hpp"

namespace aralab::fsoc {

void validate(const OpticalLinkSpec& spec) {
  if (!(spec.divergence_rad > 0)) throw ValidationError("divergence must be > 0");
  if (spec.wdm_channels < 1) throw ValidationError("wdm_channels must be >= 1");
  if (!(spec.rx_aperture_m > 0)) throw ValidationError("rx aperture must be > 0");
  if (!(spec.per_channel_rate_bps > 0)) throw ValidationError("per-channel rate must be > 0");
}

double geometric_loss_db(const OpticalLinkSpec& spec, double distance_km) {
  const double beam = distance_km * 1e3 * spec.divergence_rad;
  return std::max(0.0, 20.0 * std::log10(beam / spec.rx_aperture_m));
}

double pointing_loss_db(const OpticalLinkSpec& spec, double pointing_error_rad) {
  const double x = pointing_error_rad / (0.5 * spec.divergence_rad);
  return kPointingLossDb * x * x;
}

double optical_rain_attenuation_db_per_km(double rain_rate_mmh) {
  if (rain_rate_mmh < 0) throw ValidationError("rain rate must be >= 0");
  if (rain_rate_mmh == 0.0) return 0.0;
  return 1.076 * std::pow(rain_rate_mmh, 0.67);
}

double fsoc_rx_power(const OpticalLinkSpec& spec, double distance_km, double pointing_error_rad,
                     const WeatherSample& weather, double scint_fade_db) {
  validate(spec);
  if (!(distance_km > 0)) throw ValidationError("distance must be > 0");
  return spec.tx_power_dbm + spec.system_gain_db - geometric_loss_db(spec, distance_km) -
         pointing_loss_db(spec, std::abs(pointing_error_rad)) -
         optical_rain_attenuation_db_per_km(weather.rain_rate_mmh) * distance_km - scint_fade_db;
}

double calibrate_system_gain(OpticalLinkSpec spec, double distance_km, double target_dbm) {
  spec.system_gain_db = 0.0;
  return target_dbm - fsoc_rx_power(spec, distance_km, 0.0, WeatherSample::clear_sky());
}

std::vector<ScintillationSample> scintillation_series(double rain_rate_mmh, double duration_s, double dt_s,
                                                      RngStream rng, const ScintillationParams& p) {
  if (!(duration_s > 0) || !(dt_s > 0)) throw ValidationError("duration and dt must be > 0");
  if (rain_rate_mmh < 0) throw ValidationError("rain rate must be >= 0");
  const auto n = static_cast<std::size_t>(std::floor(duration_s / dt_s + 1e-9));
  const double var = p.base_log_variance + p.log_variance_per_mmh * rain_rate_mmh;
  const double sigma = std::sqrt(var);
  const double rho = std::exp(-dt_s / p.correlation_time_s);
  const double innov = std::sqrt(1.0 - rho * rho);
  const double extinction = std::exp(-p.extinction_per_mmh * rain_rate_mmh);

  std::vector<ScintillationSample> out;
  out.reserve(n);
  double x = sigma * rng.normal();  // stationary start
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) x = rho * x + innov * sigma * rng.normal();
    ScintillationSample s;
    s.time_s = static_cast<double>(i) * dt_s;
    // unit-mean log-normal, scaled by rain extinction
    s.intensity = extinction * std::exp(x - 0.5 * var);
    s.fade_db = -10.0 * std::log10(s.intensity);
    s.apd_voltage = p.apd_dark_v + p.apd_gain_v * s.intensity;
    s.cmos_mean_pixel = std::clamp(p.pixel_gain * s.intensity + p.pixel_offset, 0.0, 255.0);
    out.push_back(s);
  }
  return out;
}

std::string scintillation_to_csv(const std::vector<ScintillationSample>& series) {
  std::ostringstream os;
  os << "t_s,intensity,fade_db,apd_voltage,cmos_mean_pixel\n";
  for (const auto& s : series)
    os << format_double(s.time_s) << ',' << format_double(s.intensity) << ',' << format_double(s.fade_db)
       << ',' << format_double(s.apd_voltage) << ',' << format_double(s.cmos_mean_pixel) << '\n';
  return os.str();
}

LinkState fsoc_link_state(const OpticalLinkSpec& spec, double distance_km, const AlignmentState& alignment,
                          const WeatherSample& weather, double scint_fade_db, std::optional<int> active_channels) {
  const int channels = active_channels.value_or(spec.wdm_channels);
  if (channels < 0 || channels > spec.wdm_channels) throw ConfigError("active channel count out of range");
  LinkState s;
  s.rsl_dbm = fsoc_rx_power(spec, distance_km, alignment.pointing_error_rad(), weather, scint_fade_db);
  s.snr_db = s.rsl_dbm - spec.rx_sensitivity_dbm;
  s.available = s.rsl_dbm >= spec.rx_sensitivity_dbm && channels > 0;
  s.throughput_bps = s.available ? channels * spec.per_channel_rate_bps : 0.0;
  return s;
}

}  // namespace aralab::fsoc
