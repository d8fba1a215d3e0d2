#pragma once

#include <map>
#include <string>
#include <vector>

#include "aralab/rng.hpp"

namespace aralab {

enum class WeatherCode { clear, drizzle, rain, snow };
std::string to_string(WeatherCode c);
WeatherCode weather_code_from_string(const std::string& s);

/// Rain-rate thresholds (mm/h) separating the weather codes.
inline constexpr double kDrizzleMaxRate = 2.5;

struct WeatherSample {
  double time_s = 0.0;
  std::string site;
  double rain_rate_mmh = 0.0;
  double wind_mps = 0.0;
  double temperature_c = 15.0;
  WeatherCode code = WeatherCode::clear;

  static WeatherSample clear_sky() { return {}; }
  static WeatherSample raining(double rate_mmh);
  bool operator==(const WeatherSample&) const = default;
};

/// Code implied by rain rate and temperature.
WeatherCode classify_weather(double rain_rate_mmh, double temperature_c);
/// Throws ValidationError when rain rate is negative or the code disagrees
/// with the rain rate.
void validate(const WeatherSample& w);

struct WeatherFeedParams {
  double step_s = 60.0;
  // Rain comes from a latent Gaussian field: shared regional driver plus
  // site-local noise; it rains where the field exceeds `rain_threshold`.
  double driver_weight = 0.8;
  double local_noise = 0.6;
  double correlation = 0.98;  // AR(1) coefficient per step
  double rain_threshold = 0.8;
  double rain_scale_mmh = 12.0;
  double mean_temperature_c = 12.0;
  double mean_wind_mps = 4.0;
};

using WeatherSeries = std::map<std::string, std::vector<WeatherSample>>;

/// Synthetic per-site weather; identical seeds give identical series.
WeatherSeries weather_feed(const std::vector<std::string>& sites, double duration_s,
                           RngStream rng, const WeatherFeedParams& params = {});

/// Replays a recorded trace: CSV `t_s,site,rain_rate_mmh,wind_mps,temperature_c`.
WeatherSeries weather_feed_from_trace(const std::string& csv_text);
std::string weather_series_to_csv(const WeatherSeries& series);

}  // namespace aralab
