#include "aralab/weather.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aralab/csv.hpp"
#include "aralab/error.hpp"

namespace aralab {

std::string to_string(WeatherCode c) {
  switch (c) {
    case WeatherCode::clear: return "clear";
    case WeatherCode::drizzle: return "drizzle";
    case WeatherCode::rain: return "rain";
    case WeatherCode::snow: return "snow";
  }
  return "clear";
}

WeatherCode weather_code_from_string(const std::string& s) {
  if (s == "clear") return WeatherCode::clear;
  if (s == "drizzle") return WeatherCode::drizzle;
  if (s == "rain") return WeatherCode::rain;
  if (s == "snow") return WeatherCode::snow;
  throw ValidationError("unknown weather code '" + s + "'");
}

WeatherSample WeatherSample::raining(double rate_mmh) {
  WeatherSample w;
  w.rain_rate_mmh = rate_mmh;
  w.code = classify_weather(rate_mmh, w.temperature_c);
  return w;
}

WeatherCode classify_weather(double rain_rate_mmh, double temperature_c) {
  if (rain_rate_mmh <= 0) return WeatherCode::clear;
  if (temperature_c < 0) return WeatherCode::snow;
  return rain_rate_mmh <= kDrizzleMaxRate ? WeatherCode::drizzle : WeatherCode::rain;
}

void validate(const WeatherSample& w) {
  if (!(w.rain_rate_mmh >= 0)) throw ValidationError("rain rate must be >= 0");
  if (w.code != classify_weather(w.rain_rate_mmh, w.temperature_c))
    throw ValidationError("weather code '" + to_string(w.code) + "' inconsistent with rain rate " +
                          format_double(w.rain_rate_mmh));
}

WeatherSeries weather_feed(const std::vector<std::string>& sites, double duration_s, RngStream rng,
                           const WeatherFeedParams& p) {
  if (!(duration_s > 0)) throw ValidationError("duration must be > 0");
  if (!(p.step_s > 0)) throw ValidationError("step must be > 0");
  if (p.correlation < 0 || p.correlation >= 1) throw ValidationError("correlation must be in [0, 1)");
  const auto n = static_cast<std::size_t>(std::floor(duration_s / p.step_s + 1e-9));
  const double innov = std::sqrt(1.0 - p.correlation * p.correlation);

  RngStream regional = rng.fork(0);
  std::vector<RngStream> local;
  for (std::size_t i = 0; i < sites.size(); ++i) local.push_back(rng.fork(100 + i));

  WeatherSeries out;
  for (const auto& s : sites) out[s].reserve(n);
  double driver = regional.normal();
  double temp = regional.normal();
  double wind = regional.normal();
  std::vector<double> noise(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) noise[i] = local[i].normal();

  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      driver = p.correlation * driver + innov * regional.normal();
      temp = p.correlation * temp + innov * regional.normal();
      wind = p.correlation * wind + innov * regional.normal();
      for (std::size_t i = 0; i < sites.size(); ++i)
        noise[i] = p.correlation * noise[i] + innov * local[i].normal();
    }
    for (std::size_t i = 0; i < sites.size(); ++i) {
      WeatherSample w;
      w.time_s = static_cast<double>(t) * p.step_s;
      w.site = sites[i];
      const double field = p.driver_weight * driver + p.local_noise * noise[i];
      w.rain_rate_mmh = field > p.rain_threshold ? p.rain_scale_mmh * (field - p.rain_threshold) : 0.0;
      w.temperature_c = p.mean_temperature_c + 3.0 * temp;
      w.wind_mps = std::max(0.0, p.mean_wind_mps + 1.5 * wind);
      w.code = classify_weather(w.rain_rate_mmh, w.temperature_c);
      out[sites[i]].push_back(std::move(w));
    }
  }
  return out;
}

WeatherSeries weather_feed_from_trace(const std::string& csv_text) {
  std::istringstream is(csv_text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  WeatherSeries out;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split_csv_line(line);
    if (!header) {
      header = true;
      if (!f.empty() && f[0] == "t_s") continue;
      throw ParseError("weather trace line " + std::to_string(lineno) +
                       ": expected header t_s,site,rain_rate_mmh,wind_mps,temperature_c");
    }
    if (f.size() != 5) throw ParseError("weather trace line " + std::to_string(lineno) + ": expected 5 fields");
    const std::string where = " on weather trace line " + std::to_string(lineno);
    WeatherSample w;
    w.time_s = parse_double(f[0], "t_s" + where);
    w.site = f[1];
    w.rain_rate_mmh = parse_double(f[2], "rain_rate_mmh" + where);
    w.wind_mps = parse_double(f[3], "wind_mps" + where);
    w.temperature_c = parse_double(f[4], "temperature_c" + where);
    if (w.rain_rate_mmh < 0) throw ParseError("negative rain rate" + where);
    w.code = classify_weather(w.rain_rate_mmh, w.temperature_c);
    auto& series = out[w.site];
    if (!series.empty() && !(w.time_s > series.back().time_s))
      throw ParseError("weather trace times must increase per site" + where);
    series.push_back(std::move(w));
  }
  if (!header) throw ParseError("weather trace is empty");
  return out;
}

std::string weather_series_to_csv(const WeatherSeries& series) {
  std::ostringstream os;
  os << "t_s,site,rain_rate_mmh,wind_mps,temperature_c\n";
  for (const auto& [site, samples] : series)
    for (const auto& w : samples)
      os << format_double(w.time_s) << ',' << site << ',' << format_double(w.rain_rate_mmh) << ','
         << format_double(w.wind_mps) << ',' << format_double(w.temperature_c) << '\n';
  return os.str();
}

}  // namespace aralab
