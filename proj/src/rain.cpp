#include "aralab/rain.hpp"

#include <algorithm>
#include <cmath>

#include "aralab/error.hpp"

namespace aralab {

RainCoefficientTable::RainCoefficientTable()
    : RainCoefficientTable({
          {1.0, 0.0000308, 0.8592},  {2.0, 0.0000998, 0.9490}, {4.0, 0.0002461, 1.2476},
          {6.0, 0.0004878, 1.5728},  {7.0, 0.001425, 1.4745},  {8.0, 0.003450, 1.3797},
          {10.0, 0.01129, 1.2156},   {11.0, 0.01731, 1.1617},  {12.0, 0.02455, 1.1216},
          {15.0, 0.05008, 1.0440},   {20.0, 0.09611, 0.9847},  {25.0, 0.1533, 0.9491},
          {30.0, 0.2291, 0.9129},    {35.0, 0.3224, 0.8761},   {40.0, 0.4274, 0.8421},
          {50.0, 0.6472, 0.7871},    {60.0, 0.8515, 0.7486},   {70.0, 1.0253, 0.7215},
          {80.0, 1.1668, 0.7021},    {90.0, 1.2795, 0.6876},   {100.0, 1.3680, 0.6765},
      }) {}

RainCoefficientTable::RainCoefficientTable(std::vector<RainCoefficient> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ValidationError("rain coefficient table is empty");
  std::sort(rows_.begin(), rows_.end(),
            [](const RainCoefficient& a, const RainCoefficient& b) { return a.freq_ghz < b.freq_ghz; });
  for (const auto& r : rows_)
    if (r.freq_ghz <= 0 || r.k <= 0) throw ValidationError("rain coefficients must be positive");
}

const RainCoefficientTable& RainCoefficientTable::standard() {
  static const RainCoefficientTable table;
  return table;
}

RainCoefficient RainCoefficientTable::at(double carrier_hz) const {
  const double f = carrier_hz / 1e9;
  if (f <= rows_.front().freq_ghz) return {f, rows_.front().k, rows_.front().alpha};
  if (f >= rows_.back().freq_ghz) return {f, rows_.back().k, rows_.back().alpha};
  auto hi = std::upper_bound(rows_.begin(), rows_.end(), f,
                             [](double v, const RainCoefficient& r) { return v < r.freq_ghz; });
  auto lo = hi - 1;
  const double t = std::log(f / lo->freq_ghz) / std::log(hi->freq_ghz / lo->freq_ghz);
  const double k = std::exp(std::log(lo->k) + t * (std::log(hi->k) - std::log(lo->k)));
  const double alpha = lo->alpha + t * (hi->alpha - lo->alpha);
  return {f, k, alpha};
}

double specific_rain_attenuation_db_per_km(double carrier_hz, double rain_rate_mmh,
                                           const RainCoefficientTable& table) {
  if (rain_rate_mmh < 0) throw ValidationError("rain rate must be >= 0");
  if (rain_rate_mmh == 0.0) return 0.0;
  const auto c = table.at(carrier_hz);
  return c.k * std::pow(rain_rate_mmh, c.alpha);
}

double rain_attenuation_db(double carrier_hz, double rain_rate_mmh, double path_km,
                           const RainCoefficientTable& table) {
  if (path_km < 0) throw ValidationError("path length must be >= 0");
  return specific_rain_attenuation_db_per_km(carrier_hz, rain_rate_mmh, table) * path_km;
}

double effective_rain_path_km(double path_km, double rain_rate_mmh) {
  const double r = std::min(std::max(rain_rate_mmh, 0.0), 100.0);
  const double d0 = 35.0 * std::exp(-0.015 * r);
  return path_km / (1.0 + path_km / d0);
}

}  // namespace aralab
