#pragma once

#include <vector>

namespace aralab {

/// Power-law specific rain attenuation gamma = k * R^alpha (dB/km).
struct RainCoefficient {
  double freq_ghz;
  double k;
  double alpha;
};

/// Frequency table of (k, alpha); log-frequency interpolation between rows.
class RainCoefficientTable {
public:
  RainCoefficientTable();  // standard vertical-polarization values, 1-100 GHz
  explicit RainCoefficientTable(std::vector<RainCoefficient> rows);

  /// k and alpha at a carrier; clamps outside the tabulated range.
  RainCoefficient at(double carrier_hz) const;
  const std::vector<RainCoefficient>& rows() const { return rows_; }

  static const RainCoefficientTable& standard();

private:
  std::vector<RainCoefficient> rows_;
};

/// Specific attenuation in dB/km.
double specific_rain_attenuation_db_per_km(double carrier_hz, double rain_rate_mmh,
                                           const RainCoefficientTable& table = RainCoefficientTable::standard());

/// Uniform-rain attenuation over a path: linear in path length.
double rain_attenuation_db(double carrier_hz, double rain_rate_mmh, double path_km,
                           const RainCoefficientTable& table = RainCoefficientTable::standard());

/// Effective rain-cell path length for a long terrestrial hop
/// (L / (1 + L / d0), d0 = 35 exp(-0.015 R)).
double effective_rain_path_km(double path_km, double rain_rate_mmh);

}  // namespace aralab
