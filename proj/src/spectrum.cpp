#include "aralab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aralab/csv.hpp"
#include "aralab/error.hpp"

namespace aralab::spectrum {

std::size_t channel_count(const Band& band) {
  if (!(band.high_hz > band.low_hz) || !(band.channel_width_hz > 0)) throw ValidationError("invalid band");
  const double n = (band.high_hz - band.low_hz) / band.channel_width_hz;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n)) throw ValidationError("band width is not a whole number of channels");
  return static_cast<std::size_t>(r);
}

double received_power_dbm(double tx_power_dbm, double distance_m, double freq_hz) {
  const double d = std::max(distance_m, 1.0);
  return tx_power_dbm - (20.0 * std::log10(d) + 20.0 * std::log10(freq_hz) - 147.55);
}

OccupancyGrid spectrum_scan(const std::string& site, const Band& band, double duration_s,
                            const std::vector<Emitter>& emitters, RngStream rng, const ScanParams& params) {
  if (!(duration_s > 0) || !(params.slot_s > 0)) throw ValidationError("duration and slot must be > 0");
  OccupancyGrid g;
  g.band = band;
  g.channels = channel_count(band);
  g.slot_s = params.slot_s;
  g.site = site;
  g.slots = static_cast<std::size_t>(std::floor(duration_s / params.slot_s + 1e-9));
  g.dbm.resize(g.channels * g.slots);
  RngStream noise = rng.fork(1);
  RngStream activity = rng.fork(2);
  for (std::size_t s = 0; s < g.slots; ++s) {
    const double t = static_cast<double>(s) * params.slot_s;
    for (std::size_t c = 0; c < g.channels; ++c)
      g.dbm[s * g.channels + c] = kFloorDbm + noise.uniform() * params.noise_spread_db;
    for (const auto& e : emitters) {
      // One draw per emitter and slot keeps the stream layout input-independent.
      const bool on = activity.uniform() < e.duty_cycle;
      if (!on || t < e.start_s || t >= e.end_s) continue;
      for (std::size_t c = 0; c < g.channels; ++c) {
        const double lo = g.channel_low_hz(c);
        const double hi = lo + band.channel_width_hz;
        if (e.high_hz <= lo || e.low_hz >= hi) continue;
        double& cell = g.dbm[s * g.channels + c];
        cell = std::max(cell, e.rx_power_dbm);
      }
    }
    for (std::size_t c = 0; c < g.channels; ++c) {
      double& cell = g.dbm[s * g.channels + c];
      cell = std::clamp(cell, kFloorDbm, kCeilingDbm);
    }
  }
  return g;
}

std::vector<std::size_t> available_channels(const OccupancyGrid& grid, double quantile, double margin_db) {
  std::vector<std::size_t> out;
  std::vector<double> col(grid.slots);
  for (std::size_t c = 0; c < grid.channels; ++c) {
    for (std::size_t s = 0; s < grid.slots; ++s) col[s] = grid.at(c, s);
    if (col.empty()) continue;
    std::sort(col.begin(), col.end());
    const auto idx = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(col.size()))) - 1;
    if (col[std::min(idx, col.size() - 1)] <= kFloorDbm + margin_db) out.push_back(c);
  }
  return out;
}

std::vector<Emitter> rural_primary_users(const Band& band, RngStream rng) {
  const std::size_t n = channel_count(band);
  // Fixed channel plan: nine broadcasters and seven microphone channels.
  const std::vector<std::size_t> broadcast = {1, 4, 7, 9, 14, 19, 22, 27, 33};
  const std::vector<std::size_t> mics = {2, 11, 16, 24, 29, 31, 36};
  std::vector<Emitter> out;
  for (std::size_t c : broadcast) {
    if (c >= n) continue;
    const double lo = band.low_hz + c * band.channel_width_hz;
    out.push_back({"tv-" + std::to_string(c), lo, lo + band.channel_width_hz, rng.uniform(-75.0, -35.0), 0.0, 1e300, 1.0});
  }
  for (std::size_t c : mics) {
    if (c >= n) continue;
    const double lo = band.low_hz + c * band.channel_width_hz + 1e6;
    out.push_back({"mic-" + std::to_string(c), lo, lo + 0.2e6, rng.uniform(-95.0, -70.0), 0.0, 1e300,
                   rng.uniform(0.3, 0.8)});
  }
  return out;
}

std::string occupancy_to_csv(const OccupancyGrid& grid) {
  std::ostringstream os;
  os << "slot";
  for (std::size_t c = 0; c < grid.channels; ++c) os << ",ch" << c;
  os << '\n';
  for (std::size_t s = 0; s < grid.slots; ++s) {
    os << s;
    for (std::size_t c = 0; c < grid.channels; ++c) os << ',' << format_fixed(grid.at(c, s), 2);
    os << '\n';
  }
  return os.str();
}

}  // namespace aralab::spectrum
