#pragma once

#include <string>
#include <vector>

#include "aralab/rng.hpp"

namespace aralab::spectrum {

inline constexpr double kFloorDbm = -120.0;
inline constexpr double kCeilingDbm = -20.0;

struct Band {
  double low_hz = 470e6;
  double high_hz = 698e6;
  double channel_width_hz = 6e6;
};

/// Throws ValidationError unless the band splits into whole channels.
std::size_t channel_count(const Band& band);

/// A transmitter as seen by the sensor: received power over a frequency
/// range during [start_s, end_s), optionally on/off with a duty cycle.
struct Emitter {
  std::string id;
  double low_hz = 0.0;
  double high_hz = 0.0;
  double rx_power_dbm = -60.0;
  double start_s = 0.0;
  double end_s = 1e300;
  double duty_cycle = 1.0;  // fraction of slots on, drawn per slot
};

/// Received level of a transmitter at a distance (free-space, 0 dBi).
double received_power_dbm(double tx_power_dbm, double distance_m, double freq_hz);

struct OccupancyGrid {
  Band band;
  std::size_t channels = 0;
  std::size_t slots = 0;
  double slot_s = 1.0;
  std::string site;
  std::vector<double> dbm;  // slot-major: dbm[slot * channels + channel]

  double at(std::size_t channel, std::size_t slot) const { return dbm[slot * channels + channel]; }
  double channel_low_hz(std::size_t channel) const { return band.low_hz + channel * band.channel_width_hz; }
};

struct ScanParams {
  double slot_s = 1.0;
  double noise_spread_db = 2.0;  // floor draw is U[floor, floor + spread]
};

OccupancyGrid spectrum_scan(const std::string& site, const Band& band, double duration_s,
                            const std::vector<Emitter>& emitters, RngStream rng, const ScanParams& params = {});

/// Channels whose q-quantile power stays within `margin_db` of the floor.
std::vector<std::size_t> available_channels(const OccupancyGrid& grid, double quantile = 0.95,
                                            double margin_db = 3.0);

/// The shipped rural scenario: broadcasters and wireless microphones on a
/// minority of the 38 channels.
std::vector<Emitter> rural_primary_users(const Band& band, RngStream rng);

std::string occupancy_to_csv(const OccupancyGrid& grid);

}  // namespace aralab::spectrum
