#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aralab/rng.hpp"
#include "aralab/weather.hpp"
#include "aralab/xhaul.hpp"

namespace aralab::fsoc {

/// Pointing loss per unit of (error / half-angle) squared: 10 log10(e^2).
inline constexpr double kPointingLossDb = 8.685889638065035;
inline constexpr double kMicrostepRad = 0.23e-6;

struct OpticalLinkSpec {
  double tx_power_dbm = 33.0;
  double divergence_rad = 35e-6;  // full angle
  double rx_sensitivity_dbm = -24.0;
  int wdm_channels = 16;
  double per_channel_rate_bps = 1e10;
  double rx_aperture_m = 0.1;
  // Lumped coupling/optics losses; calibrated so a clear, aligned
  // 10.15 km link receives -6.86 dBm.
  double system_gain_db = -28.8494;
};

void validate(const OpticalLinkSpec& spec);

/// Spreading loss of the beam over the receive aperture, never negative.
double geometric_loss_db(const OpticalLinkSpec& spec, double distance_km);
/// 8.686 (err / half-angle)^2 dB.
double pointing_loss_db(const OpticalLinkSpec& spec, double pointing_error_rad);
/// Rain extinction of the optical carrier, dB/km.
double optical_rain_attenuation_db_per_km(double rain_rate_mmh);

/// Received power; `scint_fade_db` is the instantaneous scintillation fade
/// (positive = weaker).
double fsoc_rx_power(const OpticalLinkSpec& spec, double distance_km, double pointing_error_rad,
                     const WeatherSample& weather, double scint_fade_db = 0.0);

/// System gain that makes an aligned, clear link at `distance_km` receive
/// `target_dbm`.
double calibrate_system_gain(OpticalLinkSpec spec, double distance_km, double target_dbm);

struct ScintillationParams {
  double base_log_variance = 0.02;
  double log_variance_per_mmh = 0.01;
  double correlation_time_s = 0.05;
  double extinction_per_mmh = 0.01;  // beacon intensity scale exp(-k R)
  double pixel_gain = 180.0;
  double pixel_offset = 20.0;
  double apd_dark_v = 0.05;
  double apd_gain_v = 1.2;
};

struct ScintillationSample {
  double time_s = 0.0;
  double intensity = 1.0;  // normalized, 1 = clear-sky mean
  double fade_db = 0.0;
  double apd_voltage = 0.0;
  double cmos_mean_pixel = 0.0;
};

std::vector<ScintillationSample> scintillation_series(double rain_rate_mmh, double duration_s, double dt_s,
                                                      RngStream rng, const ScintillationParams& params = {});

std::string scintillation_to_csv(const std::vector<ScintillationSample>& series);

// ---------------------------------------------------------------- alignment

enum class AlignMode { search_coarse, align_fine, align_ultrafine, locked };
std::string to_string(AlignMode m);

struct MotorCommand {
  std::int64_t az = 0;
  std::int64_t el = 0;
  bool operator==(const MotorCommand&) const = default;
};

struct SensorFrame {
  double apd_voltage = 0.0;
  std::optional<std::pair<double, double>> cmos_centroid;  // pixels
  double cmos_mean_pixel = 0.0;
  double rx_power_dbm = -100.0;
};

struct AlignmentThresholds {
  double apd_threshold_v = 0.65;
  double fine_exit_rad = 30e-6;
  double relock_threshold_dbm = -20.0;
  int hold_frames = 50;
  double apd_fov_rad = 2e-3;
  double scan_half_range_rad = 0.10471975511965977;  // 6 degrees
  double pixel_ifov_rad = 5e-6;
  double microstep_rad = kMicrostepRad;
};

struct AlignmentState {
  AlignMode mode = AlignMode::search_coarse;
  double error_az_rad = 0.0;  // plant truth, maintained by the simulator
  double error_el_rad = 0.0;
  std::int64_t motor_az = 0;
  std::int64_t motor_el = 0;

  // coarse spiral, in scan-grid units relative to the scan origin
  std::int64_t spiral_x = 0;
  std::int64_t spiral_y = 0;
  int spiral_dir = 0;
  std::int64_t spiral_leg = 1;
  std::int64_t spiral_progress = 0;
  int spiral_turns = 0;
  std::int64_t spiral_count = 0;

  // ultrafine hill climb
  bool uf_started = false;
  int uf_axis = 0;
  int uf_dir = 1;
  bool uf_moved = false;
  int uf_idle_axes = 0;
  double uf_best_dbm = 0.0;

  int hold_count = 0;

  double pointing_error_rad() const;
};

/// One controller step. Movement is returned in whole microsteps.
std::pair<AlignmentState, MotorCommand> step_alignment(const AlignmentState& state, const SensorFrame& frame,
                                                       const AlignmentThresholds& thresholds = {});

/// Spiral step length in microsteps (APD field of view / 4).
std::int64_t coarse_step_microsteps(const AlignmentThresholds& t);
/// Number of spiral positions needed to cover the scan range.
std::int64_t coarse_scan_positions(const AlignmentThresholds& t);

/// Sensor model: what the terminal sees at a given true pointing error.
struct SensorModel {
  OpticalLinkSpec spec;
  ScintillationParams scint;
  double distance_km = 10.15;
  double centroid_noise_rad = 10e-6;
  double camera_fov_rad = 4e-3;
};

SensorFrame sense(const SensorModel& model, double err_az_rad, double err_el_rad, const WeatherSample& weather,
                  double intensity, RngStream& rng);

struct AlignmentTransition {
  std::int64_t step = 0;
  AlignMode mode = AlignMode::search_coarse;
  double pointing_error_rad = 0.0;
};

struct AlignmentRun {
  bool converged = false;
  std::int64_t steps = 0;
  AlignmentState final_state;
  std::vector<AlignmentTransition> transitions;
  bool quantized = true;  // every command was whole microsteps (always true by type)
};

/// Closed loop from an initial pointing error, scintillation off.
AlignmentRun simulate_alignment(double err_az_rad, double err_el_rad, const SensorModel& model,
                                const AlignmentThresholds& thresholds, std::int64_t max_steps, RngStream rng);

// ------------------------------------------------------------------ beacon

struct BeaconFrame {
  double rx_power_report_dbm = 0.0;  // carried at 0.01 dB resolution
  std::vector<std::uint8_t> payload;  // bits, 0/1
};

inline constexpr std::size_t kBeaconPreambleBits = 128;
inline constexpr std::size_t kBeaconIdleBits = 16;

std::vector<std::uint8_t> beacon_preamble();
/// Preamble, 16-bit report, 16-bit length, payload.
std::vector<std::uint8_t> beacon_frame_bits(const BeaconFrame& frame);

/// Receiver: threshold at A/2, correlate for the preamble within the idle
/// window, then decode. nullopt when no preamble is found.
struct BeaconDecode {
  BeaconFrame frame;
  std::size_t offset = 0;
  std::vector<std::uint8_t> raw_bits;  // hard decisions after the preamble
};
std::optional<BeaconDecode> beacon_receive(const std::vector<double>& samples, double amplitude);

struct BeaconResult {
  bool frame_lost = false;
  std::vector<std::uint8_t> decoded;
  double rx_power_report_dbm = 0.0;
  std::size_t bit_errors = 0;  // over every bit after the preamble
  std::size_t bits = 0;
  double ber = 0.0;
};

/// OOK over additive Gaussian noise; snr_db is peak SNR A^2/sigma^2
/// (+infinity for a noiseless channel).
BeaconResult beacon_roundtrip(const std::vector<std::uint8_t>& payload, double snr_db, RngStream& rng,
                              double rate_bps = 1e6, double rx_power_report_dbm = 0.0);

/// Analytic OOK bit error rate Q(sqrt(snr)/2) for a midpoint threshold.
double ook_ber(double snr_db);

// ---------------------------------------------------------------- link state

/// Mesh view of the optical link: rsl = rx power, snr = margin over
/// sensitivity, throughput = active channels x per-channel rate.
LinkState fsoc_link_state(const OpticalLinkSpec& spec, double distance_km, const AlignmentState& alignment,
                          const WeatherSample& weather, double scint_fade_db = 0.0,
                          std::optional<int> active_channels = std::nullopt);

}  // namespace aralab::fsoc
