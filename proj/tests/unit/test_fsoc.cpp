#include <doctest.h>

#include <cmath>
#include <set>

#include "aralab/error.hpp"
#include "aralab/fsoc.hpp"

using namespace aralab;
using namespace aralab::fsoc;

namespace {

constexpr double kDeg = M_PI / 180.0;

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

SensorFrame frame(double apd, double rx_dbm, std::optional<std::pair<double, double>> centroid = std::nullopt) {
  SensorFrame f;
  f.apd_voltage = apd;
  f.rx_power_dbm = rx_dbm;
  f.cmos_centroid = centroid;
  return f;
}

}  // namespace

TEST_CASE("received power at the long link") {
  const OpticalLinkSpec spec;
  const double rx = fsoc_rx_power(spec, 10.15, 0.0, WeatherSample::clear_sky());
  CHECK(rx == doctest::Approx(-6.86).epsilon(0.1 / 6.86));
  CHECK(rx - spec.rx_sensitivity_dbm == doctest::Approx(17.0).epsilon(0.5 / 17.0));

  // Independent budget: beam footprint d * theta spread over the aperture.
  const double geo = 20 * std::log10(10150.0 * 35e-6 / 0.1);
  CHECK(geometric_loss_db(spec, 10.15) == doctest::Approx(geo));
  CHECK(rx == doctest::Approx(33.0 + spec.system_gain_db - geo));
  // A beam smaller than the aperture never gains power.
  CHECK(geometric_loss_db(spec, 0.1) == 0.0);
}

TEST_CASE("system gain calibration inverts the budget") {
  OpticalLinkSpec spec;
  const double g = calibrate_system_gain(spec, 10.15, -6.86);
  CHECK(g == doctest::Approx(spec.system_gain_db).epsilon(1e-4));
  spec.system_gain_db = calibrate_system_gain(spec, 3.0, -1.0);
  CHECK(fsoc_rx_power(spec, 3.0, 0.0, WeatherSample::clear_sky()) == doctest::Approx(-1.0));
}

TEST_CASE("pointing loss at the beam half-angle") {
  const OpticalLinkSpec spec;
  // exp(-2 x^2) Gaussian beam edge expressed in dB: 10 log10(e^2).
  const double oracle = 20.0 / std::log(10.0);
  CHECK(pointing_loss_db(spec, spec.divergence_rad / 2) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(pointing_loss_db(spec, spec.divergence_rad / 2) - 8.69) <= 0.01);
  CHECK(pointing_loss_db(spec, 0.0) == 0.0);
  CHECK(pointing_loss_db(spec, spec.divergence_rad / 4) == doctest::Approx(oracle / 4));
}

TEST_CASE("optical rain attenuation scales with path length") {
  const OpticalLinkSpec spec;
  const double clear = fsoc_rx_power(spec, 5.0, 0.0, WeatherSample::clear_sky());
  const double wet = fsoc_rx_power(spec, 5.0, 0.0, WeatherSample::raining(25.0));
  CHECK(clear - wet == doctest::Approx(1.076 * std::pow(25.0, 0.67) * 5.0));
  CHECK(optical_rain_attenuation_db_per_km(0.0) == 0.0);
  CHECK_THROWS_AS(optical_rain_attenuation_db_per_km(-1.0), ValidationError);
  CHECK_THROWS_AS(fsoc_rx_power(spec, 0.0, 0.0, WeatherSample::clear_sky()), ValidationError);
}

TEST_CASE("scintillation: rain lowers the mean pixel and raises its variance") {
  const auto dry = scintillation_series(0.0, 1000.0, 0.1, RngStream(5, 1));
  const auto wet = scintillation_series(25.0, 1000.0, 0.1, RngStream(5, 2));
  REQUIRE(dry.size() == 10000);
  REQUIRE(wet.size() == 10000);
  std::vector<double> pd, pw, id;
  for (const auto& s : dry) {
    pd.push_back(s.cmos_mean_pixel);
    id.push_back(s.intensity);
  }
  for (const auto& s : wet) pw.push_back(s.cmos_mean_pixel);
  CHECK(mean_of(pw) < mean_of(pd));
  CHECK(var_of(pw) > var_of(pd));
  // Clear-sky intensity is unit-mean log-normal.
  CHECK(mean_of(id) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("scintillation derived fields and determinism") {
  const auto a = scintillation_series(10.0, 10.0, 0.01, RngStream(9));
  const auto b = scintillation_series(10.0, 10.0, 0.01, RngStream(9));
  REQUIRE(a.size() == b.size());
  const ScintillationParams p;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].intensity == b[i].intensity);
    CHECK(a[i].fade_db == doctest::Approx(-10 * std::log10(a[i].intensity)));
    CHECK(a[i].apd_voltage == doctest::Approx(p.apd_dark_v + p.apd_gain_v * a[i].intensity));
    CHECK(a[i].cmos_mean_pixel >= 0.0);
    CHECK(a[i].cmos_mean_pixel <= 255.0);
  }
  CHECK_THROWS_AS(scintillation_series(-1.0, 1.0, 0.1, RngStream(1)), ValidationError);
  CHECK_THROWS_AS(scintillation_series(1.0, 0.0, 0.1, RngStream(1)), ValidationError);
}

TEST_CASE("coarse spiral visits distinct grid points and returns to origin") {
  AlignmentThresholds t;
  t.scan_half_range_rad = 2e-3;  // small grid to walk exhaustively
  const auto step = coarse_step_microsteps(t);
  CHECK(step == std::llround(t.apd_fov_rad / 4 / t.microstep_rad));
  const auto n = coarse_scan_positions(t);
  const auto rings = static_cast<std::int64_t>(std::ceil(t.scan_half_range_rad / (step * t.microstep_rad))) + 1;
  CHECK(n == (2 * rings + 1) * (2 * rings + 1));

  AlignmentState s;
  std::set<std::pair<std::int64_t, std::int64_t>> seen{{0, 0}};
  const auto off = frame(0.0, -100.0);
  for (std::int64_t i = 0; i + 1 < n; ++i) {
    auto [next, cmd] = step_alignment(s, off, t);
    CHECK(std::abs(cmd.az) + std::abs(cmd.el) == step);
    s = next;
    CHECK(seen.insert({s.motor_az, s.motor_el}).second);
  }
  CHECK(static_cast<std::int64_t>(seen.size()) == n);
  for (const auto& [x, y] : seen) {
    CHECK(std::abs(x) <= rings * step);
    CHECK(std::abs(y) <= rings * step);
  }
  auto [back, cmd] = step_alignment(s, off, t);
  CHECK(back.motor_az == 0);
  CHECK(back.motor_el == 0);
  CHECK(back.mode == AlignMode::search_coarse);
}

TEST_CASE("mode transitions") {
  const AlignmentThresholds t;
  AlignmentState s;
  // Beacon on the APD moves coarse search into fine alignment.
  s = step_alignment(s, frame(1.0, -10.0), t).first;
  CHECK(s.mode == AlignMode::align_fine);

  // Fine moves against the centroid in whole microsteps.
  auto [f1, cmd] = step_alignment(s, frame(1.0, -10.0, std::make_pair(20.0, -10.0)), t);
  CHECK(f1.mode == AlignMode::align_fine);
  CHECK(cmd.az == std::llround(-20.0 * t.pixel_ifov_rad / t.microstep_rad));
  CHECK(cmd.el == std::llround(10.0 * t.pixel_ifov_rad / t.microstep_rad));

  // Centroid inside the exit radius goes to ultrafine.
  auto uf = step_alignment(s, frame(1.0, -10.0, std::make_pair(1.0, 1.0)), t).first;
  CHECK(uf.mode == AlignMode::align_ultrafine);

  // Losing the APD from any tracking mode restarts the coarse search.
  for (auto m : {AlignMode::align_fine, AlignMode::align_ultrafine, AlignMode::locked}) {
    AlignmentState x;
    x.mode = m;
    CHECK(step_alignment(x, frame(0.1, -10.0), t).first.mode == AlignMode::search_coarse);
  }

  // Locked falls back to fine only after hold_frames consecutive weak frames.
  AlignmentState lk;
  lk.mode = AlignMode::locked;
  for (int i = 0; i < t.hold_frames - 1; ++i) {
    lk = step_alignment(lk, frame(1.0, -21.0), t).first;
    CHECK(lk.mode == AlignMode::locked);
  }
  auto reset = step_alignment(lk, frame(1.0, -19.0), t).first;
  CHECK(reset.mode == AlignMode::locked);
  CHECK(reset.hold_count == 0);
  lk = step_alignment(lk, frame(1.0, -21.0), t).first;
  CHECK(lk.mode == AlignMode::align_fine);
}

TEST_CASE("closed loop converges from offsets across the scan range") {
  const SensorModel model;
  const AlignmentThresholds t;
  RngStream pick(77);
  for (int trial = 0; trial < 10; ++trial) {
    const double az = pick.uniform(-6.0, 6.0) * kDeg;
    const double el = pick.uniform(-6.0, 6.0) * kDeg;
    const auto run = simulate_alignment(az, el, model, t, 400000, RngStream(100 + trial));
    CHECK(run.converged);
    CHECK(run.final_state.mode == AlignMode::locked);
    CHECK(run.final_state.pointing_error_rad() < t.fine_exit_rad);
    // Truth and motor stay consistent: every move was in whole microsteps.
    CHECK(run.final_state.error_az_rad ==
          doctest::Approx(az + run.final_state.motor_az * t.microstep_rad).epsilon(1e-9));
    CHECK(run.final_state.error_el_rad ==
          doctest::Approx(el + run.final_state.motor_el * t.microstep_rad).epsilon(1e-9));
  }
  CHECK_THROWS_AS(simulate_alignment(0, 0, model, t, 0, RngStream(1)), ValidationError);
}

TEST_CASE("beacon frame layout") {
  const auto pre = beacon_preamble();
  REQUIRE(pre.size() == kBeaconPreambleBits);
  int ones = 0;
  for (auto b : pre) ones += b;
  CHECK(ones == static_cast<int>(kBeaconPreambleBits / 2));
  const std::vector<std::uint8_t> payload{1, 0, 1, 1, 0};
  const auto bits = beacon_frame_bits({-6.86, payload});
  CHECK(bits.size() == kBeaconPreambleBits + 32 + payload.size());
  CHECK_THROWS_AS(beacon_frame_bits({0.0, {}}), ValidationError);
  CHECK_THROWS_AS(beacon_frame_bits({0.0, {2}}), ValidationError);
}

TEST_CASE("beacon roundtrip") {
  RngStream rng(3);
  std::vector<std::uint8_t> payload(200);
  for (auto& b : payload) b = static_cast<std::uint8_t>(rng.below(2));
  for (int i = 0; i < 20; ++i) {
    const auto r = beacon_roundtrip(payload, 30.0, rng, 1e6, -6.86);
    REQUIRE_FALSE(r.frame_lost);
    CHECK(r.bit_errors == 0);
    CHECK(r.decoded == payload);
    CHECK(r.rx_power_report_dbm == doctest::Approx(-6.86));
  }
  const auto clean = beacon_roundtrip(payload, INFINITY, rng);
  CHECK(clean.decoded == payload);
  CHECK(ook_ber(INFINITY) == 0.0);
}

TEST_CASE("beacon bit error rate matches the OOK curve") {
  // Q(sqrt(snr)/2) written with erfc directly.
  const double snr_db = 12.0;
  const double q = 0.5 * std::erfc(std::sqrt(std::pow(10.0, 1.2)) / 2.0 / std::sqrt(2.0));
  CHECK(ook_ber(snr_db) == doctest::Approx(q));

  RngStream rng(11);
  std::vector<std::uint8_t> payload(2000);
  for (auto& b : payload) b = static_cast<std::uint8_t>(rng.below(2));
  std::size_t errors = 0, bits = 0;
  for (int i = 0; i < 20; ++i) {
    const auto r = beacon_roundtrip(payload, snr_db, rng);
    REQUIRE_FALSE(r.frame_lost);
    errors += r.bit_errors;
    bits += r.bits;
  }
  const double ber = static_cast<double>(errors) / static_cast<double>(bits);
  const double sd = std::sqrt(q * (1 - q) / static_cast<double>(bits));
  CHECK(std::abs(ber - q) < 5 * sd);
}

TEST_CASE("optical link state for the mesh") {
  const OpticalLinkSpec spec;
  AlignmentState aligned;
  const auto up = fsoc_link_state(spec, 10.15, aligned, WeatherSample::clear_sky());
  CHECK(up.available);
  CHECK(up.throughput_bps == doctest::Approx(16 * 1e10));
  CHECK(up.snr_db == doctest::Approx(up.rsl_dbm + 24.0));
  CHECK(fsoc_link_state(spec, 10.15, aligned, WeatherSample::clear_sky(), 0.0, 4).throughput_bps ==
        doctest::Approx(4e10));
  const auto down = fsoc_link_state(spec, 10.15, aligned, WeatherSample::raining(25.0));
  CHECK_FALSE(down.available);
  CHECK(down.throughput_bps == 0.0);
  CHECK_THROWS_AS(fsoc_link_state(spec, 10.15, aligned, WeatherSample::clear_sky(), 0.0, 17), ConfigError);
}
