#include <algorithm>
#include <cmath>

#include "aralab/error.hpp"
#include "aralab/fsoc.hpp"

namespace aralab::fsoc {

std::string to_string(AlignMode m) {
  switch (m) {
    case AlignMode::search_coarse: return "search_coarse";
    case AlignMode::align_fine: return "align_fine";
    case AlignMode::align_ultrafine: return "align_ultrafine";
    case AlignMode::locked: return "locked";
  }
  return "unknown";
}

double AlignmentState::pointing_error_rad() const { return std::hypot(error_az_rad, error_el_rad); }

std::int64_t coarse_step_microsteps(const AlignmentThresholds& t) {
  return std::max<std::int64_t>(1, std::llround(t.apd_fov_rad / 4.0 / t.microstep_rad));
}

std::int64_t coarse_scan_positions(const AlignmentThresholds& t) {
  const double step = static_cast<double>(coarse_step_microsteps(t)) * t.microstep_rad;
  const auto rings = static_cast<std::int64_t>(std::ceil(t.scan_half_range_rad / step)) + 1;
  return (2 * rings + 1) * (2 * rings + 1);
}

namespace {

void reset_spiral(AlignmentState& s) {
  s.spiral_x = s.spiral_y = 0;
  s.spiral_dir = 0;
  s.spiral_leg = 1;
  s.spiral_progress = 0;
  s.spiral_turns = 0;
  s.spiral_count = 0;
}

void reset_ultrafine(AlignmentState& s) {
  s.uf_started = false;
  s.uf_axis = 0;
  s.uf_dir = 1;
  s.uf_moved = false;
  s.uf_idle_axes = 0;
}

void enter(AlignmentState& s, AlignMode m) {
  s.mode = m;
  s.hold_count = 0;
  if (m == AlignMode::search_coarse) reset_spiral(s);
  if (m == AlignMode::align_ultrafine) reset_ultrafine(s);
}

MotorCommand on_axis(int axis, std::int64_t steps) {
  return axis == 0 ? MotorCommand{steps, 0} : MotorCommand{0, steps};
}

MotorCommand coarse_step(AlignmentState& s, const AlignmentThresholds& t) {
  const std::int64_t step = coarse_step_microsteps(t);
  if (s.spiral_count + 1 >= coarse_scan_positions(t)) {
    // Scan exhausted without a beacon: go back to the origin and start over.
    MotorCommand back{-s.spiral_x * step, -s.spiral_y * step};
    reset_spiral(s);
    return back;
  }
  static constexpr int dx[4] = {1, 0, -1, 0};
  static constexpr int dy[4] = {0, 1, 0, -1};
  const int d = s.spiral_dir;
  s.spiral_x += dx[d];
  s.spiral_y += dy[d];
  ++s.spiral_count;
  if (++s.spiral_progress == s.spiral_leg) {
    s.spiral_progress = 0;
    s.spiral_dir = (s.spiral_dir + 1) % 4;
    if (++s.spiral_turns % 2 == 0) ++s.spiral_leg;
  }
  return {dx[d] * step, dy[d] * step};
}

MotorCommand ultrafine_step(AlignmentState& s, const SensorFrame& f) {
  if (!s.uf_started) {
    s.uf_started = true;
    s.uf_best_dbm = f.rx_power_dbm;
    s.uf_dir = 1;
    s.uf_moved = false;
    return on_axis(s.uf_axis, 1);
  }
  if (f.rx_power_dbm > s.uf_best_dbm) {
    s.uf_best_dbm = f.rx_power_dbm;
    s.uf_moved = true;
    return on_axis(s.uf_axis, s.uf_dir);
  }
  if (s.uf_dir == 1 && !s.uf_moved) {
    s.uf_dir = -1;
    return on_axis(s.uf_axis, -2);
  }
  // Step back onto the best position and finish this axis.
  MotorCommand back = on_axis(s.uf_axis, -s.uf_dir);
  // An axis that moved is done; the other one must then confirm with no gain.
  s.uf_idle_axes = s.uf_moved ? 1 : s.uf_idle_axes + 1;
  if (s.uf_idle_axes >= 2) {
    enter(s, AlignMode::locked);
    return back;
  }
  s.uf_axis ^= 1;
  s.uf_started = false;
  return back;
}

}  // namespace

std::pair<AlignmentState, MotorCommand> step_alignment(const AlignmentState& state, const SensorFrame& frame,
                                                       const AlignmentThresholds& t) {
  AlignmentState s = state;
  MotorCommand cmd;
  const bool apd = frame.apd_voltage > t.apd_threshold_v;
  switch (s.mode) {
    case AlignMode::search_coarse:
      if (apd) {
        enter(s, AlignMode::align_fine);
      } else {
        cmd = coarse_step(s, t);
      }
      break;
    case AlignMode::align_fine: {
      if (!apd) {
        enter(s, AlignMode::search_coarse);
        break;
      }
      if (!frame.cmos_centroid) break;
      const double az = frame.cmos_centroid->first * t.pixel_ifov_rad;
      const double el = frame.cmos_centroid->second * t.pixel_ifov_rad;
      if (std::hypot(az, el) < t.fine_exit_rad) {
        enter(s, AlignMode::align_ultrafine);
      } else {
        cmd = {std::llround(-az / t.microstep_rad), std::llround(-el / t.microstep_rad)};
      }
      break;
    }
    case AlignMode::align_ultrafine:
      if (!apd) {
        enter(s, AlignMode::search_coarse);
        break;
      }
      cmd = ultrafine_step(s, frame);
      break;
    case AlignMode::locked:
      if (!apd) {
        enter(s, AlignMode::search_coarse);
        break;
      }
      if (frame.rx_power_dbm < t.relock_threshold_dbm) {
        if (++s.hold_count >= t.hold_frames) enter(s, AlignMode::align_fine);
      } else {
        s.hold_count = 0;
      }
      break;
  }
  s.motor_az += cmd.az;
  s.motor_el += cmd.el;
  return {s, cmd};
}

SensorFrame sense(const SensorModel& m, double err_az, double err_el, const WeatherSample& weather,
                  double intensity, RngStream& rng) {
  SensorFrame f;
  const double e = std::hypot(err_az, err_el);
  const double fade = -10.0 * std::log10(std::max(intensity, 1e-12));
  f.rx_power_dbm = fsoc_rx_power(m.spec, m.distance_km, e, weather, fade);
  const AlignmentThresholds defaults;
  f.apd_voltage = m.scint.apd_dark_v + (e <= 0.5 * defaults.apd_fov_rad ? m.scint.apd_gain_v * intensity : 0.0);
  if (e <= 0.5 * m.camera_fov_rad) {
    const double n_az = m.centroid_noise_rad * rng.normal();
    const double n_el = m.centroid_noise_rad * rng.normal();
    f.cmos_centroid = std::make_pair((err_az + n_az) / defaults.pixel_ifov_rad,
                                     (err_el + n_el) / defaults.pixel_ifov_rad);
    f.cmos_mean_pixel = std::clamp(m.scint.pixel_gain * intensity + m.scint.pixel_offset, 0.0, 255.0);
  } else {
    f.cmos_mean_pixel = std::clamp(m.scint.pixel_offset, 0.0, 255.0);
  }
  return f;
}

AlignmentRun simulate_alignment(double err_az, double err_el, const SensorModel& model,
                                const AlignmentThresholds& t, std::int64_t max_steps, RngStream rng) {
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  AlignmentRun run;
  AlignmentState s;
  s.error_az_rad = err_az;
  s.error_el_rad = err_el;
  const WeatherSample clear = WeatherSample::clear_sky();
  for (std::int64_t i = 0; i < max_steps; ++i) {
    const SensorFrame f = sense(model, s.error_az_rad, s.error_el_rad, clear, 1.0, rng);
    const AlignMode before = s.mode;
    auto [next, cmd] = step_alignment(s, f, t);
    next.error_az_rad = s.error_az_rad + static_cast<double>(cmd.az) * t.microstep_rad;
    next.error_el_rad = s.error_el_rad + static_cast<double>(cmd.el) * t.microstep_rad;
    s = next;
    run.steps = i + 1;
    if (s.mode != before) run.transitions.push_back({i, s.mode, s.pointing_error_rad()});
    if (s.mode == AlignMode::locked) {
      run.converged = true;
      break;
    }
  }
  run.final_state = s;
  return run;
}

}  // namespace aralab::fsoc
