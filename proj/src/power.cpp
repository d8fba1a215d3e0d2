#include "aralab/power.hpp"

#include <cmath>
#include <sstream>

#include "aralab/csv.hpp"
#include "aralab/error.hpp"

namespace aralab::power {

std::string to_string(Component c) {
  switch (c) {
    case Component::tvws: return "tvws";
    case Component::sdr: return "sdr";
    case Component::compute: return "compute";
    case Component::switches: return "switches";
    case Component::optical: return "optical";
    case Component::other: return "other";
  }
  return "other";
}

std::string to_string(BsStateKind k) {
  switch (k) {
    case BsStateKind::off: return "off";
    case BsStateKind::idle_no_tx: return "idle_no_tx";
    case BsStateKind::tx_idle: return "tx_idle";
    case BsStateKind::ues_connected: return "ues_connected";
    case BsStateKind::ues_transmitting: return "ues_transmitting";
  }
  return "off";
}

BsStateKind bs_state_from_string(const std::string& s) {
  for (auto k : {BsStateKind::off, BsStateKind::idle_no_tx, BsStateKind::tx_idle, BsStateKind::ues_connected,
                 BsStateKind::ues_transmitting})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown base-station state '" + s + "'");
}

SiteBaseline residence_hall_baseline() {
  SiteBaseline b;
  b.site = "residence-hall";
  b.components = {{
      {692.234, 5.822},
      {415.198, 4.377},
      {319.516, 2.699},
      {188.118, 2.332},
      {115.482, 1.392},
      {45.173, 0.783},
  }};
  return b;
}

double tvws_state_factor(const BsState& s) {
  if (s.ues < 0) throw ValidationError("UE count must be >= 0");
  switch (s.kind) {
    case BsStateKind::off: return 0.0;
    case BsStateKind::idle_no_tx: return 1.0;
    case BsStateKind::tx_idle: return 1.08;
    case BsStateKind::ues_connected: return 1.08 + 0.01 * s.ues;
    case BsStateKind::ues_transmitting: return 1.09 + 0.02 * s.ues;
  }
  return 0.0;
}

namespace {

// The baseline was measured with the radio on air but idle.
constexpr double kBaselineFactor = 1.08;

SitePower assemble(const SiteBaseline& b, double time_s, bool off, double tvws_scale) {
  SitePower p;
  for (std::size_t i = 0; i < kComponents.size(); ++i) {
    PowerReading r;
    r.time_s = time_s;
    r.site = b.site;
    r.component = kComponents[i];
    const double k = off ? 0.0 : (kComponents[i] == Component::tvws ? tvws_scale : 1.0);
    r.watts = b.components[i].watts * k;
    r.amps = b.components[i].amps * k;
    p.total_watts += r.watts;
    p.total_amps += r.amps;
    p.readings.push_back(std::move(r));
  }
  return p;
}

}  // namespace

SitePower power_model(const SiteBaseline& baseline, const BsState& state, double time_s) {
  const double f = tvws_state_factor(state);
  return assemble(baseline, time_s, state.kind == BsStateKind::off, f / kBaselineFactor);
}

double watt_share_percent(const SitePower& p, Component c) {
  if (!(p.total_watts > 0)) return 0.0;
  return 100.0 * p.readings.at(static_cast<std::size_t>(c)).watts / p.total_watts;
}

double amp_share_percent(const SitePower& p, Component c) {
  if (!(p.total_amps > 0)) return 0.0;
  return 100.0 * p.readings.at(static_cast<std::size_t>(c)).amps / p.total_amps;
}

std::vector<SitePower> power_trace(const SiteBaseline& baseline, const std::vector<StateChange>& schedule,
                                   double duration_s, double step_s, double restart_dip_factor) {
  if (!(duration_s > 0) || !(step_s > 0)) throw ValidationError("duration and step must be > 0");
  if (schedule.empty()) throw ValidationError("power schedule is empty");
  std::vector<SitePower> out;
  const auto n = static_cast<std::size_t>(std::floor(duration_s / step_s + 1e-9));
  std::size_t idx = 0;
  BsState prev = schedule.front().state;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * step_s;
    while (idx + 1 < schedule.size() && schedule[idx + 1].time_s <= t) ++idx;
    const BsState cur = schedule[idx].state;
    const bool restart = prev.kind == BsStateKind::idle_no_tx && cur.kind != BsStateKind::idle_no_tx &&
                         cur.kind != BsStateKind::off;
    if (restart) {
      out.push_back(assemble(baseline, t, false, restart_dip_factor / kBaselineFactor));
    } else {
      out.push_back(power_model(baseline, cur, t));
    }
    prev = cur;
  }
  return out;
}

std::string power_trace_to_csv(const std::vector<SitePower>& trace) {
  std::ostringstream os;
  os << "t_s,site,component,watts,amps\n";
  for (const auto& p : trace)
    for (const auto& r : p.readings)
      os << format_double(r.time_s) << ',' << r.site << ',' << to_string(r.component) << ','
         << format_fixed(r.watts, 3) << ',' << format_fixed(r.amps, 3) << '\n';
  return os.str();
}

}  // namespace aralab::power
