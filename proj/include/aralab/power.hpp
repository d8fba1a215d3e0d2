#pragma once

#include <array>
#include <string>
#include <vector>

namespace aralab::power {

enum class Component { tvws, sdr, compute, switches, optical, other };
inline constexpr std::array<Component, 6> kComponents = {Component::tvws,     Component::sdr,
                                                         Component::compute,  Component::switches,
                                                         Component::optical,  Component::other};
std::string to_string(Component c);

enum class BsStateKind { off, idle_no_tx, tx_idle, ues_connected, ues_transmitting };
std::string to_string(BsStateKind k);
BsStateKind bs_state_from_string(const std::string& s);

struct BsState {
  BsStateKind kind = BsStateKind::tx_idle;
  int ues = 0;  // for the connected/transmitting states
};

struct ComponentBaseline {
  double watts = 0.0;
  double amps = 0.0;
};

/// Per-component month-average draw of a site, in the tx_idle state.
struct SiteBaseline {
  std::string site;
  std::array<ComponentBaseline, 6> components{};
};

/// The Residence Hall reference measurements.
SiteBaseline residence_hall_baseline();

struct PowerReading {
  double time_s = 0.0;
  std::string site;
  Component component = Component::other;
  double watts = 0.0;
  double amps = 0.0;
};

struct SitePower {
  std::vector<PowerReading> readings;
  double total_watts = 0.0;
  double total_amps = 0.0;
};

/// TVWS draw relative to the no-transmission state.
double tvws_state_factor(const BsState& state);

/// Readings for one state; only the TVWS radio responds to the state, every
/// component drops to 0 when the site is off.
SitePower power_model(const SiteBaseline& baseline, const BsState& state, double time_s = 0.0);

/// Share of a component in the site total, percent.
double watt_share_percent(const SitePower& p, Component c);
double amp_share_percent(const SitePower& p, Component c);

struct StateChange {
  double time_s = 0.0;
  BsState state;
};

/// Sampled readings over a schedule of state changes. The TVWS radio
/// restarts when transmission begins, which shows as a one-sample dip.
std::vector<SitePower> power_trace(const SiteBaseline& baseline, const std::vector<StateChange>& schedule,
                                   double duration_s, double step_s, double restart_dip_factor = 0.55);

std::string power_trace_to_csv(const std::vector<SitePower>& trace);

}  // namespace aralab::power
