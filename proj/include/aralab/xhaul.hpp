#pragma once

#include <map>
#include <string>
#include <vector>

#include "aralab/catalog.hpp"
#include "aralab/topology.hpp"
#include "aralab/weather.hpp"

namespace aralab {

struct XhaulLinkConfig {
  std::string platform;
  double bandwidth_hz = 0.0;
  std::string mcs;  // name from the platform's MCS table
  double tx_power_dbm = 0.0;
};

struct LinkState {
  double rsl_dbm = 0.0;
  double snr_db = 0.0;
  double throughput_bps = 0.0;
  bool available = false;
};

/// Throws ConfigError for an unknown platform, an MCS outside the
/// platform's set, or a bandwidth outside its channel set.
const PlatformSpec& validate(const XhaulLinkConfig& config, const PlatformCatalog& catalog);

double free_space_path_loss_db(double carrier_hz, double distance_km);

/// efficiency(mcs) * bandwidth: the ceiling no achieved throughput exceeds.
double theoretical_limit_bps(const XhaulLinkConfig& config, const PlatformCatalog& catalog);

/// Received level and SNR before any MCS decision.
LinkState xhaul_budget(const XhaulLinkConfig& config, double distance_km, const WeatherSample& weather,
                       const PlatformCatalog& catalog);

LinkState xhaul_link_state(const XhaulLinkConfig& config, double distance_km,
                           const WeatherSample& weather, const PlatformCatalog& catalog);

/// Highest-efficiency MCS whose required SNR plus margin fits the predicted
/// SNR; the lowest MCS otherwise. Uses the platform's maximum tx power
/// unless `tx_power_dbm` is given.
XhaulLinkConfig adapt_mcs(const std::string& platform, double bandwidth_hz, double distance_km,
                          const WeatherSample& weather, double margin_db, const PlatformCatalog& catalog,
                          std::optional<double> tx_power_dbm = std::nullopt);

/// A routable link with its current state (microwave, mmWave or optical).
struct MeshLink {
  std::string id;
  std::string a;
  std::string b;
  LinkState state;
};

struct MeshDemand {
  std::string source;
  std::string sink;
  double offered_bps = 0.0;
};

enum class RoutingPolicy { throughput_max, fixed };

struct RoutedDemand {
  MeshDemand demand;
  std::vector<std::string> path;   // link ids, source to sink
  std::vector<std::string> hops;   // site ids, source to sink
  double delivered_bps = 0.0;
  bool deliverable = false;
};

/// Widest-path routing with equal split of each link among the demands
/// that traverse it. `fixed` freezes the paths chosen under
/// `reference_links` (clear weather) and marks a demand undeliverable when
/// any of its links is down now.
std::vector<RoutedDemand> route_flows(const std::vector<MeshLink>& links,
                                      const std::vector<MeshDemand>& demands, RoutingPolicy policy,
                                      const std::vector<MeshLink>* reference_links = nullptr);

/// Per-link load after routing: sum of the shares of the demands on it.
std::map<std::string, double> link_loads(const std::vector<RoutedDemand>& routed);

}  // namespace aralab
