#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aralab/catalog.hpp"
#include "aralab/topology.hpp"
#include "aralab/weather.hpp"

namespace aralab {

/// Thermal noise density at 290 K.
inline constexpr double kThermalNoiseDbmPerHz = -174.0;
/// Penalty applied to a path with partial blockage.
inline constexpr double kPartialBlockagePenaltyDb = 20.0;

double watts_to_dbm(double watts);
double dbm_to_watts(double dbm);
double noise_floor_dbm(double bandwidth_hz, double noise_figure_db);

struct RanLinkConfig {
  std::string platform;
  double tx_power_w = 0.0;
  double bandwidth_hz = 0.0;
  double carrier_hz = 0.0;
};

/// Throws ConfigError if the config exceeds the platform's limits.
const PlatformSpec& validate(const RanLinkConfig& config, const PlatformCatalog& catalog);

/// Config at the platform's band center with full bandwidth.
RanLinkConfig default_ran_config(const PlatformSpec& spec, double tx_power_w);

/// Log-distance loss with blockage penalty; +infinity for a blocked path.
/// Distances below 1 m are clamped to 1 m.
double path_loss_db(const RanLinkConfig& config, double distance_m, const TerrainProfile& profile,
                    const PlatformCatalog& catalog);

struct RanLinkBudget {
  double path_loss_db = 0.0;
  double rain_loss_db = 0.0;
  double snr_db = 0.0;
  double capacity_bps = 0.0;
};

RanLinkBudget ran_link_budget(const RanLinkConfig& config, double distance_m,
                              const TerrainProfile& profile, const WeatherSample& weather,
                              const PlatformCatalog& catalog);

/// Shannon capacity capped at the platform ceiling; 0 below the platform's
/// demodulation threshold.
double ran_capacity(const RanLinkConfig& config, double distance_m, const TerrainProfile& profile,
                    const WeatherSample& weather, const PlatformCatalog& catalog);

struct RoutePoint {
  double distance_m = 0.0;
  TerrainProfile profile;
};

struct CapacitySample {
  double distance_m = 0.0;
  double capacity_bps = 0.0;
};

std::vector<CapacitySample> capacity_profile(const RanLinkConfig& config,
                                             const std::vector<RoutePoint>& route,
                                             const PlatformCatalog& catalog,
                                             const WeatherSample& weather = WeatherSample::clear_sky());

/// Blockage segment along a measurement route, by distance from the BS.
struct RouteSegment {
  double from_m = 0.0;
  double to_m = 0.0;
  Blockage blockage = Blockage::partial;
};

/// Route points at the given distances; each point's profile carries the
/// blockage of the segment it lies in.
std::vector<RoutePoint> build_route(const std::vector<double>& distances_m,
                                    const std::vector<RouteSegment>& segments);

}  // namespace aralab
