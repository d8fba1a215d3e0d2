#include "aralab/xhaul.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "aralab/error.hpp"
#include "aralab/radio_channel.hpp"
#include "aralab/rain.hpp"

namespace aralab {

const PlatformSpec& validate(const XhaulLinkConfig& config, const PlatformCatalog& catalog) {
  const PlatformSpec* spec = catalog.find(config.platform);
  if (!spec) throw ConfigError("unknown platform '" + config.platform + "'");
  if (spec->kind != PlatformKind::xhaul || spec->mcs_table.empty())
    throw ConfigError("platform '" + config.platform + "' is not an RF x-haul platform");
  if (!spec->find_mcs(config.mcs))
    throw ConfigError("MCS '" + config.mcs + "' not supported by '" + config.platform + "'");
  const auto& bws = spec->channel_bandwidths_hz;
  if (!bws.empty()) {
    const bool ok = std::any_of(bws.begin(), bws.end(),
                                [&](double b) { return std::abs(b - config.bandwidth_hz) <= 1e-6 * b; });
    if (!ok) throw ConfigError("bandwidth not in the channel set of '" + config.platform + "'");
  } else if (!(config.bandwidth_hz > 0) || config.bandwidth_hz > spec->max_bandwidth_hz) {
    throw ConfigError("bandwidth outside (0, max_bandwidth]");
  }
  return *spec;
}

double free_space_path_loss_db(double carrier_hz, double distance_km) {
  return 92.45 + 20.0 * std::log10(carrier_hz / 1e9) + 20.0 * std::log10(distance_km);
}

double theoretical_limit_bps(const XhaulLinkConfig& config, const PlatformCatalog& catalog) {
  const PlatformSpec& spec = validate(config, catalog);
  return spec.find_mcs(config.mcs)->efficiency() * config.bandwidth_hz;
}

LinkState xhaul_budget(const XhaulLinkConfig& config, double distance_km, const WeatherSample& weather,
                       const PlatformCatalog& catalog) {
  const PlatformSpec& spec = validate(config, catalog);
  if (!(distance_km > 0)) throw ValidationError("x-haul distance must be > 0");
  const double f = spec.center_frequency_hz();
  const double gain = spec.antenna_gain_dbi.value_or(0.0);
  const double rain =
      rain_attenuation_db(f, weather.rain_rate_mmh, effective_rain_path_km(distance_km, weather.rain_rate_mmh));
  LinkState s;
  s.rsl_dbm = config.tx_power_dbm + 2.0 * gain - free_space_path_loss_db(f, distance_km) - rain -
              spec.propagation.excess_loss_db;
  s.snr_db = s.rsl_dbm - noise_floor_dbm(config.bandwidth_hz, spec.propagation.noise_figure_db);
  return s;
}

LinkState xhaul_link_state(const XhaulLinkConfig& config, double distance_km,
                           const WeatherSample& weather, const PlatformCatalog& catalog) {
  const PlatformSpec& spec = validate(config, catalog);
  LinkState s = xhaul_budget(config, distance_km, weather, catalog);
  const XhaulMcs& mcs = *spec.find_mcs(config.mcs);
  s.available = s.snr_db >= mcs.required_snr_db;
  s.throughput_bps =
      s.available ? std::min(mcs.efficiency() * config.bandwidth_hz * spec.propagation.overhead_factor,
                             spec.max_capacity_bps)
                  : 0.0;
  return s;
}

XhaulLinkConfig adapt_mcs(const std::string& platform, double bandwidth_hz, double distance_km,
                          const WeatherSample& weather, double margin_db, const PlatformCatalog& catalog,
                          std::optional<double> tx_power_dbm) {
  if (!(margin_db >= 0)) throw ValidationError("margin must be >= 0");
  const PlatformSpec& spec = catalog.at(platform);
  if (spec.mcs_table.empty()) throw ConfigError("platform '" + platform + "' has no MCS table");
  std::vector<XhaulMcs> table = spec.mcs_table;
  std::stable_sort(table.begin(), table.end(),
                   [](const XhaulMcs& a, const XhaulMcs& b) { return a.efficiency() < b.efficiency(); });
  XhaulLinkConfig cfg{platform, bandwidth_hz, table.front().name,
                      tx_power_dbm.value_or(watts_to_dbm(spec.max_tx_power_w))};
  const double snr = xhaul_budget(cfg, distance_km, weather, catalog).snr_db;
  for (auto it = table.rbegin(); it != table.rend(); ++it) {
    if (it->required_snr_db + margin_db <= snr) {
      cfg.mcs = it->name;
      return cfg;
    }
  }
  return cfg;
}

namespace {

struct Graph {
  // site -> (link index) adjacency, only over usable links
  std::map<std::string, std::vector<std::size_t>> adj;
};

Graph build_graph(const std::vector<MeshLink>& links) {
  Graph g;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!links[i].state.available || !(links[i].state.throughput_bps > 0)) continue;
    g.adj[links[i].a].push_back(i);
    g.adj[links[i].b].push_back(i);
  }
  for (auto& [site, v] : g.adj)
    std::sort(v.begin(), v.end(), [&](std::size_t x, std::size_t y) { return links[x].id < links[y].id; });
  return g;
}

struct PathChoice {
  std::vector<std::size_t> links;
  std::vector<std::string> hops;
  double bottleneck = 0.0;
};

// Exhaustive simple-path search; the mesh is a handful of sites. Ties on
// bottleneck go to the lexicographically smallest link-id sequence.
std::optional<PathChoice> widest_path(const std::vector<MeshLink>& links, const Graph& g,
                                      const std::string& src, const std::string& dst,
                                      const std::function<double(std::size_t)>& share) {
  std::optional<PathChoice> best;
  std::vector<std::size_t> stack_links;
  std::vector<std::string> stack_hops{src};
  std::set<std::string> visited{src};

  auto better = [&](double bn, const std::vector<std::size_t>& cand) {
    if (!best) return true;
    if (bn > best->bottleneck) return true;
    if (bn < best->bottleneck) return false;
    std::vector<std::string> a, b;
    for (auto i : cand) a.push_back(links[i].id);
    for (auto i : best->links) b.push_back(links[i].id);
    return a < b;
  };

  std::function<void(const std::string&, double)> dfs = [&](const std::string& at, double bn) {
    if (at == dst) {
      if (better(bn, stack_links)) best = PathChoice{stack_links, stack_hops, bn};
      return;
    }
    auto it = g.adj.find(at);
    if (it == g.adj.end()) return;
    for (std::size_t li : it->second) {
      const std::string& next = links[li].a == at ? links[li].b : links[li].a;
      if (visited.count(next)) continue;
      const double nb = std::min(bn, share(li));
      visited.insert(next);
      stack_links.push_back(li);
      stack_hops.push_back(next);
      dfs(next, nb);
      stack_hops.pop_back();
      stack_links.pop_back();
      visited.erase(next);
    }
  };
  dfs(src, std::numeric_limits<double>::infinity());
  return best;
}

std::vector<std::optional<PathChoice>> choose_paths(const std::vector<MeshLink>& links,
                                                    const std::vector<MeshDemand>& demands) {
  const Graph g = build_graph(links);
  std::vector<int> users(links.size(), 0);
  std::vector<std::optional<PathChoice>> out;
  for (const auto& d : demands) {
    // Each demand sees the share it would get if it joined a link.
    auto share = [&](std::size_t li) { return links[li].state.throughput_bps / (users[li] + 1); };
    auto p = widest_path(links, g, d.source, d.sink, share);
    if (p)
      for (auto li : p->links) ++users[li];
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<RoutedDemand> route_flows(const std::vector<MeshLink>& links,
                                      const std::vector<MeshDemand>& demands, RoutingPolicy policy,
                                      const std::vector<MeshLink>* reference_links) {
  for (const auto& d : demands) {
    if (!(d.offered_bps > 0)) throw ValidationError("demand load must be > 0");
    if (d.source == d.sink) throw ValidationError("demand endpoints must differ");
  }
  std::vector<std::optional<PathChoice>> paths;
  if (policy == RoutingPolicy::fixed) {
    const auto& ref = reference_links ? *reference_links : links;
    auto ref_paths = choose_paths(ref, demands);
    // Re-map onto the current link set by id; any link now down voids the path.
    for (auto& p : ref_paths) {
      if (!p) {
        paths.push_back(std::nullopt);
        continue;
      }
      PathChoice cur;
      cur.hops = p->hops;
      bool ok = true;
      for (auto li : p->links) {
        const std::string& id = ref[li].id;
        auto it = std::find_if(links.begin(), links.end(), [&](const MeshLink& l) { return l.id == id; });
        if (it == links.end() || !it->state.available || !(it->state.throughput_bps > 0)) {
          ok = false;
          break;
        }
        cur.links.push_back(static_cast<std::size_t>(it - links.begin()));
      }
      paths.push_back(ok ? std::optional<PathChoice>(cur) : std::nullopt);
    }
  } else {
    paths = choose_paths(links, demands);
  }

  std::vector<int> users(links.size(), 0);
  for (const auto& p : paths)
    if (p)
      for (auto li : p->links) ++users[li];

  std::vector<RoutedDemand> out;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    RoutedDemand r;
    r.demand = demands[i];
    if (paths[i]) {
      double rate = demands[i].offered_bps;
      for (auto li : paths[i]->links) {
        rate = std::min(rate, links[li].state.throughput_bps / users[li]);
        r.path.push_back(links[li].id);
      }
      r.hops = paths[i]->hops;
      r.delivered_bps = rate;
      r.deliverable = true;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, double> link_loads(const std::vector<RoutedDemand>& routed) {
  std::map<std::string, double> loads;
  for (const auto& r : routed)
    for (const auto& id : r.path) loads[id] += r.delivered_bps;
  return loads;
}

}  // namespace aralab
