#include "aralab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "aralab/error.hpp"

namespace aralab {

using nlohmann::json;

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

std::string to_string(SiteRole r) {
  switch (r) {
    case SiteRole::bs: return "bs";
    case SiteRole::ue: return "ue";
    case SiteRole::core: return "core";
  }
  return "bs";
}

std::string to_string(Blockage b) {
  switch (b) {
    case Blockage::clear: return "clear";
    case Blockage::partial: return "partial";
    case Blockage::blocked: return "blocked";
  }
  return "clear";
}

Blockage blockage_from_string(const std::string& s) {
  if (s == "clear") return Blockage::clear;
  if (s == "partial") return Blockage::partial;
  if (s == "blocked") return Blockage::blocked;
  throw ValidationError("unknown blockage state '" + s + "'");
}

bool Site::has_platform(const std::string& platform) const {
  return std::find(installed_platforms.begin(), installed_platforms.end(), platform) !=
         installed_platforms.end();
}

TerrainProfile::TerrainProfile(std::vector<ProfileSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) return;
  if (samples_.front().distance_m != 0.0)
    throw ValidationError("terrain profile must start at distance 0");
  for (std::size_t i = 1; i < samples_.size(); ++i)
    if (!(samples_[i].distance_m > samples_[i - 1].distance_m))
      throw ValidationError("terrain profile distances must be strictly increasing");
}

TerrainProfile TerrainProfile::clear(double length_m, double elevation_m) {
  return uniform(length_m, Blockage::clear, elevation_m);
}

TerrainProfile TerrainProfile::uniform(double length_m, Blockage state, double elevation_m) {
  if (length_m <= 0.0) return TerrainProfile({{0.0, elevation_m, state}});
  return TerrainProfile({{0.0, elevation_m, state}, {length_m, elevation_m, state}});
}

Blockage TerrainProfile::worst_blockage() const {
  Blockage worst = Blockage::clear;
  for (const auto& s : samples_) worst = std::max(worst, s.blockage);
  return worst;
}

TerrainProfile TerrainProfile::reversed() const {
  std::vector<ProfileSample> out;
  out.reserve(samples_.size());
  const double len = length_m();
  for (auto it = samples_.rbegin(); it != samples_.rend(); ++it)
    out.push_back({len - it->distance_m, it->elevation_m, it->blockage});
  if (!out.empty()) out.front().distance_m = 0.0;
  TerrainProfile p;
  p.samples_ = std::move(out);
  return p;
}

std::pair<Blockage, double> TerrainMap::at(const Point& p) const {
  Blockage b = Blockage::clear;
  double delta = 0.0;
  for (const auto& z : zones_) {
    if (distance(p, z.center) <= z.radius_m) {
      b = std::max(b, z.blockage);
      delta += z.elevation_delta_m;
    }
  }
  return {b, delta};
}

const Site& Topology::site(const std::string& id) const {
  const Site* s = find_site(id);
  if (!s) throw ValidationError("unknown site '" + id + "'");
  return *s;
}

const Site* Topology::find_site(const std::string& id) const {
  for (const auto& s : sites_)
    if (s.id == id) return &s;
  return nullptr;
}

std::vector<const Site*> Topology::sites_with_role(SiteRole role) const {
  std::vector<const Site*> out;
  for (const auto& s : sites_)
    if (s.role == role) out.push_back(&s);
  return out;
}

Topology Topology::build(std::vector<Site> sites, std::vector<CandidateLink> links,
                         TerrainMap terrain, const PlatformCatalog& catalog,
                         bool non_negative_frame) {
  std::set<std::string> ids;
  for (const auto& s : sites) {
    if (s.id.empty()) throw ValidationError("site with empty id");
    if (!ids.insert(s.id).second) throw ValidationError("duplicate site id '" + s.id + "'");
    for (const auto& p : s.installed_platforms)
      if (!catalog.contains(p))
        throw ValidationError("site '" + s.id + "' references unknown platform '" + p + "'");
    if (non_negative_frame && (s.position.x < 0 || s.position.y < 0))
      throw ValidationError("site '" + s.id + "' has negative coordinates in a non-negative frame");
  }
  std::set<std::string> link_ids;
  for (auto& l : links) {
    if (l.id.empty()) l.id = l.a + "~" + l.b + "~" + l.platform;
    if (!link_ids.insert(l.id).second) throw ValidationError("duplicate link id '" + l.id + "'");
    if (!ids.count(l.a) || !ids.count(l.b))
      throw ValidationError("link '" + l.id + "' references an unknown site");
    if (l.a == l.b) throw ValidationError("link '" + l.id + "' connects a site to itself");
    if (!catalog.contains(l.platform))
      throw ValidationError("link '" + l.id + "' references unknown platform '" + l.platform + "'");
  }
  Topology t;
  t.sites_ = std::move(sites);
  t.links_ = std::move(links);
  t.terrain_ = std::move(terrain);
  for (const auto& l : t.links_) {
    if (!t.site(l.a).has_platform(l.platform) || !t.site(l.b).has_platform(l.platform))
      throw ValidationError("link '" + l.id + "': platform '" + l.platform +
                            "' is not installed at both ends");
  }
  return t;
}

namespace {

SiteRole role_from_string(const std::string& s, const std::string& site) {
  if (s == "bs") return SiteRole::bs;
  if (s == "ue") return SiteRole::ue;
  if (s == "core") return SiteRole::core;
  throw ValidationError("site '" + site + "': unknown role '" + s + "'");
}

double num(const json& j, const char* field, const std::string& where) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number())
    throw ValidationError(where + ": numeric field '" + field + "' missing");
  return it->get<double>();
}

}  // namespace

Topology parse_topology(const std::string& text, const PlatformCatalog& catalog) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("topology parse error at " + describe_json_position(text, e.byte) + ": " +
                     e.what());
  }
  if (!doc.is_object() || !doc.contains("sites") || !doc.at("sites").is_array())
    throw ParseError("topology: top-level object with a 'sites' array expected");

  bool non_negative = false;
  if (doc.contains("frame")) non_negative = doc.at("frame").value("non_negative", false);

  std::vector<Site> sites;
  for (const auto& js : doc.at("sites")) {
    Site s;
    if (!js.contains("id") || !js.at("id").is_string())
      throw ValidationError("topology: site without string 'id'");
    s.id = js.at("id").get<std::string>();
    const std::string where = "site '" + s.id + "'";
    s.position = {num(js, "x_m", where), num(js, "y_m", where)};
    s.elevation_m = js.value("elevation_m", 0.0);
    s.role = role_from_string(js.value("role", std::string("bs")), s.id);
    if (js.contains("platforms"))
      s.installed_platforms = js.at("platforms").get<std::vector<std::string>>();
    sites.push_back(std::move(s));
  }

  std::vector<CandidateLink> links;
  if (doc.contains("links")) {
    for (const auto& jl : doc.at("links")) {
      CandidateLink l;
      l.id = jl.value("id", std::string());
      l.a = jl.at("a").get<std::string>();
      l.b = jl.at("b").get<std::string>();
      l.platform = jl.at("platform").get<std::string>();
      links.push_back(std::move(l));
    }
  }

  std::vector<TerrainZone> zones;
  if (doc.contains("terrain") && doc.at("terrain").contains("zones")) {
    for (const auto& jz : doc.at("terrain").at("zones")) {
      TerrainZone z;
      z.center = {num(jz, "x_m", "terrain zone"), num(jz, "y_m", "terrain zone")};
      z.radius_m = num(jz, "radius_m", "terrain zone");
      z.blockage = blockage_from_string(jz.value("blockage", std::string("partial")));
      z.elevation_delta_m = jz.value("elevation_delta_m", 0.0);
      zones.push_back(z);
    }
  }
  return Topology::build(std::move(sites), std::move(links), TerrainMap(std::move(zones)), catalog,
                         non_negative);
}

Topology load_topology(const std::string& path, const PlatformCatalog& catalog) {
  const std::string text = read_text_file(path);
  try {
    return parse_topology(text, catalog);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string default_topology_path() { return data_path("demo_topology.json"); }

std::pair<double, TerrainProfile> distance_and_profile(const Site& a, const Site& b,
                                                       const TerrainMap& terrain,
                                                       double spacing_m) {
  // Sample in a canonical orientation so both directions agree.
  const bool swap = b.id < a.id;
  const Site& from = swap ? b : a;
  const Site& to = swap ? a : b;
  const double d = distance(from.position, to.position);
  if (d == 0.0) {
    auto [blk, delta] = terrain.at(from.position);
    return {0.0, TerrainProfile({{0.0, from.elevation_m + delta, blk}})};
  }
  const int n = std::max(1, static_cast<int>(std::ceil(d / std::max(spacing_m, 1e-3))));
  std::vector<ProfileSample> samples;
  samples.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Point p{from.position.x + t * (to.position.x - from.position.x),
                  from.position.y + t * (to.position.y - from.position.y)};
    auto [blk, delta] = terrain.at(p);
    const double elev = from.elevation_m + t * (to.elevation_m - from.elevation_m) + delta;
    samples.push_back({i == n ? d : t * d, elev, blk});
  }
  TerrainProfile profile(std::move(samples));
  return {d, swap ? profile.reversed() : profile};
}

}  // namespace aralab
