#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aralab/catalog.hpp"

namespace aralab {

/// Local planar frame, meters east/north of an arbitrary origin.
struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

double distance(const Point& a, const Point& b);

enum class SiteRole { bs, ue, core };
std::string to_string(SiteRole r);

struct Site {
  std::string id;
  Point position;
  double elevation_m = 0.0;
  std::vector<std::string> installed_platforms;
  SiteRole role = SiteRole::bs;

  bool has_platform(const std::string& platform) const;
};

enum class Blockage { clear = 0, partial = 1, blocked = 2 };
std::string to_string(Blockage b);
Blockage blockage_from_string(const std::string& s);

struct ProfileSample {
  double distance_m = 0.0;
  double elevation_m = 0.0;
  Blockage blockage = Blockage::clear;
  bool operator==(const ProfileSample&) const = default;
};

/// Elevation/blockage samples along a path; distances strictly increasing
/// from 0.
class TerrainProfile {
public:
  TerrainProfile() = default;
  explicit TerrainProfile(std::vector<ProfileSample> samples);

  /// Two-sample clear profile of the given length.
  static TerrainProfile clear(double length_m, double elevation_m = 0.0);
  /// Two-sample profile carrying a single blockage state.
  static TerrainProfile uniform(double length_m, Blockage state, double elevation_m = 0.0);

  const std::vector<ProfileSample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  double length_m() const { return samples_.empty() ? 0.0 : samples_.back().distance_m; }
  Blockage worst_blockage() const;
  /// Same path seen from the other end.
  TerrainProfile reversed() const;

  bool operator==(const TerrainProfile&) const = default;

private:
  std::vector<ProfileSample> samples_;
};

/// Circular clutter/terrain feature; adds an elevation offset and a blockage
/// state to any profile sample that falls inside it.
struct TerrainZone {
  Point center;
  double radius_m = 0.0;
  Blockage blockage = Blockage::partial;
  double elevation_delta_m = 0.0;
};

class TerrainMap {
public:
  TerrainMap() = default;
  explicit TerrainMap(std::vector<TerrainZone> zones) : zones_(std::move(zones)) {}

  const std::vector<TerrainZone>& zones() const { return zones_; }
  /// Blockage and elevation offset at a point.
  std::pair<Blockage, double> at(const Point& p) const;

private:
  std::vector<TerrainZone> zones_;
};

struct CandidateLink {
  std::string id;
  std::string a;
  std::string b;
  std::string platform;
};

class Topology {
public:
  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<CandidateLink>& links() const { return links_; }
  const TerrainMap& terrain() const { return terrain_; }
  const Site& site(const std::string& id) const;
  const Site* find_site(const std::string& id) const;
  std::vector<const Site*> sites_with_role(SiteRole role) const;

  /// Builds and validates; throws ValidationError naming the offending site.
  static Topology build(std::vector<Site> sites, std::vector<CandidateLink> links,
                        TerrainMap terrain, const PlatformCatalog& catalog,
                        bool non_negative_frame = false);

private:
  std::vector<Site> sites_;
  std::vector<CandidateLink> links_;
  TerrainMap terrain_;
};

Topology parse_topology(const std::string& text, const PlatformCatalog& catalog);
Topology load_topology(const std::string& path, const PlatformCatalog& catalog);
std::string default_topology_path();

/// Planar distance plus a profile sampled every `spacing_m` along a->b.
/// Symmetric: the b->a profile is the exact reverse of the a->b profile.
std::pair<double, TerrainProfile> distance_and_profile(const Site& a, const Site& b,
                                                       const TerrainMap& terrain,
                                                       double spacing_m = 100.0);

}  // namespace aralab
