#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace aralab {

enum class PlatformKind { ran, xhaul };

std::string to_string(PlatformKind k);

/// One modulation/coding entry of an x-haul radio.
struct XhaulMcs {
  std::string name;
  int order = 4;             // constellation size
  double code_rate = 1.0;    // efficiency = log2(order) * code_rate
  double required_snr_db = 0.0;

  double efficiency() const;
  bool operator==(const XhaulMcs&) const = default;
};

/// Per-platform link-budget calibration. Ran platforms use the log-distance
/// terms; x-haul platforms use the antenna/overhead terms.
struct PropagationParams {
  double ref_distance_m = 100.0;
  double ref_loss_db = 0.0;
  double path_loss_exponent = 2.0;
  double noise_figure_db = 7.0;
  double demod_threshold_db = -5.0;
  double excess_loss_db = 0.0;
  double overhead_factor = 1.0;

  bool operator==(const PropagationParams&) const = default;
};

struct PlatformSpec {
  std::string id;
  PlatformKind kind = PlatformKind::ran;
  double freq_low_hz = 0.0;
  double freq_high_hz = 0.0;
  double max_bandwidth_hz = 0.0;
  std::optional<double> operating_bandwidth_hz;  // what deployed links use; max when absent
  int carriers = 1;
  double max_capacity_bps = 0.0;
  double nominal_range_m = 0.0;
  double max_tx_power_w = 0.0;
  double spectral_efficiency_cap = 8.0;
  std::optional<double> antenna_gain_dbi;
  std::optional<double> beamwidth_deg;
  // Beamwidth association in the source table is inconsistent between rows.
  bool beamwidth_ambiguous = false;
  std::vector<double> channel_bandwidths_hz;
  std::vector<XhaulMcs> mcs_table;
  PropagationParams propagation;

  double default_bandwidth_hz() const { return operating_bandwidth_hz.value_or(max_bandwidth_hz); }
  double center_frequency_hz() const { return 0.5 * (freq_low_hz + freq_high_hz); }
  const XhaulMcs* find_mcs(const std::string& name) const;
  bool operator==(const PlatformSpec&) const = default;
};

class PlatformCatalog {
public:
  PlatformCatalog() = default;
  explicit PlatformCatalog(std::vector<PlatformSpec> platforms);

  const PlatformSpec& at(const std::string& id) const;
  const PlatformSpec* find(const std::string& id) const;
  bool contains(const std::string& id) const { return find(id) != nullptr; }
  std::size_t size() const { return platforms_.size(); }
  const std::map<std::string, PlatformSpec>& platforms() const { return platforms_; }

  bool operator==(const PlatformCatalog&) const = default;

private:
  std::map<std::string, PlatformSpec> platforms_;
};

/// Throws ParseError (with line context) or ValidationError (with the
/// offending platform and field).
PlatformCatalog parse_platform_catalog(const std::string& text);
PlatformCatalog load_platform_catalog(const std::string& path);

/// Canonical JSON form; platforms sorted by id, defaults materialized.
nlohmann::json catalog_to_json(const PlatformCatalog& catalog);
std::string serialize_catalog(const PlatformCatalog& catalog);

/// Path of the catalog shipped in the data directory.
std::string default_catalog_path();
std::string data_path(const std::string& relative);
PlatformCatalog default_catalog();

/// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_text_file(const std::string& path);

/// Converts a nlohmann parse exception offset into "line N, column M".
std::string describe_json_position(const std::string& text, std::size_t byte_offset);

}  // namespace aralab
