#include "aralab/catalog.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aralab/error.hpp"

namespace aralab {

using nlohmann::json;

std::string to_string(PlatformKind k) { return k == PlatformKind::ran ? "ran" : "xhaul"; }

double XhaulMcs::efficiency() const { return std::log2(static_cast<double>(order)) * code_rate; }

const XhaulMcs* PlatformSpec::find_mcs(const std::string& name) const {
  for (const auto& m : mcs_table)
    if (m.name == name) return &m;
  return nullptr;
}

PlatformCatalog::PlatformCatalog(std::vector<PlatformSpec> platforms) {
  for (auto& p : platforms) {
    const std::string id = p.id;
    if (!platforms_.emplace(id, std::move(p)).second)
      throw ValidationError("duplicate platform id '" + id + "'");
  }
}

const PlatformSpec& PlatformCatalog::at(const std::string& id) const {
  auto it = platforms_.find(id);
  if (it == platforms_.end()) throw ValidationError("unknown platform id '" + id + "'");
  return it->second;
}

const PlatformSpec* PlatformCatalog::find(const std::string& id) const {
  auto it = platforms_.find(id);
  return it == platforms_.end() ? nullptr : &it->second;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string describe_json_position(const std::string& text, std::size_t byte_offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte_offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

namespace {

struct FieldReader {
  const json& obj;
  std::string where;

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw ValidationError(where + ": field '" + field + "' " + msg);
  }

  const json& require(const std::string& field) const {
    auto it = obj.find(field);
    if (it == obj.end()) fail(field, "is missing");
    return *it;
  }

  double number(const std::string& field) const {
    const json& v = require(field);
    if (!v.is_number()) fail(field, "must be a number");
    return v.get<double>();
  }

  double number_or(const std::string& field, double fallback) const {
    if (!obj.contains(field)) return fallback;
    return number(field);
  }

  std::optional<double> optional_number(const std::string& field) const {
    if (!obj.contains(field) || obj.at(field).is_null()) return std::nullopt;
    return number(field);
  }

  std::string string(const std::string& field) const {
    const json& v = require(field);
    if (!v.is_string()) fail(field, "must be a string");
    return v.get<std::string>();
  }
};

PropagationParams parse_propagation(const json& j, const std::string& where) {
  PropagationParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw ValidationError(where + ": field 'propagation' must be an object");
  FieldReader r{j, where + ".propagation"};
  p.ref_distance_m = r.number_or("ref_distance_m", p.ref_distance_m);
  p.ref_loss_db = r.number_or("ref_loss_db", p.ref_loss_db);
  p.path_loss_exponent = r.number_or("path_loss_exponent", p.path_loss_exponent);
  p.noise_figure_db = r.number_or("noise_figure_db", p.noise_figure_db);
  p.demod_threshold_db = r.number_or("demod_threshold_db", p.demod_threshold_db);
  p.excess_loss_db = r.number_or("excess_loss_db", p.excess_loss_db);
  p.overhead_factor = r.number_or("overhead_factor", p.overhead_factor);
  if (p.ref_distance_m <= 0) r.fail("ref_distance_m", "must be > 0");
  if (p.path_loss_exponent <= 0) r.fail("path_loss_exponent", "must be > 0");
  if (p.overhead_factor <= 0 || p.overhead_factor > 1) r.fail("overhead_factor", "must be in (0, 1]");
  return p;
}

PlatformSpec parse_platform(const json& j, std::size_t index) {
  if (!j.is_object())
    throw ValidationError("platforms[" + std::to_string(index) + "] must be an object");
  std::string where = "platforms[" + std::to_string(index) + "]";
  PlatformSpec p;
  {
    FieldReader r{j, where};
    p.id = r.string("id");
  }
  where += " ('" + p.id + "')";
  FieldReader r{j, where};
  const std::string kind = r.string("kind");
  if (kind == "ran")
    p.kind = PlatformKind::ran;
  else if (kind == "xhaul")
    p.kind = PlatformKind::xhaul;
  else
    r.fail("kind", "must be 'ran' or 'xhaul'");

  p.freq_low_hz = r.number("freq_low_hz");
  p.freq_high_hz = r.number("freq_high_hz");
  p.max_bandwidth_hz = r.number("max_bandwidth_hz");
  p.operating_bandwidth_hz = r.optional_number("operating_bandwidth_hz");
  p.carriers = static_cast<int>(r.number_or("carriers", 1));
  p.max_capacity_bps = r.number("max_capacity_bps");
  p.nominal_range_m = r.number("nominal_range_m");
  p.max_tx_power_w = r.number("max_tx_power_w");
  p.spectral_efficiency_cap = r.number_or("spectral_efficiency_cap", p.spectral_efficiency_cap);
  p.antenna_gain_dbi = r.optional_number("antenna_gain_dbi");
  p.beamwidth_deg = r.optional_number("beamwidth_deg");
  if (j.contains("beamwidth_ambiguous")) {
    if (!j.at("beamwidth_ambiguous").is_boolean()) r.fail("beamwidth_ambiguous", "must be a boolean");
    p.beamwidth_ambiguous = j.at("beamwidth_ambiguous").get<bool>();
  }
  if (j.contains("channel_bandwidths_hz")) {
    const json& bw = j.at("channel_bandwidths_hz");
    if (!bw.is_array()) r.fail("channel_bandwidths_hz", "must be an array");
    for (const auto& b : bw) {
      if (!b.is_number() || b.get<double>() <= 0) r.fail("channel_bandwidths_hz", "entries must be positive numbers");
      p.channel_bandwidths_hz.push_back(b.get<double>());
    }
  }
  if (j.contains("mcs")) {
    const json& m = j.at("mcs");
    if (!m.is_array()) r.fail("mcs", "must be an array");
    for (std::size_t i = 0; i < m.size(); ++i) {
      FieldReader mr{m[i], where + ".mcs[" + std::to_string(i) + "]"};
      XhaulMcs e;
      e.name = mr.string("name");
      e.order = static_cast<int>(mr.number("order"));
      e.code_rate = mr.number("code_rate");
      e.required_snr_db = mr.number("required_snr_db");
      if (e.order < 2) mr.fail("order", "must be >= 2");
      if (e.code_rate <= 0 || e.code_rate > 1) mr.fail("code_rate", "must be in (0, 1]");
      p.mcs_table.push_back(e);
    }
  }
  p.propagation = parse_propagation(j.value("propagation", json()), where);

  if (!(p.freq_low_hz < p.freq_high_hz)) r.fail("freq_low_hz", "must be < freq_high_hz");
  if (!(p.max_capacity_bps > 0)) r.fail("max_capacity_bps", "must be > 0");
  if (!(p.nominal_range_m > 0)) r.fail("nominal_range_m", "must be > 0");
  if (!(p.max_tx_power_w > 0)) r.fail("max_tx_power_w", "must be > 0");
  if (!(p.max_bandwidth_hz > 0)) r.fail("max_bandwidth_hz", "must be > 0");
  if (p.operating_bandwidth_hz && !(*p.operating_bandwidth_hz > 0 && *p.operating_bandwidth_hz <= p.max_bandwidth_hz))
    r.fail("operating_bandwidth_hz", "must be in (0, max_bandwidth_hz]");
  if (p.carriers < 1) r.fail("carriers", "must be >= 1");
  if (p.kind == PlatformKind::ran && (p.antenna_gain_dbi || p.beamwidth_deg))
    r.fail("antenna_gain_dbi", "applies to x-haul platforms only");
  return p;
}

json mcs_to_json(const XhaulMcs& m) {
  return json{{"name", m.name}, {"order", m.order}, {"code_rate", m.code_rate},
              {"required_snr_db", m.required_snr_db}};
}

}  // namespace

PlatformCatalog parse_platform_catalog(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("catalog parse error at " + describe_json_position(text, e.byte) + ": " +
                     e.what());
  }
  if (!doc.is_object() || !doc.contains("platforms") || !doc.at("platforms").is_array())
    throw ParseError("catalog: top-level object with a 'platforms' array expected");
  std::vector<PlatformSpec> specs;
  const json& arr = doc.at("platforms");
  for (std::size_t i = 0; i < arr.size(); ++i) specs.push_back(parse_platform(arr[i], i));
  return PlatformCatalog(std::move(specs));
}

PlatformCatalog load_platform_catalog(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_platform_catalog(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

json catalog_to_json(const PlatformCatalog& catalog) {
  json arr = json::array();
  for (const auto& [id, p] : catalog.platforms()) {
    json j{{"id", p.id},
           {"kind", to_string(p.kind)},
           {"freq_low_hz", p.freq_low_hz},
           {"freq_high_hz", p.freq_high_hz},
           {"max_bandwidth_hz", p.max_bandwidth_hz},
           {"carriers", p.carriers},
           {"max_capacity_bps", p.max_capacity_bps},
           {"nominal_range_m", p.nominal_range_m},
           {"max_tx_power_w", p.max_tx_power_w},
           {"spectral_efficiency_cap", p.spectral_efficiency_cap}};
    if (p.operating_bandwidth_hz) j["operating_bandwidth_hz"] = *p.operating_bandwidth_hz;
    if (p.antenna_gain_dbi) j["antenna_gain_dbi"] = *p.antenna_gain_dbi;
    if (p.beamwidth_deg) j["beamwidth_deg"] = *p.beamwidth_deg;
    if (p.beamwidth_ambiguous) j["beamwidth_ambiguous"] = true;
    if (!p.channel_bandwidths_hz.empty()) j["channel_bandwidths_hz"] = p.channel_bandwidths_hz;
    if (!p.mcs_table.empty()) {
      json m = json::array();
      for (const auto& e : p.mcs_table) m.push_back(mcs_to_json(e));
      j["mcs"] = m;
    }
    const auto& pr = p.propagation;
    j["propagation"] = json{{"ref_distance_m", pr.ref_distance_m},
                            {"ref_loss_db", pr.ref_loss_db},
                            {"path_loss_exponent", pr.path_loss_exponent},
                            {"noise_figure_db", pr.noise_figure_db},
                            {"demod_threshold_db", pr.demod_threshold_db},
                            {"excess_loss_db", pr.excess_loss_db},
                            {"overhead_factor", pr.overhead_factor}};
    arr.push_back(std::move(j));
  }
  return json{{"platforms", arr}};
}

std::string serialize_catalog(const PlatformCatalog& catalog) {
  return catalog_to_json(catalog).dump(2) + "\n";
}

std::string data_path(const std::string& relative) {
  if (const char* env = std::getenv("ARA_LAB_DATA"); env && *env)
    return (std::filesystem::path(env) / relative).string();
#ifdef ARALAB_DATA_DIR
  return (std::filesystem::path(ARALAB_DATA_DIR) / relative).string();
#else
  return (std::filesystem::path("data") / relative).string();
#endif
}

std::string default_catalog_path() { return data_path("catalog.json"); }

PlatformCatalog default_catalog() { return load_platform_catalog(default_catalog_path()); }

}  // namespace aralab
