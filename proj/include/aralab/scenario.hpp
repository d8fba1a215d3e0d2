#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aralab/catalog.hpp"
#include "aralab/mimo.hpp"
#include "aralab/topology.hpp"

namespace aralab {

struct ScenarioConfig {
  std::string name;
  std::string pipeline;
  std::uint64_t seed = 1;
  std::string catalog_path;   // resolved; empty means the shipped catalog
  std::string topology_path;  // resolved; empty means the shipped demo topology
  nlohmann::json params = nlohmann::json::object();
  std::string base_dir;       // directory relative inputs are resolved against
  std::string source_text;
};

const std::vector<std::string>& pipeline_names();

ScenarioConfig parse_scenario(const std::string& text, const std::string& base_dir = "");
ScenarioConfig load_scenario(const std::string& path);

// Checks that the pipeline exists and that referenced inputs load.
void validate_scenario(const ScenarioConfig& config);

std::string config_hash(const ScenarioConfig& config);

// Output root: $ARA_LAB_OUT when set, otherwise ./results.
std::string default_output_root();

struct ScenarioResult {
  std::string output_dir;
  std::vector<std::string> files;  // relative to output_dir, manifest last
  nlohmann::json summary;
  nlohmann::json manifest;
};

ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& output_root);

// Shared with the tests so that the shipped sets are exercised directly.
struct UeSet {
  std::string name;
  std::vector<double> ue_snr_db;
  double correlation = 0.0;
};

struct MimoSetResult {
  double greedy_bps = 0.0;
  double force_all_bps = 0.0;
  mimo::Schedule greedy;
  mimo::Schedule force_all;
};

MimoSetResult run_mimo_set(const UeSet& set, const mimo::RbPlan& plan, const mimo::SchedulerParams& params,
                           const mimo::ChannelModel& model, std::uint64_t seed);

UeSet ue_set_from_json(const nlohmann::json& j);

}  // namespace aralab
