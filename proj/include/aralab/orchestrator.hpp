#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "aralab/catalog.hpp"
#include "aralab/topology.hpp"

namespace aralab::orch {

struct ResourceId {
  std::string site;
  std::string device;  // platform id installed at the site
  auto operator<=>(const ResourceId&) const = default;
};

struct SpectrumRange {
  double low_hz = 0.0;
  double high_hz = 0.0;
  double max_power_dbm = 0.0;
  bool operator==(const SpectrumRange&) const = default;
};

struct LeaseRequest {
  std::string requester;
  std::vector<ResourceId> resources;
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<SpectrumRange> spectrum;
};

enum class LeaseState { pending, active, expired, revoked };
std::string to_string(LeaseState s);

struct Lease {
  std::string id;
  LeaseRequest request;
  LeaseState state = LeaseState::pending;
  double state_since_s = 0.0;
};

struct Conflict {
  enum class Kind { resource, spectrum };
  Kind kind = Kind::resource;
  std::string blocking_lease;
  std::string detail;
};
std::string to_string(Conflict::Kind k);

struct CalendarParams {
  // Overrides the per-platform nominal range when set.
  std::optional<double> interference_radius_m;
};

struct Emission {
  ResourceId device;
  double low_hz = 0.0;
  double high_hz = 0.0;
  double power_dbm = 0.0;
  double start_offset_s = 0.0;  // relative to the experiment reaching running
  double end_offset_s = 1e300;
};

struct ExperimentSpec {
  std::string lease_id;
  double image_size_bytes = 0.0;
  std::string workload;
  std::vector<Emission> emissions;
};

enum class ExpPhase { created, fetching, starting, running, stopped, revoked };
std::string to_string(ExpPhase p);

struct LaunchTiming {
  double fetch_s = 0.0;
  double start_s = 0.0;
  double total_s() const { return fetch_s + start_s; }
};

/// Image download is 80% of launch time, container start the other 20%.
LaunchTiming launch_timing(double image_size_bytes, double download_rate_bps);

struct Experiment {
  std::string id;
  ExperimentSpec spec;
  double created_s = 0.0;
  LaunchTiming timing;
  std::optional<double> revoked_s;
  std::optional<double> stopped_s;

  ExpPhase phase_at(double t) const;
  double running_since_s() const { return created_s + timing.total_s(); }
};

struct RadioConfigRequest {
  ResourceId device;
  double carrier_hz = 0.0;
  double bandwidth_hz = 0.0;
  double power_dbm = 0.0;
};

enum class GuardKind { out_of_band, over_power, unleased };
std::string to_string(GuardKind k);

struct GuardDecision {
  bool allow = true;
  std::optional<GuardKind> reason;
  std::string detail;
};

/// Proactive gate on a radio configuration; never terminates anything.
GuardDecision guard_check_config(const RadioConfigRequest& request, const Lease& lease);

struct SpectrumObservation {
  std::string site;
  std::int64_t slot = 0;
  double low_hz = 0.0;
  double high_hz = 0.0;
  double power_dbm = 0.0;
  // Transmitting device; sensing attributes emissions through the
  // experiments' declared emission profiles.
  ResourceId source;
};

struct GuardEvent {
  double time_s = 0.0;
  std::string experiment_id;  // empty for unleased emissions
  GuardKind kind = GuardKind::unleased;
  SpectrumObservation evidence;
};

struct LaunchResult {
  bool ok = false;
  std::string experiment_id;
  std::string reason;
};

struct SafetyViolation {
  std::string lease_a;
  std::string lease_b;
  std::string detail;
};

/// Lease calendar, experiments and guard, driven in simulated time. Every
/// mutation is appended to an ordered JSON-lines journal.
class Orchestrator {
public:
  Orchestrator(const Topology& topology, const PlatformCatalog& catalog, CalendarParams params = {},
               double download_rate_bps = 100e6, double sensing_slot_s = 1.0);

  /// FCFS admission against the current calendar. Throws ValidationError
  /// for malformed requests.
  std::variant<Lease, Conflict> request_lease(const LeaseRequest& request, double now_s);

  /// Moves leases and experiments forward to `now_s`.
  void advance(double now_s);

  LaunchResult launch_experiment(const ExperimentSpec& spec, double now_s);

  /// Reactive gate over one sensing slot: emits events and revokes
  /// offenders within that slot.
  std::vector<GuardEvent> guard_check_spectrum(const std::vector<SpectrumObservation>& observations);

  /// What the RF sensors would see in a slot from running experiments.
  std::vector<SpectrumObservation> sense_slot(std::int64_t slot) const;

  /// Active-lease overlaps at the current time (empty when safe).
  std::vector<SafetyViolation> check_safety() const;

  const Topology& topology() const { return *topology_; }
  const PlatformCatalog& catalog() const { return *catalog_; }
  const std::map<std::string, Lease>& leases() const { return leases_; }
  const std::map<std::string, Experiment>& experiments() const { return experiments_; }
  const std::vector<GuardEvent>& guard_log() const { return guard_log_; }
  const std::vector<nlohmann::json>& journal() const { return journal_; }
  std::string journal_jsonl() const;
  double now() const { return now_; }
  double sensing_slot_s() const { return slot_s_; }

  /// Interference radius between two leases' emitters.
  double interference_radius(const LeaseRequest& a, const LeaseRequest& b) const;

  /// Rebuilds state by re-applying a journal of commands.
  static Orchestrator replay(const std::string& jsonl, const Topology& topology, const PlatformCatalog& catalog,
                             CalendarParams params = {});

private:
  void advance_to(double now_s);
  void validate(const LeaseRequest& r) const;
  std::optional<Conflict> find_conflict(const LeaseRequest& r) const;
  bool overlaps_spectrum(const LeaseRequest& a, const LeaseRequest& b, std::string* detail) const;
  void set_lease_state(Lease& l, LeaseState s, double t);
  void revoke_experiment(Experiment& e, double t, const std::string& why);
  void log(nlohmann::json entry);
  const Experiment* experiment_for(const ResourceId& device, double t) const;

  const Topology* topology_;
  const PlatformCatalog* catalog_;
  CalendarParams params_;
  double download_rate_bps_;
  double slot_s_;
  double now_ = 0.0;
  std::uint64_t next_lease_ = 1;
  std::uint64_t next_exp_ = 1;
  std::map<std::string, Lease> leases_;
  std::map<std::string, Experiment> experiments_;
  std::vector<GuardEvent> guard_log_;
  std::vector<nlohmann::json> journal_;
};

// Randomized driver: a request stream with experiments launched on every
// granted lease and a share of them injected with a guard violation.
struct FuzzParams {
  std::size_t requests = 10000;
  double mean_interarrival_s = 0.5;
  double violation_probability = 0.3;
  double max_image_bytes = 50e6;
  std::uint64_t seed = 1;
};

struct InjectedViolation {
  std::string experiment_id;
  GuardKind kind = GuardKind::out_of_band;
  double onset_s = 0.0;
  std::optional<double> revoked_s;
};

struct FuzzReport {
  std::size_t requests = 0;
  std::size_t granted = 0;
  std::size_t resource_conflicts = 0;
  std::size_t spectrum_conflicts = 0;
  std::size_t launched = 0;
  std::size_t slots = 0;
  std::size_t safety_violations = 0;
  std::vector<InjectedViolation> injections;
  double max_guard_latency_s = 0.0;
};

FuzzReport run_fuzz(Orchestrator& orch, const FuzzParams& params,
                    const std::function<void(const Orchestrator&)>& on_step = {});

nlohmann::json to_json(const FuzzReport& r);

nlohmann::json to_json(const LeaseRequest& r);
LeaseRequest lease_request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentSpec& s);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpectrumObservation& o);
SpectrumObservation observation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GuardEvent& e);

/// Appends lines to a JSON-lines file, creating it when missing.
void append_jsonl(const std::string& path, const std::vector<nlohmann::json>& entries);

}  // namespace aralab::orch
