#include "aralab/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aralab/error.hpp"
#include "aralab/rng.hpp"

namespace aralab::orch {

using nlohmann::json;

std::string to_string(LeaseState s) {
  switch (s) {
    case LeaseState::pending: return "pending";
    case LeaseState::active: return "active";
    case LeaseState::expired: return "expired";
    case LeaseState::revoked: return "revoked";
  }
  return "pending";
}

std::string to_string(Conflict::Kind k) { return k == Conflict::Kind::resource ? "resource" : "spectrum"; }

std::string to_string(ExpPhase p) {
  switch (p) {
    case ExpPhase::created: return "created";
    case ExpPhase::fetching: return "fetching";
    case ExpPhase::starting: return "starting";
    case ExpPhase::running: return "running";
    case ExpPhase::stopped: return "stopped";
    case ExpPhase::revoked: return "revoked";
  }
  return "created";
}

std::string to_string(GuardKind k) {
  switch (k) {
    case GuardKind::out_of_band: return "out_of_band";
    case GuardKind::over_power: return "over_power";
    case GuardKind::unleased: return "unleased";
  }
  return "unleased";
}

LaunchTiming launch_timing(double image_size_bytes, double download_rate_bps) {
  if (image_size_bytes < 0) throw ValidationError("image size must be >= 0");
  if (!(download_rate_bps > 0)) throw ValidationError("download rate must be > 0");
  LaunchTiming t;
  t.fetch_s = image_size_bytes * 8.0 / download_rate_bps;
  t.start_s = 0.25 * t.fetch_s;
  return t;
}

ExpPhase Experiment::phase_at(double t) const {
  if (revoked_s && t >= *revoked_s) return ExpPhase::revoked;
  if (stopped_s && t >= *stopped_s) return ExpPhase::stopped;
  if (t < created_s) return ExpPhase::created;
  if (t < created_s + timing.fetch_s) return ExpPhase::fetching;
  if (t < running_since_s()) return ExpPhase::starting;
  return ExpPhase::running;
}

namespace {

bool freq_overlap(double a_lo, double a_hi, double b_lo, double b_hi) { return a_lo < b_hi && b_lo < a_hi; }

bool time_overlap(const LeaseRequest& a, const LeaseRequest& b) { return a.start_s < b.end_s && b.start_s < a.end_s; }

bool live(LeaseState s) { return s == LeaseState::pending || s == LeaseState::active; }

const SpectrumRange* containing_range(const Lease& lease, double lo, double hi) {
  const SpectrumRange* best = nullptr;
  for (const auto& r : lease.request.spectrum)
    if (lo >= r.low_hz && hi <= r.high_hz && (!best || r.max_power_dbm > best->max_power_dbm)) best = &r;
  return best;
}

bool holds(const Lease& lease, const ResourceId& device) {
  const auto& res = lease.request.resources;
  return std::find(res.begin(), res.end(), device) != res.end();
}

}  // namespace

GuardDecision guard_check_config(const RadioConfigRequest& req, const Lease& lease) {
  if (!holds(lease, req.device) || lease.state != LeaseState::active)
    return {false, GuardKind::unleased, "device " + req.device.site + "/" + req.device.device + " not under an active lease"};
  const double lo = req.carrier_hz - 0.5 * req.bandwidth_hz;
  const double hi = req.carrier_hz + 0.5 * req.bandwidth_hz;
  const SpectrumRange* r = containing_range(lease, lo, hi);
  if (!r) return {false, GuardKind::out_of_band, "occupied band outside the declared spectrum"};
  if (req.power_dbm > r->max_power_dbm) return {false, GuardKind::over_power, "power above the declared maximum"};
  return {true, std::nullopt, ""};
}

Orchestrator::Orchestrator(const Topology& topology, const PlatformCatalog& catalog, CalendarParams params,
                           double download_rate_bps, double sensing_slot_s)
    : topology_(&topology),
      catalog_(&catalog),
      params_(params),
      download_rate_bps_(download_rate_bps),
      slot_s_(sensing_slot_s) {
  if (!(download_rate_bps > 0) || !(sensing_slot_s > 0))
    throw ValidationError("download rate and sensing slot must be > 0");
  if (params.interference_radius_m && *params.interference_radius_m < 0)
    throw ValidationError("interference radius must be >= 0");
}

void Orchestrator::log(json entry) { journal_.push_back(std::move(entry)); }

std::string Orchestrator::journal_jsonl() const {
  std::string out;
  for (const auto& j : journal_) out += j.dump() + "\n";
  return out;
}

void Orchestrator::validate(const LeaseRequest& r) const {
  if (r.requester.empty()) throw ValidationError("lease request needs a requester");
  if (!(r.start_s < r.end_s)) throw ValidationError("lease window must satisfy start < end");
  if (r.resources.empty()) throw ValidationError("lease request needs at least one resource");
  for (const auto& res : r.resources) {
    const Site* s = topology_->find_site(res.site);
    if (!s) throw ValidationError("unknown site '" + res.site + "'");
    if (!s->has_platform(res.device))
      throw ValidationError("device '" + res.device + "' is not installed at '" + res.site + "'");
  }
  for (const auto& sp : r.spectrum) {
    if (!(sp.low_hz < sp.high_hz)) throw ValidationError("declared spectrum range must satisfy low < high");
    const bool inside = std::any_of(r.resources.begin(), r.resources.end(), [&](const ResourceId& res) {
      const auto& p = catalog_->at(res.device);
      return sp.low_hz >= p.freq_low_hz && sp.high_hz <= p.freq_high_hz;
    });
    if (!inside) throw ValidationError("declared spectrum range lies outside every requested device's band");
  }
}

double Orchestrator::interference_radius(const LeaseRequest& a, const LeaseRequest& b) const {
  if (params_.interference_radius_m) return *params_.interference_radius_m;
  double r = 0.0;
  for (const auto* req : {&a, &b})
    for (const auto& res : req->resources) r = std::max(r, catalog_->at(res.device).nominal_range_m);
  return r;
}

bool Orchestrator::overlaps_spectrum(const LeaseRequest& a, const LeaseRequest& b, std::string* detail) const {
  // A range is emitted by the devices whose band contains it; co-channel
  // overlap counts when the emitters are within the larger of their ranges.
  for (const auto& da : a.resources) {
    const auto& pa = catalog_->at(da.device);
    for (const auto& db : b.resources) {
      const auto& pb = catalog_->at(db.device);
      const double radius = params_.interference_radius_m.value_or(std::max(pa.nominal_range_m, pb.nominal_range_m));
      const double d = distance(topology_->site(da.site).position, topology_->site(db.site).position);
      if (d > radius) continue;
      for (const auto& ra : a.spectrum) {
        if (ra.low_hz < pa.freq_low_hz || ra.high_hz > pa.freq_high_hz) continue;
        for (const auto& rb : b.spectrum) {
          if (rb.low_hz < pb.freq_low_hz || rb.high_hz > pb.freq_high_hz) continue;
          if (!freq_overlap(ra.low_hz, ra.high_hz, rb.low_hz, rb.high_hz)) continue;
          if (detail) {
            std::ostringstream os;
            os << da.site << " and " << db.site << " are " << std::lround(d) << " m apart with overlapping spectrum";
            *detail = os.str();
          }
          return true;
        }
      }
    }
  }
  return false;
}

std::optional<Conflict> Orchestrator::find_conflict(const LeaseRequest& r) const {
  for (const auto& [id, l] : leases_) {
    if (!live(l.state) || !time_overlap(r, l.request)) continue;
    for (const auto& res : r.resources)
      if (holds(l, res)) return Conflict{Conflict::Kind::resource, id, "resource " + res.site + "/" + res.device + " already leased"};
  }
  for (const auto& [id, l] : leases_) {
    if (!live(l.state) || !time_overlap(r, l.request)) continue;
    std::string detail;
    if (overlaps_spectrum(r, l.request, &detail)) return Conflict{Conflict::Kind::spectrum, id, detail};
  }
  return std::nullopt;
}

void Orchestrator::set_lease_state(Lease& l, LeaseState s, double t) {
  l.state = s;
  l.state_since_s = t;
  log({{"op", "lease_state"}, {"t", t}, {"lease", l.id}, {"state", to_string(s)}});
}

std::variant<Lease, Conflict> Orchestrator::request_lease(const LeaseRequest& request, double now_s) {
  validate(request);
  advance_to(now_s);
  json entry = {{"op", "request_lease"}, {"t", now_s}, {"request", to_json(request)}};
  if (auto c = find_conflict(request)) {
    entry["result"] = {{"conflict", to_string(c->kind)}, {"blocking", c->blocking_lease}, {"detail", c->detail}};
    log(std::move(entry));
    return *c;
  }
  Lease l;
  l.id = "L" + std::to_string(next_lease_++);
  l.request = request;
  l.state = LeaseState::pending;
  l.state_since_s = now_s;
  entry["result"] = {{"lease", l.id}};
  log(std::move(entry));
  leases_[l.id] = l;
  advance_to(now_s);
  return leases_.at(l.id);
}

void Orchestrator::advance(double now_s) {
  if (now_s < now_) throw ValidationError("simulated time cannot go backwards");
  if (now_s > now_) log({{"op", "advance"}, {"t", now_s}});
  advance_to(now_s);
}

void Orchestrator::advance_to(double now_s) {
  if (now_s < now_) throw ValidationError("simulated time cannot go backwards");
  now_ = now_s;
  for (auto& [id, l] : leases_) {
    if (l.state == LeaseState::pending && l.request.start_s <= now_s)
      set_lease_state(l, LeaseState::active, l.request.start_s);
    if (l.state == LeaseState::active && l.request.end_s <= now_s)
      set_lease_state(l, LeaseState::expired, l.request.end_s);
  }
  for (auto& [id, e] : experiments_) {
    if (e.revoked_s || e.stopped_s) continue;
    const Lease& l = leases_.at(e.spec.lease_id);
    if (l.state == LeaseState::expired || l.state == LeaseState::revoked) {
      e.stopped_s = l.state_since_s;
      log({{"op", "exp_phase"}, {"t", *e.stopped_s}, {"experiment", e.id}, {"phase", "stopped"}});
    }
  }
}

LaunchResult Orchestrator::launch_experiment(const ExperimentSpec& spec, double now_s) {
  advance_to(now_s);
  json entry = {{"op", "launch"}, {"t", now_s}, {"spec", to_json(spec)}};
  auto it = leases_.find(spec.lease_id);
  if (it == leases_.end() || it->second.state != LeaseState::active) {
    LaunchResult r{false, "", it == leases_.end() ? "unknown lease" : "lease is " + to_string(it->second.state)};
    entry["result"] = {{"refused", r.reason}};
    log(std::move(entry));
    return r;
  }
  for (const auto& em : spec.emissions)
    if (!holds(it->second, em.device))
      throw ValidationError("emission profile uses a device outside the lease");
  Experiment e;
  e.id = "E" + std::to_string(next_exp_++);
  e.spec = spec;
  e.created_s = now_s;
  e.timing = launch_timing(spec.image_size_bytes, download_rate_bps_);
  entry["result"] = {{"experiment", e.id}, {"fetch_s", e.timing.fetch_s}, {"start_s", e.timing.start_s}};
  log(std::move(entry));
  experiments_[e.id] = e;
  return {true, e.id, ""};
}

void Orchestrator::revoke_experiment(Experiment& e, double t, const std::string& why) {
  if (e.revoked_s) return;
  e.revoked_s = t;
  log({{"op", "exp_phase"}, {"t", t}, {"experiment", e.id}, {"phase", "revoked"}, {"reason", why}});
  Lease& l = leases_.at(e.spec.lease_id);
  if (l.state == LeaseState::active) set_lease_state(l, LeaseState::revoked, t);
}

const Experiment* Orchestrator::experiment_for(const ResourceId& device, double t) const {
  for (const auto& [id, e] : experiments_) {
    if (e.revoked_s && *e.revoked_s <= t) continue;
    if (e.stopped_s && *e.stopped_s <= t) continue;
    if (holds(leases_.at(e.spec.lease_id), device)) return &e;
  }
  return nullptr;
}

std::vector<GuardEvent> Orchestrator::guard_check_spectrum(const std::vector<SpectrumObservation>& observations) {
  std::vector<GuardEvent> events;
  std::vector<json> obs_json;
  for (const auto& o : observations) obs_json.push_back(to_json(o));
  log({{"op", "guard_spectrum"}, {"observations", obs_json}});
  for (const auto& o : observations) {
    const double slot_start = static_cast<double>(o.slot) * slot_s_;
    const double slot_end = slot_start + slot_s_;
    if (slot_start > now_) advance_to(slot_start);
    const Experiment* e = experiment_for(o.source, slot_start);
    const Lease* lease = nullptr;
    if (e) {
      lease = &leases_.at(e->spec.lease_id);
    } else {
      for (const auto& [id, l] : leases_)
        if (l.state == LeaseState::active && holds(l, o.source)) lease = &l;
    }
    std::optional<GuardKind> kind;
    if (!lease || lease->state != LeaseState::active) {
      kind = GuardKind::unleased;
    } else if (const SpectrumRange* r = containing_range(*lease, o.low_hz, o.high_hz); !r) {
      kind = GuardKind::out_of_band;
    } else if (o.power_dbm > r->max_power_dbm) {
      kind = GuardKind::over_power;
    }
    if (!kind) continue;
    GuardEvent ev{slot_end, e ? e->id : std::string(), *kind, o};
    events.push_back(ev);
    guard_log_.push_back(ev);
    log({{"op", "guard_event"}, {"event", to_json(ev)}});
    if (e) revoke_experiment(experiments_.at(e->id), slot_end, to_string(*kind));
  }
  return events;
}

std::vector<SpectrumObservation> Orchestrator::sense_slot(std::int64_t slot) const {
  std::vector<SpectrumObservation> out;
  const double lo = static_cast<double>(slot) * slot_s_;
  const double hi = lo + slot_s_;
  for (const auto& [id, e] : experiments_) {
    double alive_end = 1e300;
    if (e.revoked_s) alive_end = std::min(alive_end, *e.revoked_s);
    if (e.stopped_s) alive_end = std::min(alive_end, *e.stopped_s);
    for (const auto& em : e.spec.emissions) {
      const double on = e.running_since_s() + em.start_offset_s;
      const double off = std::min(e.running_since_s() + em.end_offset_s, alive_end);
      if (on < hi && lo < off)
        out.push_back({em.device.site, slot, em.low_hz, em.high_hz, em.power_dbm, em.device});
    }
  }
  return out;
}

std::vector<SafetyViolation> Orchestrator::check_safety() const {
  std::vector<SafetyViolation> out;
  std::vector<const Lease*> active;
  for (const auto& [id, l] : leases_)
    if (l.state == LeaseState::active) active.push_back(&l);
  for (std::size_t i = 0; i < active.size(); ++i)
    for (std::size_t j = i + 1; j < active.size(); ++j) {
      const auto& a = *active[i];
      const auto& b = *active[j];
      for (const auto& res : a.request.resources)
        if (holds(b, res)) out.push_back({a.id, b.id, "shared resource " + res.site + "/" + res.device});
      std::string detail;
      if (overlaps_spectrum(a.request, b.request, &detail)) out.push_back({a.id, b.id, detail});
    }
  return out;
}

Orchestrator Orchestrator::replay(const std::string& jsonl, const Topology& topology, const PlatformCatalog& catalog,
                                  CalendarParams params) {
  Orchestrator o(topology, catalog, params);
  std::istringstream is(jsonl);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("journal line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::string op = j.value("op", "");
    if (op == "request_lease") {
      o.request_lease(lease_request_from_json(j.at("request")), j.at("t").get<double>());
    } else if (op == "launch") {
      o.launch_experiment(experiment_spec_from_json(j.at("spec")), j.at("t").get<double>());
    } else if (op == "advance") {
      o.advance(j.at("t").get<double>());
    } else if (op == "guard_spectrum") {
      std::vector<SpectrumObservation> obs;
      for (const auto& x : j.at("observations")) obs.push_back(observation_from_json(x));
      o.guard_check_spectrum(obs);
    }
    // Derived entries (state changes, events) are regenerated by the commands.
  }
  return o;
}

json to_json(const LeaseRequest& r) {
  json res = json::array(), sp = json::array();
  for (const auto& x : r.resources) res.push_back({{"site", x.site}, {"device", x.device}});
  for (const auto& x : r.spectrum) sp.push_back({{"low_hz", x.low_hz}, {"high_hz", x.high_hz}, {"max_power_dbm", x.max_power_dbm}});
  return {{"requester", r.requester}, {"resources", res}, {"start_s", r.start_s}, {"end_s", r.end_s}, {"spectrum", sp}};
}

LeaseRequest lease_request_from_json(const json& j) {
  try {
    LeaseRequest r;
    r.requester = j.at("requester").get<std::string>();
    for (const auto& x : j.at("resources")) r.resources.push_back({x.at("site").get<std::string>(), x.at("device").get<std::string>()});
    r.start_s = j.at("start_s").get<double>();
    r.end_s = j.at("end_s").get<double>();
    for (const auto& x : j.value("spectrum", json::array()))
      r.spectrum.push_back({x.at("low_hz").get<double>(), x.at("high_hz").get<double>(), x.at("max_power_dbm").get<double>()});
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed lease request: ") + e.what());
  }
}

json to_json(const ExperimentSpec& s) {
  json em = json::array();
  for (const auto& e : s.emissions)
    em.push_back({{"site", e.device.site}, {"device", e.device.device}, {"low_hz", e.low_hz}, {"high_hz", e.high_hz},
                  {"power_dbm", e.power_dbm}, {"start_offset_s", e.start_offset_s}, {"end_offset_s", e.end_offset_s}});
  return {{"lease", s.lease_id}, {"image_size_bytes", s.image_size_bytes}, {"workload", s.workload}, {"emissions", em}};
}

ExperimentSpec experiment_spec_from_json(const json& j) {
  try {
    ExperimentSpec s;
    s.lease_id = j.at("lease").get<std::string>();
    s.image_size_bytes = j.value("image_size_bytes", 0.0);
    s.workload = j.value("workload", "");
    for (const auto& e : j.value("emissions", json::array()))
      s.emissions.push_back({{e.at("site").get<std::string>(), e.at("device").get<std::string>()},
                             e.at("low_hz").get<double>(), e.at("high_hz").get<double>(),
                             e.at("power_dbm").get<double>(), e.value("start_offset_s", 0.0),
                             e.value("end_offset_s", 1e300)});
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed experiment spec: ") + e.what());
  }
}

json to_json(const SpectrumObservation& o) {
  return {{"site", o.site}, {"slot", o.slot}, {"low_hz", o.low_hz}, {"high_hz", o.high_hz},
          {"power_dbm", o.power_dbm}, {"source_site", o.source.site}, {"source_device", o.source.device}};
}

SpectrumObservation observation_from_json(const json& j) {
  try {
    return {j.at("site").get<std::string>(), j.at("slot").get<std::int64_t>(), j.at("low_hz").get<double>(),
            j.at("high_hz").get<double>(), j.at("power_dbm").get<double>(),
            {j.at("source_site").get<std::string>(), j.at("source_device").get<std::string>()}};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed observation: ") + e.what());
  }
}

json to_json(const GuardEvent& e) {
  return {{"t", e.time_s}, {"experiment", e.experiment_id}, {"kind", to_string(e.kind)}, {"evidence", to_json(e.evidence)}};
}

void append_jsonl(const std::string& path, const std::vector<json>& entries) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot open '" + path + "' for appending");
  for (const auto& e : entries) out << e.dump() << '\n';
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace aralab::orch

namespace aralab::orch {

namespace {

struct PendingLaunch {
  std::string lease_id;
  double start_s = 0.0;
};

}  // namespace

FuzzReport run_fuzz(Orchestrator& orch, const FuzzParams& fp, const std::function<void(const Orchestrator&)>& on_step) {
  if (fp.mean_interarrival_s <= 0) throw ValidationError("mean inter-arrival must be > 0");
  const Topology& topo = orch.topology();
  const PlatformCatalog& cat = orch.catalog();
  std::vector<ResourceId> pool;
  for (const Site* s : topo.sites_with_role(SiteRole::bs))
    for (const auto& p : s->installed_platforms)
      if (cat.at(p).kind == PlatformKind::ran) pool.push_back({s->id, p});
  if (pool.empty()) throw ValidationError("topology has no leasable radio devices");

  RngStream req_rng(fp.seed, 1);
  RngStream exp_rng(fp.seed, 2);
  FuzzReport rep;
  std::vector<PendingLaunch> pending;
  std::map<std::string, std::size_t> injection_of;
  const double slot = orch.sensing_slot_s();
  std::int64_t next_slot = 0;
  double t = 0.0;

  auto process_slot = [&](std::int64_t s) {
    const double t0 = static_cast<double>(s) * slot;
    orch.advance(std::max(orch.now(), t0));
    for (auto it = pending.begin(); it != pending.end();) {
      if (it->start_s > t0) {
        ++it;
        continue;
      }
      const Lease& l = orch.leases().at(it->lease_id);
      if (l.state == LeaseState::active) {
        ExperimentSpec spec;
        spec.lease_id = l.id;
        spec.image_size_bytes = std::floor(exp_rng.uniform(0.0, fp.max_image_bytes));
        spec.workload = "fuzz";
        double top = 0.0;
        for (const auto& r : l.request.spectrum) top = std::max(top, r.high_hz);
        for (const auto& res : l.request.resources) {
          const auto& p = cat.at(res.device);
          for (const auto& r : l.request.spectrum)
            if (r.low_hz >= p.freq_low_hz && r.high_hz <= p.freq_high_hz) {
              spec.emissions.push_back({res, r.low_hz, r.high_hz, r.max_power_dbm - 3.0, 0.0, 1e300});
              break;
            }
        }
        const bool inject = !spec.emissions.empty() && exp_rng.bernoulli(fp.violation_probability);
        GuardKind kind = GuardKind::out_of_band;
        double offset = 0.0;
        if (inject) {
          kind = exp_rng.bernoulli(0.5) ? GuardKind::out_of_band : GuardKind::over_power;
          offset = exp_rng.uniform(0.0, 1.0);
          Emission bad = spec.emissions.front();
          bad.start_offset_s = offset;
          if (kind == GuardKind::out_of_band) {
            bad.low_hz = top + 1e6;
            bad.high_hz = top + 6e6;
          } else {
            // Exceed every cap covering the band, not just the one it was drawn from.
            double cap = bad.power_dbm;
            for (const auto& r : l.request.spectrum)
              if (bad.low_hz >= r.low_hz && bad.high_hz <= r.high_hz) cap = std::max(cap, r.max_power_dbm);
            bad.power_dbm = cap + 3.0;
          }
          spec.emissions.push_back(bad);
        }
        const LaunchResult lr = orch.launch_experiment(spec, orch.now());
        if (lr.ok) {
          ++rep.launched;
          const Experiment& e = orch.experiments().at(lr.experiment_id);
          const double onset = e.running_since_s() + offset;
          if (inject && onset < l.request.end_s) {
            injection_of[e.id] = rep.injections.size();
            rep.injections.push_back({e.id, kind, onset, std::nullopt});
          }
        }
      }
      it = pending.erase(it);
    }
    const auto events = orch.guard_check_spectrum(orch.sense_slot(s));
    for (const auto& ev : events) {
      auto f = injection_of.find(ev.experiment_id);
      if (f != injection_of.end() && !rep.injections[f->second].revoked_s) {
        auto& inj = rep.injections[f->second];
        inj.revoked_s = orch.experiments().at(ev.experiment_id).revoked_s;
        if (inj.revoked_s) rep.max_guard_latency_s = std::max(rep.max_guard_latency_s, *inj.revoked_s - inj.onset_s);
      }
    }
    rep.safety_violations += orch.check_safety().size();
    ++rep.slots;
    if (on_step) on_step(orch);
  };

  for (std::size_t i = 0; i < fp.requests; ++i) {
    t += req_rng.exponential(fp.mean_interarrival_s);
    while (static_cast<double>(next_slot + 1) * slot <= t) process_slot(next_slot++);

    LeaseRequest r;
    r.requester = "user" + std::to_string(req_rng.below(20));
    const std::size_t n_res = 1 + req_rng.below(2);
    for (std::size_t k = 0; k < n_res; ++k) {
      const ResourceId& res = pool[req_rng.below(pool.size())];
      if (std::find(r.resources.begin(), r.resources.end(), res) == r.resources.end()) r.resources.push_back(res);
    }
    r.start_s = t + req_rng.uniform(0.0, 30.0);
    r.end_s = r.start_s + req_rng.uniform(10.0, 60.0);
    for (const auto& res : r.resources) {
      // Bands are cut into four chunks so that co-channel collisions are common.
      const auto& p = cat.at(res.device);
      const double w = (p.freq_high_hz - p.freq_low_hz) / 4.0;
      const double lo = p.freq_low_hz + w * static_cast<double>(req_rng.below(4));
      SpectrumRange sr{lo, lo + w, 20.0 + 10.0 * req_rng.uniform()};
      if (std::find(r.spectrum.begin(), r.spectrum.end(), sr) == r.spectrum.end()) r.spectrum.push_back(sr);
    }
    ++rep.requests;
    const auto res = orch.request_lease(r, std::max(orch.now(), t));
    if (const auto* l = std::get_if<Lease>(&res)) {
      ++rep.granted;
      pending.push_back({l->id, l->request.start_s});
    } else {
      const auto& c = std::get<Conflict>(res);
      ++(c.kind == Conflict::Kind::resource ? rep.resource_conflicts : rep.spectrum_conflicts);
    }
    rep.safety_violations += orch.check_safety().size();
    if (on_step) on_step(orch);
  }
  // Drain: run the clock until every lease window has closed.
  double horizon = t;
  for (const auto& [id, l] : orch.leases()) horizon = std::max(horizon, l.request.end_s);
  while (static_cast<double>(next_slot) * slot <= horizon + slot) process_slot(next_slot++);
  return rep;
}

nlohmann::json to_json(const FuzzReport& r) {
  std::size_t revoked = 0;
  for (const auto& i : r.injections) revoked += i.revoked_s ? 1 : 0;
  return {{"requests", r.requests},
          {"granted", r.granted},
          {"resource_conflicts", r.resource_conflicts},
          {"spectrum_conflicts", r.spectrum_conflicts},
          {"launched", r.launched},
          {"slots", r.slots},
          {"safety_violations", r.safety_violations},
          {"injected_violations", r.injections.size()},
          {"revoked_violations", revoked},
          {"max_guard_latency_s", r.max_guard_latency_s}};
}

}  // namespace aralab::orch
