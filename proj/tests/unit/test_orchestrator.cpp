#include <doctest.h>

#include "aralab/error.hpp"
#include "aralab/orchestrator.hpp"
#include "aralab/rng.hpp"

using namespace aralab;
using namespace aralab::orch;

namespace {

struct World {
  PlatformCatalog catalog = default_catalog();
  Topology topology = load_topology(default_topology_path(), catalog);
};

const World& world() {
  static const World w;
  return w;
}

LeaseRequest tvws(const std::string& who, const std::string& site, double start, double end, double lo_mhz,
                  double hi_mhz) {
  return {who, {{site, "AraMIMO-TVWS"}}, start, end, {{lo_mhz * 1e6, hi_mhz * 1e6, 30.0}}};
}

Lease grant(Orchestrator& o, const LeaseRequest& r, double now) {
  auto res = o.request_lease(r, now);
  REQUIRE(std::holds_alternative<Lease>(res));
  return std::get<Lease>(res);
}

Emission emission(const std::string& site, double lo_mhz, double hi_mhz, double dbm) {
  return {{site, "AraMIMO-TVWS"}, lo_mhz * 1e6, hi_mhz * 1e6, dbm, 0.0, 1e300};
}

}  // namespace

TEST_CASE("lease lifecycle") {
  Orchestrator o(world().topology, world().catalog);
  const auto l = grant(o, tvws("alice", "wilson-hall", 10, 100, 500, 520), 0);
  CHECK(l.id == "L1");
  CHECK(l.state == LeaseState::pending);
  o.advance(10);
  CHECK(o.leases().at("L1").state == LeaseState::active);
  o.advance(150);
  CHECK(o.leases().at("L1").state == LeaseState::expired);
  CHECK(o.leases().at("L1").state_since_s == 100);
  CHECK_THROWS_AS(o.advance(50), ValidationError);
}

TEST_CASE("resource conflicts follow the time window") {
  Orchestrator o(world().topology, world().catalog);
  grant(o, tvws("alice", "wilson-hall", 0, 100, 500, 520), 0);
  auto c = o.request_lease(tvws("bob", "wilson-hall", 50, 150, 600, 620), 0);
  REQUIRE(std::holds_alternative<Conflict>(c));
  CHECK(std::get<Conflict>(c).kind == Conflict::Kind::resource);
  CHECK(std::get<Conflict>(c).blocking_lease == "L1");
  // Back-to-back windows do not overlap.
  grant(o, tvws("bob", "wilson-hall", 100, 150, 500, 520), 0);
}

TEST_CASE("spectrum conflicts depend on distance and band") {
  Orchestrator o(world().topology, world().catalog);
  grant(o, tvws("alice", "wilson-hall", 0, 100, 500, 520), 0);
  // curtiss-farm is about 4.2 km away, inside the TVWS range.
  auto c = o.request_lease(tvws("bob", "curtiss-farm", 0, 100, 510, 530), 0);
  REQUIRE(std::holds_alternative<Conflict>(c));
  CHECK(std::get<Conflict>(c).kind == Conflict::Kind::spectrum);
  // Disjoint channel nearby, or same channel 10 km away, is fine.
  grant(o, tvws("bob", "curtiss-farm", 0, 100, 600, 620), 0);
  grant(o, tvws("carol", "agronomy-farm", 0, 100, 500, 520), 0);

  Orchestrator tight(world().topology, world().catalog, {500.0});
  grant(tight, tvws("alice", "wilson-hall", 0, 100, 500, 520), 0);
  grant(tight, tvws("bob", "curtiss-farm", 0, 100, 510, 530), 0);
  CHECK(tight.check_safety().empty());
}

TEST_CASE("malformed requests are rejected") {
  Orchestrator o(world().topology, world().catalog);
  CHECK_THROWS_AS(o.request_lease(tvws("a", "nowhere", 0, 1, 500, 520), 0), ValidationError);
  CHECK_THROWS_AS(o.request_lease(tvws("a", "wilson-hall", 5, 5, 500, 520), 0), ValidationError);
  CHECK_THROWS_AS(o.request_lease(tvws("a", "wilson-hall", 0, 1, 3000, 3010), 0), ValidationError);
  CHECK_THROWS_AS(o.request_lease(tvws("", "wilson-hall", 0, 1, 500, 520), 0), ValidationError);
  LeaseRequest mm{"a", {{"curtiss-farm", "AraMIMO-mm"}}, 0, 1, {}};
  CHECK_THROWS_AS(o.request_lease(mm, 0), ValidationError);
  CHECK(o.leases().empty());
}

TEST_CASE("launch timing splits 80/20") {
  const auto t = launch_timing(50e6, 100e6);
  CHECK(t.fetch_s == doctest::Approx(4.0));
  CHECK(t.start_s == doctest::Approx(1.0));
  CHECK(t.fetch_s / t.total_s() == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(launch_timing(0, 100e6).total_s() == 0.0);
  CHECK_THROWS_AS(launch_timing(-1, 1), ValidationError);

  Orchestrator o(world().topology, world().catalog);
  grant(o, tvws("alice", "wilson-hall", 0, 100, 500, 520), 0);
  const auto r = o.launch_experiment({"L1", 50e6, "w", {}}, 10);
  REQUIRE(r.ok);
  const auto& e = o.experiments().at(r.experiment_id);
  CHECK(e.phase_at(9) == ExpPhase::created);
  CHECK(e.phase_at(12) == ExpPhase::fetching);
  CHECK(e.phase_at(14.5) == ExpPhase::starting);
  CHECK(e.phase_at(15) == ExpPhase::running);
  const auto z = o.launch_experiment({"L1", 0, "w", {}}, 20);
  CHECK(o.experiments().at(z.experiment_id).phase_at(20) == ExpPhase::running);
  o.advance(200);
  CHECK(o.experiments().at(r.experiment_id).phase_at(200) == ExpPhase::stopped);
}

TEST_CASE("launch refuses inactive leases") {
  Orchestrator o(world().topology, world().catalog);
  grant(o, tvws("alice", "wilson-hall", 10, 20, 500, 520), 0);
  CHECK_FALSE(o.launch_experiment({"L1", 0, "w", {}}, 5).ok);
  CHECK_FALSE(o.launch_experiment({"L9", 0, "w", {}}, 5).ok);
  const auto late = o.launch_experiment({"L1", 0, "w", {}}, 30);
  CHECK_FALSE(late.ok);
  CHECK(late.reason == "lease is expired");
  Orchestrator p(world().topology, world().catalog);
  grant(p, tvws("alice", "wilson-hall", 0, 20, 500, 520), 0);
  CHECK_THROWS_AS(p.launch_experiment({"L1", 0, "w", {emission("curtiss-farm", 500, 510, 0)}}, 1), ValidationError);
}

TEST_CASE("configuration gate") {
  Orchestrator o(world().topology, world().catalog);
  grant(o, tvws("alice", "wilson-hall", 0, 100, 500, 520), 0);
  o.advance(1);
  const Lease& l = o.leases().at("L1");
  const ResourceId dev{"wilson-hall", "AraMIMO-TVWS"};
  CHECK(guard_check_config({dev, 510e6, 10e6, 30.0}, l).allow);
  auto oob = guard_check_config({dev, 520e6, 10e6, 20.0}, l);
  CHECK_FALSE(oob.allow);
  CHECK(oob.reason == GuardKind::out_of_band);
  auto hot = guard_check_config({dev, 510e6, 10e6, 33.0}, l);
  CHECK(hot.reason == GuardKind::over_power);
  auto other = guard_check_config({{"curtiss-farm", "AraMIMO-TVWS"}, 510e6, 10e6, 0.0}, l);
  CHECK(other.reason == GuardKind::unleased);
}

TEST_CASE("spectrum guard revokes within the slot") {
  Orchestrator o(world().topology, world().catalog);
  grant(o, tvws("alice", "wilson-hall", 0, 100, 500, 520), 0);
  const auto good = o.launch_experiment({"L1", 0, "ok", {emission("wilson-hall", 500, 520, 27)}}, 1);
  REQUIRE(good.ok);
  CHECK(o.guard_check_spectrum(o.sense_slot(2)).empty());

  // Same device now also transmits 5 MHz above its declared range.
  grant(o, tvws("bob", "agronomy-farm", 0, 100, 500, 520), 2);
  Emission bad = emission("agronomy-farm", 520, 525, 10);
  bad.start_offset_s = 0.4;
  const auto r = o.launch_experiment({"L2", 0, "bad", {emission("agronomy-farm", 500, 520, 27), bad}}, 3);
  REQUIRE(r.ok);
  CHECK(o.guard_check_spectrum(o.sense_slot(2)).empty());
  const auto ev = o.guard_check_spectrum(o.sense_slot(3));
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].kind == GuardKind::out_of_band);
  CHECK(ev[0].experiment_id == r.experiment_id);
  const auto& e = o.experiments().at(r.experiment_id);
  REQUIRE(e.revoked_s);
  CHECK(*e.revoked_s == 4.0);
  CHECK(*e.revoked_s - 3.4 <= o.sensing_slot_s());
  CHECK(o.leases().at("L2").state == LeaseState::revoked);
  CHECK(o.leases().at("L1").state == LeaseState::active);
  // Nothing from the revoked experiment is sensed afterwards.
  for (const auto& obs : o.sense_slot(5)) CHECK(obs.site != "agronomy-farm");

  SpectrumObservation rogue{"research-park", 6, 500e6, 510e6, 0.0, {"research-park", "AraMIMO-TVWS"}};
  const auto ev2 = o.guard_check_spectrum({rogue});
  REQUIRE(ev2.size() == 1);
  CHECK(ev2[0].kind == GuardKind::unleased);
  CHECK(ev2[0].experiment_id.empty());
}

TEST_CASE("replaying the journal rebuilds the same state") {
  Orchestrator o(world().topology, world().catalog);
  FuzzParams fp;
  fp.requests = 200;
  fp.violation_probability = 0.5;
  fp.seed = 3;
  run_fuzz(o, fp);
  const auto text = o.journal_jsonl();
  const auto r = Orchestrator::replay(text, world().topology, world().catalog);
  CHECK(r.journal_jsonl() == text);
  REQUIRE(r.leases().size() == o.leases().size());
  for (const auto& [id, l] : o.leases()) {
    CHECK(r.leases().at(id).state == l.state);
    CHECK(r.leases().at(id).state_since_s == l.state_since_s);
  }
  CHECK(r.guard_log().size() == o.guard_log().size());
  CHECK_THROWS_AS(Orchestrator::replay("{not json\n", world().topology, world().catalog), ParseError);
}

TEST_CASE("first come, first served") {
  RngStream rng(5);
  const std::vector<std::string> sites = {"wilson-hall", "curtiss-farm", "research-park"};
  for (int i = 0; i < 200; ++i) {
    Orchestrator o(world().topology, world().catalog);
    const auto& site = sites[rng.below(sites.size())];
    const double s1 = rng.uniform(0, 50), s2 = rng.uniform(0, 50);
    auto first = tvws("first", site, s1, s1 + 60, 500, 520);
    auto second = tvws("second", site, s2, s2 + 60, 500, 520);
    // The second asks for more and starts earlier half the time; order still wins.
    if (rng.bernoulli(0.5)) second.end_s += 100;
    CHECK(std::holds_alternative<Lease>(o.request_lease(first, 0)));
    CHECK(std::holds_alternative<Conflict>(o.request_lease(second, 0)));
  }
}

TEST_CASE("fuzzed calendar stays safe and every violation is revoked") {
  Orchestrator o(world().topology, world().catalog);
  FuzzParams fp;
  fp.requests = 500;
  fp.violation_probability = 0.6;
  fp.seed = 8;
  std::size_t checks = 0;
  const auto rep = run_fuzz(o, fp, [&](const Orchestrator& x) {
    ++checks;
    CHECK(x.check_safety().empty());
  });
  CHECK(rep.safety_violations == 0);
  CHECK(rep.granted > 0);
  CHECK(rep.granted + rep.resource_conflicts + rep.spectrum_conflicts == rep.requests);
  CHECK(checks == rep.slots + rep.requests);
  REQUIRE_FALSE(rep.injections.empty());
  for (const auto& inj : rep.injections) {
    REQUIRE(inj.revoked_s);
    CHECK(*inj.revoked_s - inj.onset_s <= o.sensing_slot_s());
    CHECK(*inj.revoked_s >= inj.onset_s);
  }
}
