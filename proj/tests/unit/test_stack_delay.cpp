#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "aralab/error.hpp"
#include "aralab/stack_delay.hpp"

using namespace aralab;
using namespace aralab::stack;

namespace {

double sum_layers(const PacketJourney& j) {
  double s = 0;
  for (Layer l : kLayers) s += j.layer(l);
  return s;
}

}  // namespace

TEST_CASE("PRB count and transport block size") {
  CHECK(prb_count(40e6, 30e3) == 106);
  CHECK(prb_count(20e6, 15e3) == 106);
  CHECK(prb_count(100e6, 30e3) == 273);
  CHECK_THROWS_AS(prb_count(41e6, 30e3), ValidationError);

  const StackConfig c;
  for (const auto& m : c.mcs)
    CHECK(tbs_bytes(c, m) == static_cast<std::int64_t>(std::floor(106 * 12 * 6 * m.efficiency / 8.0)));
}

TEST_CASE("MCS selection and BLER") {
  const StackConfig c;
  CHECK(select_mcs(c, -10.0) == 0);
  CHECK(select_mcs(c, 3.0) == 1);
  CHECK(select_mcs(c, 11.9) == 2);
  CHECK(select_mcs(c, 40.0) == c.mcs.size() - 1);
  CHECK(bler(c, 1, 3.0) == doctest::Approx(0.3));
  CHECK(bler(c, 1, 5.0) == doctest::Approx(0.03));
  CHECK(bler(c, 1, -10.0) == doctest::Approx(0.9));
}

TEST_CASE("config validation") {
  StackConfig c;
  c.dl_symbols = 12;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = {};
  c.mcs[2].sinr_threshold_db = -5;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = {};
  c.jitter = 1.0;
  CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("a journey sums its layers plus air time") {
  const StackConfig c;
  RngStream rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto p = simulate_packet(i, i * 10.0, 100000, rng.uniform(-5, 30), c, rng);
    const auto& j = p.journey;
    CHECK(j.complete);
    CHECK(j.total_ms == doctest::Approx(sum_layers(j) + c.transmission_ms()));
    for (Layer l : kLayers) CHECK(j.layer(l) >= 0.0);
    CHECK(p.events.size() == 2 * (4 + static_cast<std::size_t>(j.segments)));
  }
}

TEST_CASE("segmentation follows the TBS") {
  StackConfig c;
  c.jitter = 0.0;
  RngStream rng(1);
  const auto tbs = tbs_bytes(c, c.mcs.back());
  const auto p = simulate_packet(0, 0.0, 3 * tbs + 1, 40.0, c, rng);
  CHECK(p.journey.segments == 4);
  CHECK(p.journey.layer(Layer::RLC) == doctest::Approx(4 * (c.rlc_segment_ms + c.slot_ms)));
  CHECK(p.journey.layer(Layer::SDAP) == doctest::Approx(c.sdap_ms));
  CHECK_THROWS_AS(simulate_packet(0, 0.0, 0, 10.0, c, rng), ValidationError);
}

TEST_CASE("reconstruction inverts simulation on shuffled logs") {
  const StackConfig c;
  const auto run = run_delay_experiment(SinrProfile::rain(), {1000, 100000, 10.0}, c, RngStream(9));
  auto events = run.events;
  RngStream sh(2);
  for (std::size_t i = events.size(); i > 1; --i) std::swap(events[i - 1], events[sh.below(i)]);
  const auto rec = reconstruct_journeys(events, c);
  CHECK(rec.diagnostics.empty());
  REQUIRE(rec.journeys.size() == run.journeys.size());
  for (std::size_t i = 0; i < rec.journeys.size(); ++i) CHECK(rec.journeys[i] == run.journeys[i]);
}

TEST_CASE("broken logs produce diagnostics") {
  const StackConfig c;
  RngStream rng(5);
  auto p = simulate_packet(7, 0.0, 1000, 20.0, c, rng);

  auto dup = p.events;
  dup.push_back(dup.front());
  auto r1 = reconstruct_journeys(dup, c);
  REQUIRE(r1.diagnostics.size() == 1);
  CHECK(r1.diagnostics[0].message.find("duplicate") != std::string::npos);
  CHECK(r1.journeys[0].complete);

  auto inv = p.events;
  for (auto& e : inv)
    if (e.layer == Layer::MAC && e.edge == Edge::egress) e.timestamp_ms = -1.0;
  auto r2 = reconstruct_journeys(inv, c);
  CHECK_FALSE(r2.journeys[0].complete);
  CHECK(std::any_of(r2.diagnostics.begin(), r2.diagnostics.end(),
                    [](const Diagnostic& d) { return d.message.find("egress before ingress") != std::string::npos; }));

  auto missing = p.events;
  missing.erase(std::remove_if(missing.begin(), missing.end(),
                               [](const LayerEvent& e) { return e.layer == Layer::PHY && e.edge == Edge::ingress; }),
                missing.end());
  auto r3 = reconstruct_journeys(missing, c);
  CHECK_FALSE(r3.journeys[0].complete);
  CHECK(r3.diagnostics.at(0).message == "missing PHY ingress");
}

TEST_CASE("event log roundtrip and parse errors") {
  const StackConfig c;
  const auto run = run_delay_experiment(SinrProfile::no_rain(), {20, 50000, 5.0}, c, RngStream(3));
  const auto text = format_event_log(run.events);
  CHECK(parse_event_log(text) == run.events);
  CHECK_THROWS_AS(parse_event_log("1.0 RLC ingress 1\n"), ParseError);
  CHECK_THROWS_AS(parse_event_log("1.0 XYZ ingress 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_event_log("1.0 RLC sideways 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_event_log("1.0 RLC ingress x 0\n"), ParseError);
}

TEST_CASE("delay CDF on small inputs") {
  std::vector<PacketJourney> js(4);
  const double totals[] = {3.0, 1.0, 4.0, 2.0};
  for (int i = 0; i < 4; ++i) js[i].total_ms = totals[i];
  js[2].complete = false;
  const auto cdf = delay_cdf(js, 2.5);
  REQUIRE(cdf.points.size() == 3);
  CHECK(cdf.points[0].delay_ms == 1.0);
  CHECK(cdf.points[2].delay_ms == 3.0);
  CHECK(cdf.points[2].fraction == 1.0);
  CHECK(cdf.fraction_within_bound == doctest::Approx(2.0 / 3.0));
  js[0].complete = js[1].complete = js[3].complete = false;
  CHECK_THROWS_AS(delay_cdf(js, 1.0), ValidationError);
}

TEST_CASE("layer means near the measured reference") {
  const StackConfig c;
  const auto run = run_delay_experiment(SinrProfile::no_rain(), {1000, 100000, 10.0}, c, RngStream(9));
  const auto lc = layer_contributions(run.journeys);
  const std::pair<Layer, double> ref[] = {{Layer::SDAP, 0.00355}, {Layer::PDCP, 0.00712}, {Layer::RLC, 7.63437},
                                          {Layer::MAC, 0.08133}, {Layer::PHY, 0.01784}};
  for (const auto& [l, v] : ref) CHECK(std::abs(lc[l].mean_ms - v) <= 0.2 * v);

  const auto wet = run_delay_experiment(SinrProfile::rain(), {1000, 100000, 10.0}, c, RngStream(9));
  const auto lw = layer_contributions(wet.journeys);
  CHECK(lw[Layer::RLC].mean_ms / lc[Layer::RLC].mean_ms == doctest::Approx(4.0).epsilon(0.25));
  CHECK(lw[Layer::MAC].mean_ms / lc[Layer::MAC].mean_ms == doctest::Approx(2.0).epsilon(0.25));
}
