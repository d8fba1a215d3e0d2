#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "aralab/error.hpp"
#include "aralab/power.hpp"
#include "aralab/spectrum.hpp"
#include "aralab/weather.hpp"

using namespace aralab;

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("power totals and shares at the reference state") {
  using namespace aralab::power;
  const auto p = power_model(residence_hall_baseline(), {BsStateKind::tx_idle, 0});
  CHECK(p.total_watts == doctest::Approx(1775.721).epsilon(1e-9));
  CHECK(p.total_amps == doctest::Approx(17.405).epsilon(1e-9));
  CHECK(p.readings[0].watts == doctest::Approx(692.234));
  CHECK(std::abs(watt_share_percent(p, Component::tvws) - 38.983) < 0.0005);
  double w = 0, a = 0;
  for (const auto& r : p.readings) {
    w += r.watts;
    a += r.amps;
  }
  CHECK(w == p.total_watts);
  CHECK(a == p.total_amps);
  double shares = 0;
  for (auto c : kComponents) shares += amp_share_percent(p, c);
  CHECK(shares == doctest::Approx(100.0));
}

TEST_CASE("TVWS draw rises with load") {
  using namespace aralab::power;
  const auto base = residence_hall_baseline();
  const auto idle = power_model(base, {BsStateKind::idle_no_tx, 0});
  const auto busy = power_model(base, {BsStateKind::ues_transmitting, 6});
  const double ratio = busy.readings[0].watts / idle.readings[0].watts;
  CHECK(std::abs(ratio - 1.21) <= 0.01);
  // Only the TVWS radio responds to the state.
  for (std::size_t i = 1; i < kComponents.size(); ++i) CHECK(busy.readings[i].watts == idle.readings[i].watts);

  double prev = -1;
  for (BsState s : {BsState{BsStateKind::off, 0}, BsState{BsStateKind::idle_no_tx, 0}, BsState{BsStateKind::tx_idle, 0},
                    BsState{BsStateKind::ues_connected, 3}, BsState{BsStateKind::ues_transmitting, 3},
                    BsState{BsStateKind::ues_transmitting, 6}}) {
    const double w = power_model(base, s).readings[0].watts;
    CHECK(w > prev);
    prev = w;
  }
  const auto off = power_model(base, {BsStateKind::off, 0});
  CHECK(off.total_watts == 0.0);
  CHECK(off.total_amps == 0.0);
  CHECK_THROWS_AS(tvws_state_factor({BsStateKind::ues_connected, -1}), ValidationError);
  CHECK_THROWS_AS(bs_state_from_string("napping"), ValidationError);
}

TEST_CASE("transmission restart shows a one-sample dip") {
  using namespace aralab::power;
  const auto base = residence_hall_baseline();
  const std::vector<StateChange> sched = {{0.0, {BsStateKind::idle_no_tx, 0}},
                                          {10.0, {BsStateKind::ues_transmitting, 6}}};
  const auto tr = power_trace(base, sched, 20.0, 1.0);
  REQUIRE(tr.size() == 20);
  const double idle = tr[5].readings[0].watts;
  CHECK(tr[10].readings[0].watts < idle);
  CHECK(tr[11].readings[0].watts == doctest::Approx(idle * 1.21));
  CHECK(tr[19].readings[0].watts == tr[11].readings[0].watts);
  CHECK_THROWS_AS(power_trace(base, {}, 1.0, 1.0), ValidationError);
}

TEST_CASE("weather codes agree with rain rate") {
  CHECK(classify_weather(0.0, 10) == WeatherCode::clear);
  CHECK(classify_weather(1.0, 10) == WeatherCode::drizzle);
  CHECK(classify_weather(10.0, 10) == WeatherCode::rain);
  CHECK(classify_weather(10.0, -3) == WeatherCode::snow);
  WeatherSample w = WeatherSample::raining(30);
  CHECK_NOTHROW(validate(w));
  w.code = WeatherCode::clear;
  CHECK_THROWS_AS(validate(w), ValidationError);
}

TEST_CASE("weather feed spatial correlation") {
  const std::vector<std::string> sites = {"a", "b"};
  WeatherFeedParams shared;
  shared.driver_weight = 1.0;
  shared.local_noise = 0.0;
  const auto same = weather_feed(sites, 86400, RngStream(4), shared);
  for (std::size_t i = 0; i < same.at("a").size(); ++i)
    CHECK(same.at("a")[i].rain_rate_mmh == same.at("b")[i].rain_rate_mmh);

  const auto mixed = weather_feed(sites, 30 * 86400, RngStream(4));
  std::vector<double> ra, rb;
  for (std::size_t i = 0; i < mixed.at("a").size(); ++i) {
    ra.push_back(mixed.at("a")[i].rain_rate_mmh);
    rb.push_back(mixed.at("b")[i].rain_rate_mmh);
  }
  const double r = pearson(ra, rb);
  CHECK(r > 0.0);
  CHECK(r < 1.0);
  for (const auto& [site, series] : mixed)
    for (const auto& w : series) CHECK_NOTHROW(validate(w));

  const auto again = weather_feed(sites, 30 * 86400, RngStream(4));
  CHECK(weather_series_to_csv(again) == weather_series_to_csv(mixed));
  CHECK_THROWS_AS(weather_feed(sites, 10, RngStream(1), WeatherFeedParams{60, 0.8, 0.6, 1.0}), ValidationError);
}

TEST_CASE("weather trace replay") {
  const auto series = weather_feed({"x", "y"}, 3600, RngStream(2));
  const auto csv = weather_series_to_csv(series);
  CHECK(weather_series_to_csv(weather_feed_from_trace(csv)) == csv);
  CHECK_THROWS_AS(weather_feed_from_trace(""), ParseError);
  CHECK_THROWS_AS(weather_feed_from_trace("t_s,site,rain_rate_mmh,wind_mps,temperature_c\n0,x,-1,0,0\n"), ParseError);
  CHECK_THROWS_AS(weather_feed_from_trace("t_s,site,rain_rate_mmh,wind_mps,temperature_c\n5,x,0,0,0\n5,x,0,0,0\n"),
                  ParseError);
}

TEST_CASE("occupancy grid dimensions and clipping") {
  using namespace aralab::spectrum;
  const Band band;
  CHECK(channel_count(band) == 38);
  CHECK_THROWS_AS(channel_count({470e6, 700e6, 6e6}), ValidationError);

  std::vector<Emitter> loud = {{"hot", 470e6, 482e6, 0.0}, {"quiet", 500e6, 506e6, -200.0}};
  const auto g = spectrum_scan("s", band, 900, loud, RngStream(1));
  CHECK(g.channels == 38);
  CHECK(g.slots == 900);
  CHECK(g.dbm.size() == 38 * 900);
  for (double v : g.dbm) {
    CHECK(v >= kFloorDbm);
    CHECK(v <= kCeilingDbm);
  }
  CHECK(g.at(0, 3) == kCeilingDbm);
  CHECK(g.at(1, 3) == kCeilingDbm);
  CHECK(g.at(2, 3) < -117.0);
  CHECK(g.at(5, 3) < -117.0);
}

TEST_CASE("available channels") {
  using namespace aralab::spectrum;
  const Band band;
  const auto empty = spectrum_scan("s", band, 300, {}, RngStream(2));
  CHECK(available_channels(empty).size() == 38);

  const auto tv = spectrum_scan("s", band, 300, {{"tv-7", 512e6, 518e6, -50.0}}, RngStream(2));
  const auto av = available_channels(tv);
  CHECK(av.size() == 37);
  CHECK(std::find(av.begin(), av.end(), 7) == av.end());

  const auto rural = spectrum_scan("s", band, 900, rural_primary_users(band, RngStream(3)), RngStream(3));
  const auto ra = available_channels(rural);
  CHECK(ra.size() >= 15);
  const std::set<std::size_t> taken = {1, 4, 7, 9, 14, 19, 22, 27, 33};
  for (auto c : ra) CHECK(taken.count(c) == 0);
  CHECK(received_power_dbm(30, 1000, 600e6) == doctest::Approx(30 - (60 + 20 * std::log10(600e6) - 147.55)));
}
