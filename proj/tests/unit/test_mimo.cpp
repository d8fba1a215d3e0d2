#include <doctest.h>

#include <cmath>

#include "aralab/mimo.hpp"
#include "aralab/rng.hpp"

using namespace aralab;
using namespace aralab::mimo;

namespace {

ChannelMatrix random_channels(int streams, int antennas, RngStream& rng) {
  ChannelMatrix h(streams, antennas);
  for (int i = 0; i < streams; ++i)
    for (int j = 0; j < antennas; ++j) h(i, j) = Complex(rng.normal(), rng.normal());
  return h;
}

// Least-squares projection through the normal equations.
double oracle_orthogonality(const ChannelMatrix& h, const StreamGroup& g) {
  double worst = 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Eigen::MatrixXcd a(h.cols(), static_cast<Eigen::Index>(g.size() - 1));
    Eigen::Index k = 0;
    for (std::size_t j = 0; j < g.size(); ++j)
      if (j != i) a.col(k++) = h.row(g[j]).transpose();
    const Eigen::VectorXcd v = h.row(g[i]).transpose();
    const Eigen::VectorXcd coef = (a.adjoint() * a).ldlt().solve(a.adjoint() * v);
    worst = std::min(worst, 1.0 - (a * coef).norm() / v.norm());
  }
  return worst;
}

}  // namespace

TEST_CASE("orthogonality reference values") {
  ChannelMatrix eye = ChannelMatrix::Identity(2, 2);
  CHECK(orthogonality(eye, {0, 1}) == doctest::Approx(1.0));

  ChannelMatrix dup(2, 3);
  dup << Complex(1, 1), 2, 3, Complex(1, 1), 2, 3;
  CHECK(orthogonality(dup, {0, 1}) == doctest::Approx(0.0).epsilon(1e-12));

  ChannelMatrix two(2, 2);
  two << 1, 0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK(std::abs(orthogonality(two, {0, 1}) - (1 - 1 / std::sqrt(2.0))) < 1e-6);
  CHECK(std::abs(orthogonality(two, {0, 1}) - 0.2929) < 1e-4);

  CHECK_THROWS_AS(orthogonality(two, {0}), ValidationError);
  ChannelMatrix zero = ChannelMatrix::Zero(2, 2);
  zero(0, 0) = 1;
  CHECK_THROWS_AS(orthogonality(zero, {0, 1}), ValidationError);
}

TEST_CASE("orthogonality agrees with a normal-equations oracle and is scale invariant") {
  RngStream rng(21);
  for (int t = 0; t < 50; ++t) {
    ChannelMatrix h = random_channels(4, 6, rng);
    const StreamGroup g = {0, 1, 2, 3};
    const double got = orthogonality(h, g);
    CHECK(got == doctest::Approx(oracle_orthogonality(h, g)).epsilon(1e-9));
    h.row(2) *= Complex(rng.normal(), rng.normal());
    CHECK(orthogonality(h, g) == doctest::Approx(got).epsilon(1e-9));
  }
}

TEST_CASE("group capacity closed forms") {
  ChannelMatrix one(1, 2);
  one << 1, 0;
  const auto single = group_capacity(one, {0}, 540e3, 1.0, 3.0);
  CHECK(single.capacity_bps == doctest::Approx(2 * 540e3));

  // Orthogonal equal-norm streams: each gets half the power and no interference.
  ChannelMatrix orth(2, 2);
  orth << 2, 0, 0, Complex(0, 2);
  const auto pair = group_capacity(orth, {0, 1}, 1.0, 1.0, 10.0);
  for (double s : pair.sinr) CHECK(s == doctest::Approx(5.0 * 4.0));
  CHECK(pair.capacity_bps == doctest::Approx(2 * std::log2(21.0)));

  ChannelMatrix dup(2, 2);
  dup << 1, 1, 1, 1;
  CHECK_THROWS_AS(group_capacity(dup, {0, 1}, 1.0, 1.0, 1.0), UnschedulableGroup);
  CHECK_THROWS_AS(group_capacity(orth, {}, 1.0, 1.0, 1.0), UnschedulableGroup);
}

TEST_CASE("aggregate of a single-stream schedule") {
  ChannelMatrix one(1, 2);
  one << 1, 0;
  RbPlan plan;
  SchedulerParams p;
  p.tx_power_w = 3.0;
  const auto s = schedule_rbs(std::vector<ChannelMatrix>(42, one), plan, SchedulePolicy::greedy, p);
  CHECK(aggregate_capacity(s) == doctest::Approx(45.36e6));
  CHECK(aggregate_capacity(Schedule{}) == 0.0);
}

TEST_CASE("one UE with orthogonal chains uses both streams on every RB") {
  RbPlan plan{4, 540e3};
  ChannelMatrix h = ChannelMatrix::Identity(2, 4);
  const auto s = schedule_rbs(std::vector<ChannelMatrix>(4, h), plan, SchedulePolicy::greedy);
  for (const auto& rb : s.rbs) CHECK(rb.group == StreamGroup{0, 1});
}

TEST_CASE("greedy never loses to force_all") {
  RngStream rng(99);
  for (int t = 0; t < 100; ++t) {
    const int streams = 2 + static_cast<int>(rng.below(7));
    RbPlan plan{3, 540e3};
    std::vector<ChannelMatrix> hs;
    const ChannelMatrix base = random_channels(streams, 8, rng);
    for (int rb = 0; rb < plan.n_rbs; ++rb) hs.push_back(base + 0.3 * random_channels(streams, 8, rng));
    SchedulerParams p;
    p.tx_power_w = rng.uniform(0.5, 20.0);
    const double g = aggregate_capacity(schedule_rbs(hs, plan, SchedulePolicy::greedy, p));
    const double f = aggregate_capacity(schedule_rbs(hs, plan, SchedulePolicy::force_all, p));
    CHECK(g >= f * (1 - 1e-12));
  }
}

TEST_CASE("spread users form larger groups than co-located users") {
  RbPlan plan;
  ChannelModel model;
  RngStream r1(5), r2(5);
  const std::vector<double> snr(4, 10.0);
  const auto spread = synthesize_channels(snr, uniform_correlation(4, 0.0), model, plan.n_rbs, r1);
  const auto close = synthesize_channels(snr, uniform_correlation(4, 0.95), model, plan.n_rbs, r2);
  const auto ss = schedule_rbs(spread, plan, SchedulePolicy::greedy);
  const auto sc = schedule_rbs(close, plan, SchedulePolicy::greedy);
  CHECK(max_group_size(ss) > max_group_size(sc));
  CHECK(aggregate_capacity(ss) > aggregate_capacity(sc));
  CHECK(aggregate_capacity(schedule_rbs(close, plan, SchedulePolicy::force_all)) < aggregate_capacity(sc));
}

TEST_CASE("schedules are deterministic and respect the antenna count") {
  RbPlan plan{6, 540e3};
  ChannelModel model;
  model.n_antennas = 4;
  RngStream a(8), b(8);
  const auto h1 = synthesize_channels({5, 5, 5}, uniform_correlation(3, 0.2), model, plan.n_rbs, a);
  const auto h2 = synthesize_channels({5, 5, 5}, uniform_correlation(3, 0.2), model, plan.n_rbs, b);
  const auto s1 = schedule_rbs(h1, plan, SchedulePolicy::greedy);
  const auto s2 = schedule_rbs(h2, plan, SchedulePolicy::greedy);
  CHECK(schedule_to_csv(s1) == schedule_to_csv(s2));
  for (const auto& rb : s1.rbs) CHECK(static_cast<int>(rb.group.size()) <= model.n_antennas);
}
