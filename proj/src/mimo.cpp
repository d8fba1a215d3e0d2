#include "aralab/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "aralab/csv.hpp"

namespace aralab::mimo {

namespace {

void check_group(const ChannelMatrix& channels, const StreamGroup& group) {
  std::set<int> seen;
  for (int s : group) {
    if (s < 0 || s >= channels.rows())
      throw ValidationError("stream id " + std::to_string(s) + " out of range");
    if (!seen.insert(s).second) throw ValidationError("stream id repeated in group");
  }
}

ChannelMatrix rows_of(const ChannelMatrix& channels, const StreamGroup& group) {
  ChannelMatrix h(static_cast<Eigen::Index>(group.size()), channels.cols());
  for (std::size_t i = 0; i < group.size(); ++i) h.row(static_cast<Eigen::Index>(i)) = channels.row(group[i]);
  return h;
}

}  // namespace

OrthogonalityReport orthogonality_report(const ChannelMatrix& channels, const StreamGroup& group,
                                         CorrelationMeasure measure) {
  if (group.size() < 2) throw ValidationError("orthogonality needs at least two streams");
  check_group(channels, group);
  OrthogonalityReport rep;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const Eigen::VectorXcd h = channels.row(group[i]).transpose();
    const double norm = h.norm();
    if (!(norm > 0.0)) throw ValidationError("stream " + std::to_string(group[i]) + " has a zero channel vector");
    Eigen::MatrixXcd others(channels.cols(), static_cast<Eigen::Index>(group.size() - 1));
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < group.size(); ++j)
      if (j != i) others.col(col++) = channels.row(group[j]).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(others);
    qr.setThreshold(1e-12);
    const Eigen::Index rank = qr.rank();
    double ratio = 0.0;
    if (rank > 0) {
      const Eigen::MatrixXcd q =
          qr.householderQ() * Eigen::MatrixXcd::Identity(channels.cols(), rank);
      const Eigen::VectorXcd proj = q * (q.adjoint() * h);
      ratio = std::min(1.0, proj.norm() / norm);
    }
    const double r = measure == CorrelationMeasure::amplitude ? ratio : ratio * ratio;
    rep.per_stream.push_back(std::clamp(1.0 - r, 0.0, 1.0));
  }
  rep.min = *std::min_element(rep.per_stream.begin(), rep.per_stream.end());
  rep.mean = std::accumulate(rep.per_stream.begin(), rep.per_stream.end(), 0.0) /
             static_cast<double>(rep.per_stream.size());
  return rep;
}

double orthogonality(const ChannelMatrix& channels, const StreamGroup& group, CorrelationMeasure measure) {
  return orthogonality_report(channels, group, measure).min;
}

GroupCapacity group_capacity(const ChannelMatrix& channels, const StreamGroup& group,
                             double rb_bandwidth_hz, double noise_power_w, double tx_power_w,
                             double spectral_efficiency_cap) {
  if (group.empty()) throw UnschedulableGroup("empty group");
  check_group(channels, group);
  if (static_cast<Eigen::Index>(group.size()) > channels.cols())
    throw UnschedulableGroup("group larger than the antenna count");
  const ChannelMatrix h = rows_of(channels, group);
  const Eigen::MatrixXcd gram = h * h.adjoint();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
  lu.setThreshold(1e-10);
  if (lu.rank() < static_cast<Eigen::Index>(group.size()))
    throw UnschedulableGroup("channel submatrix is rank deficient");
  const Eigen::MatrixXcd inv = lu.inverse();
  GroupCapacity out;
  const double per_stream_power = tx_power_w / static_cast<double>(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double d = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    if (!(d > 0.0)) throw UnschedulableGroup("ill-conditioned channel submatrix");
    const double sinr = per_stream_power / (noise_power_w * d);
    const double rate = rb_bandwidth_hz * std::min(std::log2(1.0 + sinr), spectral_efficiency_cap);
    out.sinr.push_back(sinr);
    out.rate_bps.push_back(rate);
    out.capacity_bps += rate;
  }
  return out;
}

std::string to_string(SchedulePolicy p) { return p == SchedulePolicy::greedy ? "greedy" : "force_all"; }

namespace {

RbAllocation make_allocation(int rb, const ChannelMatrix& h, StreamGroup group, const RbPlan& plan,
                             const SchedulerParams& p) {
  std::sort(group.begin(), group.end());
  RbAllocation a;
  a.rb = rb;
  a.group = group;
  try {
    auto cap = group_capacity(h, group, plan.rb_bandwidth_hz, p.noise_power_w, p.tx_power_w,
                              p.spectral_efficiency_cap);
    a.sinr = std::move(cap.sinr);
    a.rate_bps = std::move(cap.rate_bps);
    a.capacity_bps = cap.capacity_bps;
  } catch (const UnschedulableGroup&) {
    a.sinr.assign(group.size(), 0.0);
    a.rate_bps.assign(group.size(), 0.0);
    a.capacity_bps = 0.0;
  }
  if (group.size() >= 2) {
    auto rep = orthogonality_report(h, group, p.measure);
    a.orthogonality_min = rep.min;
    a.orthogonality_mean = rep.mean;
  }
  return a;
}

// Capacity of a candidate, or a negative value when not admissible.
double admissible_capacity(const ChannelMatrix& h, const StreamGroup& cand, const RbPlan& plan,
                           const SchedulerParams& p) {
  if (static_cast<Eigen::Index>(cand.size()) > h.cols()) return -1.0;
  if (cand.size() >= 2 && orthogonality(h, cand, p.measure) < p.orthogonality_threshold) return -1.0;
  try {
    return group_capacity(h, cand, plan.rb_bandwidth_hz, p.noise_power_w, p.tx_power_w,
                          p.spectral_efficiency_cap)
        .capacity_bps;
  } catch (const UnschedulableGroup&) {
    return -1.0;
  }
}

StreamGroup greedy_group(const ChannelMatrix& h, const RbPlan& plan, const SchedulerParams& p) {
  const int n = static_cast<int>(h.rows());
  StreamGroup group;
  double current = 0.0;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  while (true) {
    int best = -1;
    double best_cap = current;
    for (int s = 0; s < n; ++s) {
      if (used[static_cast<std::size_t>(s)]) continue;
      StreamGroup cand = group;
      cand.push_back(s);
      std::sort(cand.begin(), cand.end());
      const double c = admissible_capacity(h, cand, plan, p);
      if (c > best_cap) {
        best_cap = c;
        best = s;
      }
    }
    if (best < 0) break;
    group.push_back(best);
    used[static_cast<std::size_t>(best)] = true;
    current = best_cap;
  }
  // The full group competes with the greedy result directly.
  if (n >= 2 && static_cast<int>(group.size()) < n && n <= h.cols()) {
    StreamGroup all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    try {
      const double c = group_capacity(h, all, plan.rb_bandwidth_hz, p.noise_power_w, p.tx_power_w,
                                      p.spectral_efficiency_cap)
                           .capacity_bps;
      if (c > current) return all;
    } catch (const UnschedulableGroup&) {
    }
  }
  return group;
}

}  // namespace

Schedule schedule_rbs(const std::vector<ChannelMatrix>& channels_per_rb, const RbPlan& plan,
                      SchedulePolicy policy, const SchedulerParams& params) {
  if (plan.n_rbs < 1) throw ValidationError("n_rbs must be >= 1");
  if (static_cast<int>(channels_per_rb.size()) != plan.n_rbs)
    throw ValidationError("expected one channel matrix per RB");
  const auto rows = channels_per_rb.front().rows();
  const auto cols = channels_per_rb.front().cols();
  if (rows < 1) throw ValidationError("at least one stream is required");
  for (const auto& h : channels_per_rb)
    if (h.rows() != rows || h.cols() != cols) throw ValidationError("channel matrices differ in shape");

  Schedule out;
  out.rbs.reserve(channels_per_rb.size());
  for (int rb = 0; rb < plan.n_rbs; ++rb) {
    const ChannelMatrix& h = channels_per_rb[static_cast<std::size_t>(rb)];
    StreamGroup g;
    if (policy == SchedulePolicy::force_all) {
      g.resize(static_cast<std::size_t>(rows));
      std::iota(g.begin(), g.end(), 0);
    } else {
      g = greedy_group(h, plan, params);
    }
    out.rbs.push_back(make_allocation(rb, h, std::move(g), plan, params));
  }
  return out;
}

double aggregate_capacity(const Schedule& schedule) {
  double total = 0.0;
  for (const auto& a : schedule.rbs) total += a.capacity_bps;
  return total;
}

int max_group_size(const Schedule& schedule) {
  int m = 0;
  for (const auto& a : schedule.rbs)
    if (a.capacity_bps > 0) m = std::max(m, static_cast<int>(a.group.size()));
  return m;
}

std::map<int, int> group_size_histogram(const Schedule& schedule) {
  std::map<int, int> h;
  for (const auto& a : schedule.rbs) ++h[a.capacity_bps > 0 ? static_cast<int>(a.group.size()) : 0];
  return h;
}

std::string schedule_to_csv(const Schedule& schedule) {
  std::ostringstream out;
  out << "rb,group,size,capacity_bps,orthogonality_min,orthogonality_mean\n";
  for (const auto& a : schedule.rbs) {
    out << a.rb << ',';
    for (std::size_t i = 0; i < a.group.size(); ++i) out << (i ? ";" : "") << a.group[i];
    out << ',' << a.group.size() << ',' << format_fixed(a.capacity_bps, 1) << ','
        << format_fixed(a.orthogonality_min, 6) << ',' << format_fixed(a.orthogonality_mean, 6) << '\n';
  }
  return out.str();
}

std::string histogram_to_csv(const std::map<std::string, std::map<int, int>>& per_set) {
  int max_size = 0;
  for (const auto& [name, h] : per_set)
    if (!h.empty()) max_size = std::max(max_size, h.rbegin()->first);
  std::ostringstream out;
  out << "set";
  for (int n = 1; n <= max_size; ++n) out << ",size_" << n;
  out << '\n';
  for (const auto& [name, h] : per_set) {
    out << name;
    for (int n = 1; n <= max_size; ++n) {
      auto it = h.find(n);
      out << ',' << (it == h.end() ? 0 : it->second);
    }
    out << '\n';
  }
  return out.str();
}

Eigen::MatrixXd uniform_correlation(int n_ues, double rho) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n_ues, n_ues, rho);
  c.diagonal().setOnes();
  return c;
}

std::vector<ChannelMatrix> synthesize_channels(const std::vector<double>& ue_snr_db,
                                               const Eigen::MatrixXd& ue_correlation,
                                               const ChannelModel& model, int n_rbs, RngStream& rng) {
  const int n_ues = static_cast<int>(ue_snr_db.size());
  if (ue_correlation.rows() != n_ues || ue_correlation.cols() != n_ues)
    throw ValidationError("correlation matrix must be n_ues x n_ues");
  if (model.n_antennas < 1 || model.streams_per_ue < 1 || n_rbs < 1)
    throw ValidationError("invalid channel model dimensions");
  Eigen::MatrixXd c = ue_correlation;
  c.diagonal().array() += 1e-12;
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw ValidationError("correlation matrix is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();

  const int n_streams = n_ues * model.streams_per_ue;
  const int m = model.n_antennas;
  auto draw = [&](void) {
    // Columns: antennas; rows: streams. Correlated across UEs per (stream slot, antenna).
    ChannelMatrix out(n_streams, m);
    for (int s = 0; s < model.streams_per_ue; ++s)
      for (int a = 0; a < m; ++a) {
        Eigen::VectorXcd z(n_ues);
        for (int u = 0; u < n_ues; ++u) z(u) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
        const Eigen::VectorXcd x = l.cast<Complex>() * z;
        for (int u = 0; u < n_ues; ++u) out(u * model.streams_per_ue + s, a) = x(u);
      }
    return out;
  };

  const ChannelMatrix common = draw();
  const double nu = std::clamp(model.rb_innovation, 0.0, 1.0);
  std::vector<ChannelMatrix> per_rb;
  per_rb.reserve(static_cast<std::size_t>(n_rbs));
  for (int rb = 0; rb < n_rbs; ++rb) {
    ChannelMatrix h = std::sqrt(1.0 - nu) * common;
    if (nu > 0) h += std::sqrt(nu) * draw();
    for (int u = 0; u < n_ues; ++u) {
      const double g = std::sqrt(std::pow(10.0, ue_snr_db[static_cast<std::size_t>(u)] / 10.0));
      for (int s = 0; s < model.streams_per_ue; ++s) h.row(u * model.streams_per_ue + s) *= g;
    }
    per_rb.push_back(std::move(h));
  }
  return per_rb;
}

}  // namespace aralab::mimo
