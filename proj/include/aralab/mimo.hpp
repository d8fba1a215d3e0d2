#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aralab/error.hpp"
#include "aralab/rng.hpp"

namespace aralab::mimo {

using Complex = std::complex<double>;
/// Rows are per-stream channel vectors, columns are BS antennas.
using ChannelMatrix = Eigen::MatrixXcd;
using StreamGroup = std::vector<int>;

class UnschedulableGroup : public Error {
public:
  using Error::Error;
};

struct RbPlan {
  int n_rbs = 42;
  double rb_bandwidth_hz = 540e3;
};

enum class CorrelationMeasure { amplitude, power };

/// Per-stream orthogonality values (1 - multiple correlation with the span
/// of the other members) plus min/mean aggregates.
struct OrthogonalityReport {
  std::vector<double> per_stream;
  double min = 0.0;
  double mean = 0.0;
};

OrthogonalityReport orthogonality_report(const ChannelMatrix& channels, const StreamGroup& group,
                                         CorrelationMeasure measure = CorrelationMeasure::amplitude);

/// Group orthogonality, aggregated by minimum over members.
double orthogonality(const ChannelMatrix& channels, const StreamGroup& group,
                     CorrelationMeasure measure = CorrelationMeasure::amplitude);

struct GroupCapacity {
  double capacity_bps = 0.0;
  std::vector<double> sinr;      // linear, one per group member
  std::vector<double> rate_bps;
};

/// Zero-forcing with equal per-stream power. Throws UnschedulableGroup
/// when the group exceeds the antenna count or the submatrix is rank
/// deficient.
GroupCapacity group_capacity(const ChannelMatrix& channels, const StreamGroup& group,
                             double rb_bandwidth_hz, double noise_power_w, double tx_power_w,
                             double spectral_efficiency_cap = 8.0);

enum class SchedulePolicy { greedy, force_all };
std::string to_string(SchedulePolicy p);

struct SchedulerParams {
  double noise_power_w = 1.0;
  double tx_power_w = 1.0;
  double spectral_efficiency_cap = 8.0;
  double orthogonality_threshold = 0.25;
  CorrelationMeasure measure = CorrelationMeasure::amplitude;
};

struct RbAllocation {
  int rb = 0;
  StreamGroup group;             // sorted stream ids
  std::vector<double> sinr;
  std::vector<double> rate_bps;
  double capacity_bps = 0.0;
  double orthogonality_min = 1.0;
  double orthogonality_mean = 1.0;
};

struct Schedule {
  std::vector<RbAllocation> rbs;
};

/// One group per RB. `channels_per_rb` must hold n_rbs matrices of equal
/// shape.
Schedule schedule_rbs(const std::vector<ChannelMatrix>& channels_per_rb, const RbPlan& plan,
                      SchedulePolicy policy, const SchedulerParams& params = {});

double aggregate_capacity(const Schedule& schedule);
int max_group_size(const Schedule& schedule);
/// histogram[n] = number of RBs whose group has n streams.
std::map<int, int> group_size_histogram(const Schedule& schedule);

std::string schedule_to_csv(const Schedule& schedule);
std::string histogram_to_csv(const std::map<std::string, std::map<int, int>>& per_set);

/// Correlated Rayleigh channels: UE-level correlation matrix mixes i.i.d.
/// complex Gaussian draws; each UE contributes `streams_per_ue` independent
/// streams; per-RB variation mixes a common and an RB-specific component.
struct ChannelModel {
  int n_antennas = 14;
  int streams_per_ue = 2;
  double rb_innovation = 0.3;  // fraction of power that varies per RB
};

std::vector<ChannelMatrix> synthesize_channels(const std::vector<double>& ue_snr_db,
                                               const Eigen::MatrixXd& ue_correlation,
                                               const ChannelModel& model, int n_rbs,
                                               RngStream& rng);

/// Constant off-diagonal correlation matrix.
Eigen::MatrixXd uniform_correlation(int n_ues, double rho);

}  // namespace aralab::mimo
