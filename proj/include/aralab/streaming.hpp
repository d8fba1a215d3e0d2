#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aralab/radio_channel.hpp"

namespace aralab::streaming {

struct TraceSample {
  double t_s = 0.0;
  double capacity_bps = 0.0;
  double loss_prob = 0.0;
};

/// Piecewise-constant channel; each sample holds until the next one.
class ChannelTrace {
public:
  explicit ChannelTrace(std::vector<TraceSample> samples);

  const TraceSample& at(double t_s) const;
  double duration_s() const { return duration_; }
  const std::vector<TraceSample>& samples() const { return samples_; }

private:
  std::vector<TraceSample> samples_;
  double duration_ = 0.0;
};

/// CSV `t_s,capacity_bps,loss_prob` with a header line.
ChannelTrace parse_trace(const std::string& csv_text);
ChannelTrace load_trace(const std::string& path);
std::string trace_to_csv(const ChannelTrace& trace);

/// Drive-by trace from a capacity profile at constant speed; points with no
/// capacity are full outages.
ChannelTrace trace_from_capacity_profile(const std::vector<CapacitySample>& profile, double speed_mps,
                                         double base_loss = 0.0);

/// Constant capacity with i.i.d. loss.
ChannelTrace constant_trace(double duration_s, double capacity_bps, double loss_prob, double step_s = 0.1);

enum class Transport { ltl, udp };
std::string to_string(Transport t);
Transport transport_from_string(const std::string& s);

struct SessionParams {
  double fps = 30.0;
  double bitrate_bps = 30e6;
  std::size_t symbol_size = 1250;
  double overhead = 0.2;             // repair symbols as a fraction of K (ltl only)
  double latency_budget_ms = 200.0;
  double propagation_ms = 5.0;
  double display_fraction = 0.95;    // share of source data needed to show a frame
};

void validate(const SessionParams& p);

struct FrameOutcome {
  std::uint32_t frame = 0;
  double generated_s = 0.0;
  double ready_s = -1.0;  // when the frame became showable; < 0 if never
  bool displayed = false;
  bool intact = false;
  int received_symbols = 0;
};

struct QoEReport {
  std::vector<double> fps_series;  // frames shown per 1 s of source time
  std::vector<double> fps_cdf;     // sorted fps_series
  double median_fps = 0.0;
  double stall_ratio = 0.0;
  double frame_intact_ratio = 0.0;
  double delivered_bitrate_bps = 0.0;
  std::size_t frames = 0;
  std::vector<FrameOutcome> outcomes;
};

QoEReport stream_session(const ChannelTrace& trace, const SessionParams& params, Transport transport,
                         std::uint64_t seed);

std::string qoe_to_json(const QoEReport& r, Transport t);

}  // namespace aralab::streaming
