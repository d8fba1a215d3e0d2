#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "aralab/rng.hpp"

namespace aralab::stack {

enum class Layer { SDAP, PDCP, RLC, MAC, PHY };
inline constexpr std::array<Layer, 5> kLayers = {Layer::SDAP, Layer::PDCP, Layer::RLC, Layer::MAC, Layer::PHY};
std::string to_string(Layer l);
Layer layer_from_string(const std::string& s);

enum class Edge { ingress, egress };
std::string to_string(Edge e);

struct StackMcs {
  std::string name;
  double efficiency = 1.0;       // bits per resource element
  double sinr_threshold_db = 0.0;
};

/// Five-level SINR -> MCS table shipped with the delay model.
std::vector<StackMcs> default_mcs_table();

struct StackConfig {
  double bandwidth_hz = 40e6;
  double scs_hz = 30e3;
  int dl_symbols = 6;
  int ul_symbols = 4;
  double carrier_hz = 3.5864e9;
  int harq_rtt_slots = 8;
  double slot_ms = 0.5;

  double sdap_ms = 0.00355;
  double pdcp_ms = 0.00712;
  double mac_ms = 0.080;
  double phy_ms = 0.01784;
  double rlc_segment_ms = 0.009;  // segmentation cost per segment
  double jitter = 0.1;            // relative, uniform +/- on base constants

  double bler_at_threshold = 0.3;
  double bler_db_per_decade = 2.0;

  std::vector<StackMcs> mcs = default_mcs_table();

  /// Over-the-air time of the DL symbols in one slot; reported apart from
  /// the layers.
  double transmission_ms() const { return slot_ms * dl_symbols / 14.0; }
};

void validate(const StackConfig& c);

/// Standard PRB count for the bandwidth/numerology pair (106 for 40 MHz at 30 kHz).
int prb_count(double bandwidth_hz, double scs_hz);
std::int64_t tbs_bytes(const StackConfig& config, const StackMcs& mcs);
std::size_t select_mcs(const StackConfig& config, double sinr_db);
double bler(const StackConfig& config, std::size_t mcs_index, double sinr_db);

struct LayerEvent {
  double timestamp_ms = 0.0;
  Layer layer = Layer::SDAP;
  Edge edge = Edge::ingress;
  std::uint64_t packet_id = 0;
  std::uint32_t segment_id = 0;
  bool operator==(const LayerEvent&) const = default;
};

struct PacketJourney {
  std::uint64_t packet_id = 0;
  std::array<double, 5> residence_ms{};  // indexed by Layer
  double transmission_ms = 0.0;
  double total_ms = 0.0;
  int retransmissions = 0;
  int segments = 0;
  bool complete = true;

  double layer(Layer l) const { return residence_ms[static_cast<std::size_t>(l)]; }
  bool operator==(const PacketJourney&) const = default;
};

struct SimulatedPacket {
  PacketJourney journey;
  std::vector<LayerEvent> events;
};

SimulatedPacket simulate_packet(std::uint64_t packet_id, double start_ms, std::int64_t size_bytes, double sinr_db,
                                const StackConfig& config, RngStream& rng);

struct Diagnostic {
  std::uint64_t packet_id = 0;
  std::string message;
};

struct Reconstruction {
  std::vector<PacketJourney> journeys;  // sorted by packet id; incomplete ones flagged
  std::vector<Diagnostic> diagnostics;
};

/// Pairs ingress/egress per (packet, layer, segment) in any input order.
Reconstruction reconstruct_journeys(const std::vector<LayerEvent>& events, const StackConfig& config);

struct CdfPoint {
  double delay_ms;
  double fraction;
};

struct DelayCdf {
  std::vector<CdfPoint> points;
  double fraction_within_bound = 0.0;
};

/// Uses complete journeys only; throws ValidationError when none remain.
DelayCdf delay_cdf(const std::vector<PacketJourney>& journeys, double bound_ms);

struct LayerStat {
  double mean_ms = 0.0;
  double ci95_ms = 0.0;  // half-width, normal approximation
};

struct LayerContributions {
  std::array<LayerStat, 5> layers{};
  LayerStat transmission;
  LayerStat total;
  std::size_t packets = 0;
  const LayerStat& operator[](Layer l) const { return layers[static_cast<std::size_t>(l)]; }
};

LayerContributions layer_contributions(const std::vector<PacketJourney>& journeys);

/// SINR process for a weather condition: a clear state and a fade state,
/// drawn independently per packet.
struct SinrProfile {
  std::string name;
  double fade_probability = 0.0;
  double clear_mean_db = 25.0;
  double clear_std_db = 2.0;
  double fade_mean_db = 3.0;
  double fade_std_db = 1.5;

  static SinrProfile no_rain();
  static SinrProfile rain();  // about 2 in/h
  double draw(RngStream& rng) const;
};

struct TrafficSpec {
  std::size_t packets = 100;
  std::int64_t size_bytes = 100000;
  double spacing_ms = 10.0;
};

struct DelayRun {
  std::vector<PacketJourney> journeys;
  std::vector<LayerEvent> events;
};

DelayRun run_delay_experiment(const SinrProfile& profile, const TrafficSpec& traffic, const StackConfig& config,
                              RngStream rng);

/// One event per line: `timestamp_ms layer edge packet_id segment_id`.
std::string format_event_log(const std::vector<LayerEvent>& events);
std::vector<LayerEvent> parse_event_log(const std::string& text);

std::string journeys_to_csv(const std::vector<PacketJourney>& journeys);

}  // namespace aralab::stack
