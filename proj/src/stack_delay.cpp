#include "aralab/stack_delay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "aralab/csv.hpp"
#include "aralab/error.hpp"

namespace aralab::stack {

std::string to_string(Layer l) {
  switch (l) {
    case Layer::SDAP: return "SDAP";
    case Layer::PDCP: return "PDCP";
    case Layer::RLC: return "RLC";
    case Layer::MAC: return "MAC";
    case Layer::PHY: return "PHY";
  }
  return "?";
}

Layer layer_from_string(const std::string& s) {
  for (Layer l : kLayers)
    if (to_string(l) == s) return l;
  throw ParseError("unknown layer '" + s + "'");
}

std::string to_string(Edge e) { return e == Edge::ingress ? "ingress" : "egress"; }

std::vector<StackMcs> default_mcs_table() {
  return {
      {"QPSK-1/4", 0.5, -2.0},
      {"QPSK-1/2", 1.0, 3.0},
      {"16QAM-1/2", 2.0, 8.0},
      {"64QAM-2/3", 4.0, 12.0},
      {"256QAM-7/8", 7.0, 17.0},
  };
}

void validate(const StackConfig& c) {
  if (c.dl_symbols < 1 || c.ul_symbols < 0 || c.dl_symbols + c.ul_symbols > 14)
    throw ValidationError("DL/UL symbol split must fit in 14 symbols");
  if (c.harq_rtt_slots < 1) throw ValidationError("harq_rtt must be >= 1 slot");
  if (!(c.slot_ms > 0)) throw ValidationError("slot duration must be > 0");
  if (c.mcs.empty()) throw ValidationError("MCS table is empty");
  for (std::size_t i = 0; i < c.mcs.size(); ++i) {
    if (!(c.mcs[i].efficiency > 0)) throw ValidationError("MCS efficiency must be > 0");
    if (i > 0 && !(c.mcs[i].sinr_threshold_db > c.mcs[i - 1].sinr_threshold_db))
      throw ValidationError("MCS thresholds must increase");
  }
  if (c.jitter < 0 || c.jitter >= 1) throw ValidationError("jitter must be in [0, 1)");
}

int prb_count(double bandwidth_hz, double scs_hz) {
  // 3GPP TS 38.101-1 maximum transmission bandwidth configuration (FR1).
  static const std::map<int, std::map<int, int>> table = {
      {15, {{5, 25}, {10, 52}, {15, 79}, {20, 106}, {25, 133}, {30, 160}, {40, 216}, {50, 270}}},
      {30, {{5, 11}, {10, 24}, {15, 38}, {20, 51}, {25, 65}, {30, 78}, {40, 106}, {50, 133},
            {60, 162}, {70, 189}, {80, 217}, {90, 245}, {100, 273}}},
      {60, {{10, 11}, {15, 18}, {20, 24}, {25, 31}, {30, 38}, {40, 51}, {50, 65}, {60, 79},
            {70, 93}, {80, 107}, {90, 121}, {100, 135}}},
  };
  const int scs = static_cast<int>(std::lround(scs_hz / 1e3));
  const int bw = static_cast<int>(std::lround(bandwidth_hz / 1e6));
  auto s = table.find(scs);
  if (s != table.end()) {
    auto b = s->second.find(bw);
    if (b != s->second.end()) return b->second;
  }
  throw ValidationError("no PRB count for " + std::to_string(bw) + " MHz at " + std::to_string(scs) + " kHz");
}

std::int64_t tbs_bytes(const StackConfig& config, const StackMcs& mcs) {
  if (!(mcs.efficiency > 0)) throw ValidationError("MCS efficiency must be > 0");
  const double bits = prb_count(config.bandwidth_hz, config.scs_hz) * 12.0 * config.dl_symbols * mcs.efficiency;
  return static_cast<std::int64_t>(std::floor(bits / 8.0));
}

std::size_t select_mcs(const StackConfig& config, double sinr_db) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < config.mcs.size(); ++i)
    if (sinr_db >= config.mcs[i].sinr_threshold_db) idx = i;
  return idx;
}

double bler(const StackConfig& config, std::size_t mcs_index, double sinr_db) {
  const double margin = sinr_db - config.mcs.at(mcs_index).sinr_threshold_db;
  return std::min(0.9, config.bler_at_threshold * std::pow(10.0, -margin / config.bler_db_per_decade));
}

namespace {

double jittered(double base, double jitter, RngStream& rng) {
  if (jitter == 0.0) return base;
  return base * (1.0 + jitter * (2.0 * rng.uniform() - 1.0));
}

PacketJourney journey_from_events(std::uint64_t id, const StackConfig& config,
                                  const std::map<std::tuple<int, std::uint32_t, int>, double>& ts, bool& complete,
                                  std::vector<Diagnostic>* diags) {
  PacketJourney j;
  j.packet_id = id;
  complete = true;
  auto get = [&](Layer l, std::uint32_t seg, Edge e) -> const double* {
    auto it = ts.find({static_cast<int>(l), seg, static_cast<int>(e)});
    return it == ts.end() ? nullptr : &it->second;
  };
  for (Layer l : kLayers) {
    if (l == Layer::RLC) continue;
    const double* in = get(l, 0, Edge::ingress);
    const double* out = get(l, 0, Edge::egress);
    if (!in || !out) {
      complete = false;
      if (diags) diags->push_back({id, "missing " + to_string(l) + (in ? " egress" : " ingress")});
      continue;
    }
    j.residence_ms[static_cast<std::size_t>(l)] = *out - *in;
  }
  // RLC: every segment needs both edges; residence spans first ingress to last egress.
  std::map<std::uint32_t, std::pair<const double*, const double*>> segs;
  for (const auto& [key, t] : ts) {
    if (std::get<0>(key) != static_cast<int>(Layer::RLC)) continue;
    auto& p = segs[std::get<1>(key)];
    (std::get<2>(key) == static_cast<int>(Edge::ingress) ? p.first : p.second) = &t;
  }
  if (segs.empty()) {
    complete = false;
    if (diags) diags->push_back({id, "no RLC events"});
  } else {
    double first_in = 0.0, last_out = 0.0;
    bool have = false;
    for (const auto& [seg, p] : segs) {
      if (!p.first || !p.second) {
        complete = false;
        if (diags)
          diags->push_back({id, "RLC segment " + std::to_string(seg) + " missing " + (p.first ? "egress" : "ingress")});
        continue;
      }
      if (!have) {
        first_in = *p.first;
        last_out = *p.second;
        have = true;
      } else {
        first_in = std::min(first_in, *p.first);
        last_out = std::max(last_out, *p.second);
      }
    }
    j.residence_ms[static_cast<std::size_t>(Layer::RLC)] = have ? last_out - first_in : 0.0;
    j.segments = static_cast<int>(segs.size());
  }
  const double harq_ms = config.harq_rtt_slots * config.slot_ms;
  j.retransmissions = static_cast<int>(std::floor(j.layer(Layer::MAC) / harq_ms));
  j.transmission_ms = config.transmission_ms();
  double total = 0.0;
  for (double r : j.residence_ms) total += r;
  j.total_ms = total + j.transmission_ms;
  j.complete = complete;
  return j;
}

}  // namespace

SimulatedPacket simulate_packet(std::uint64_t packet_id, double start_ms, std::int64_t size_bytes, double sinr_db,
                                const StackConfig& config, RngStream& rng) {
  validate(config);
  if (size_bytes <= 0) throw ValidationError("packet size must be > 0");
  const std::size_t mcs = select_mcs(config, sinr_db);
  const std::int64_t tbs = tbs_bytes(config, config.mcs[mcs]);
  const auto segments = static_cast<std::uint32_t>((size_bytes + tbs - 1) / tbs);

  const double p = bler(config, mcs, sinr_db);
  int retx = 0;
  while (rng.uniform() < p) ++retx;

  SimulatedPacket out;
  auto& ev = out.events;
  auto emit = [&](double t, Layer l, Edge e, std::uint32_t seg) { ev.push_back({t, l, e, packet_id, seg}); };

  double t = start_ms;
  emit(t, Layer::SDAP, Edge::ingress, 0);
  t += jittered(config.sdap_ms, config.jitter, rng);
  emit(t, Layer::SDAP, Edge::egress, 0);
  emit(t, Layer::PDCP, Edge::ingress, 0);
  t += jittered(config.pdcp_ms, config.jitter, rng);
  emit(t, Layer::PDCP, Edge::egress, 0);

  // One TBS per slot; segment i leaves after its segmentation work and its slot.
  const double rlc_in = t;
  double rlc_out = rlc_in;
  for (std::uint32_t s = 0; s < segments; ++s) {
    emit(rlc_in, Layer::RLC, Edge::ingress, s);
    const double out_t = rlc_in + (s + 1) * (config.rlc_segment_ms + config.slot_ms);
    emit(out_t, Layer::RLC, Edge::egress, s);
    rlc_out = std::max(rlc_out, out_t);
  }
  t = rlc_out;
  emit(t, Layer::MAC, Edge::ingress, 0);
  t += jittered(config.mac_ms, config.jitter, rng) + retx * config.harq_rtt_slots * config.slot_ms;
  emit(t, Layer::MAC, Edge::egress, 0);
  emit(t, Layer::PHY, Edge::ingress, 0);
  t += jittered(config.phy_ms, config.jitter, rng);
  emit(t, Layer::PHY, Edge::egress, 0);

  // Journey uses the same timestamp differences a log reader would compute.
  std::map<std::tuple<int, std::uint32_t, int>, double> ts;
  for (const auto& e : ev) ts[{static_cast<int>(e.layer), e.segment_id, static_cast<int>(e.edge)}] = e.timestamp_ms;
  bool complete = true;
  out.journey = journey_from_events(packet_id, config, ts, complete, nullptr);
  return out;
}

Reconstruction reconstruct_journeys(const std::vector<LayerEvent>& events, const StackConfig& config) {
  Reconstruction r;
  std::map<std::uint64_t, std::map<std::tuple<int, std::uint32_t, int>, double>> by_packet;
  for (const auto& e : events) {
    auto& m = by_packet[e.packet_id];
    const auto key = std::make_tuple(static_cast<int>(e.layer), e.segment_id, static_cast<int>(e.edge));
    if (m.count(key)) {
      r.diagnostics.push_back({e.packet_id, "duplicate " + to_string(e.layer) + " " + to_string(e.edge)});
      continue;
    }
    m[key] = e.timestamp_ms;
  }
  // Reject inverted pairs: drop the egress so the packet shows as incomplete.
  for (auto& [id, m] : by_packet) {
    for (auto it = m.begin(); it != m.end();) {
      const auto& [layer, seg, edge] = it->first;
      if (edge == static_cast<int>(Edge::egress)) {
        auto in = m.find({layer, seg, static_cast<int>(Edge::ingress)});
        if (in != m.end() && it->second < in->second) {
          r.diagnostics.push_back({id, "egress before ingress at " + to_string(static_cast<Layer>(layer)) +
                                           " segment " + std::to_string(seg)});
          it = m.erase(it);
          continue;
        }
      }
      ++it;
    }
    bool complete = true;
    r.journeys.push_back(journey_from_events(id, config, m, complete, &r.diagnostics));
  }
  return r;
}

DelayCdf delay_cdf(const std::vector<PacketJourney>& journeys, double bound_ms) {
  std::vector<double> d;
  for (const auto& j : journeys)
    if (j.complete) d.push_back(j.total_ms);
  if (d.empty()) throw ValidationError("delay_cdf needs at least one complete journey");
  std::sort(d.begin(), d.end());
  DelayCdf cdf;
  const double n = static_cast<double>(d.size());
  std::size_t within = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    cdf.points.push_back({d[i], static_cast<double>(i + 1) / n});
    if (d[i] <= bound_ms) ++within;
  }
  cdf.fraction_within_bound = static_cast<double>(within) / n;
  return cdf;
}

namespace {

LayerStat stat_of(const std::vector<double>& v) {
  LayerStat s;
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean_ms = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean_ms) * (x - s.mean_ms);
  const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.ci95_ms = 1.959963984540054 * sd / std::sqrt(n);
  return s;
}

}  // namespace

LayerContributions layer_contributions(const std::vector<PacketJourney>& journeys) {
  std::vector<const PacketJourney*> ok;
  for (const auto& j : journeys)
    if (j.complete) ok.push_back(&j);
  if (ok.size() < 2) throw ValidationError("layer_contributions needs at least two complete journeys");
  LayerContributions c;
  c.packets = ok.size();
  std::vector<double> v(ok.size());
  for (Layer l : kLayers) {
    for (std::size_t i = 0; i < ok.size(); ++i) v[i] = ok[i]->layer(l);
    c.layers[static_cast<std::size_t>(l)] = stat_of(v);
  }
  for (std::size_t i = 0; i < ok.size(); ++i) v[i] = ok[i]->transmission_ms;
  c.transmission = stat_of(v);
  for (std::size_t i = 0; i < ok.size(); ++i) v[i] = ok[i]->total_ms;
  c.total = stat_of(v);
  return c;
}

SinrProfile SinrProfile::no_rain() { return {"no_rain", 0.0, 25.0, 2.0, 3.0, 1.5}; }
SinrProfile SinrProfile::rain() { return {"rain", 0.3, 25.0, 2.0, 3.0, 1.5}; }

double SinrProfile::draw(RngStream& rng) const {
  const bool fade = rng.uniform() < fade_probability;
  return fade ? rng.normal(fade_mean_db, fade_std_db) : rng.normal(clear_mean_db, clear_std_db);
}

DelayRun run_delay_experiment(const SinrProfile& profile, const TrafficSpec& traffic, const StackConfig& config,
                              RngStream rng) {
  if (!(traffic.spacing_ms >= 0)) throw ValidationError("spacing must be >= 0");
  DelayRun run;
  RngStream channel = rng.fork(1);
  RngStream stack = rng.fork(2);
  for (std::size_t i = 0; i < traffic.packets; ++i) {
    const double sinr = profile.draw(channel);
    auto p = simulate_packet(i, static_cast<double>(i) * traffic.spacing_ms, traffic.size_bytes, sinr, config, stack);
    run.journeys.push_back(p.journey);
    run.events.insert(run.events.end(), p.events.begin(), p.events.end());
  }
  return run;
}

std::string format_event_log(const std::vector<LayerEvent>& events) {
  std::ostringstream os;
  for (const auto& e : events)
    os << format_double(e.timestamp_ms) << ' ' << to_string(e.layer) << ' ' << to_string(e.edge) << ' '
       << e.packet_id << ' ' << e.segment_id << '\n';
  return os.str();
}

std::vector<LayerEvent> parse_event_log(const std::string& text) {
  std::vector<LayerEvent> out;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string ts, layer, edge, pid, seg, extra;
    if (!(ls >> ts >> layer >> edge >> pid >> seg) || (ls >> extra))
      throw ParseError("event log line " + std::to_string(lineno) + ": expected 5 fields");
    LayerEvent e;
    e.timestamp_ms = parse_double(ts, "timestamp on line " + std::to_string(lineno));
    e.layer = layer_from_string(layer);
    if (edge == "ingress") e.edge = Edge::ingress;
    else if (edge == "egress") e.edge = Edge::egress;
    else throw ParseError("event log line " + std::to_string(lineno) + ": bad edge '" + edge + "'");
    try {
      std::size_t used = 0;
      e.packet_id = std::stoull(pid, &used);
      if (used != pid.size()) throw std::invalid_argument(pid);
      e.segment_id = static_cast<std::uint32_t>(std::stoul(seg, &used));
      if (used != seg.size()) throw std::invalid_argument(seg);
    } catch (const std::exception&) {
      throw ParseError("event log line " + std::to_string(lineno) + ": bad packet or segment id");
    }
    out.push_back(e);
  }
  return out;
}

std::string journeys_to_csv(const std::vector<PacketJourney>& journeys) {
  std::ostringstream os;
  os << "packet_id,sdap_ms,pdcp_ms,rlc_ms,mac_ms,phy_ms,transmission_ms,total_ms,retransmissions,segments,complete\n";
  for (const auto& j : journeys) {
    os << j.packet_id;
    for (double r : j.residence_ms) os << ',' << format_double(r);
    os << ',' << format_double(j.transmission_ms) << ',' << format_double(j.total_ms) << ',' << j.retransmissions
       << ',' << j.segments << ',' << (j.complete ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace aralab::stack
