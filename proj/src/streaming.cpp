#include "aralab/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aralab/catalog.hpp"
#include "aralab/csv.hpp"
#include "aralab/error.hpp"
#include "aralab/fountain.hpp"
#include "aralab/rng.hpp"

namespace aralab::streaming {

ChannelTrace::ChannelTrace(std::vector<TraceSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw ValidationError("trace is empty");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (i > 0 && !(s.t_s > samples_[i - 1].t_s)) throw ValidationError("trace times must increase");
    if (s.capacity_bps < 0) throw ValidationError("trace capacity must be >= 0");
    if (s.loss_prob < 0 || s.loss_prob > 1) throw ValidationError("trace loss must be in [0, 1]");
  }
  if (samples_.front().t_s != 0.0) throw ValidationError("trace must start at t = 0");
  const double last_step = samples_.size() > 1 ? samples_.back().t_s - samples_[samples_.size() - 2].t_s : 1.0;
  duration_ = samples_.back().t_s + last_step;
}

const TraceSample& ChannelTrace::at(double t_s) const {
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t_s,
                             [](double t, const TraceSample& s) { return t < s.t_s; });
  return it == samples_.begin() ? samples_.front() : *(it - 1);
}

ChannelTrace parse_trace(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<TraceSample> out;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split_csv_line(line);
    if (!header) {
      header = true;
      if (f.size() == 3 && f[0] == "t_s") continue;
      throw ParseError("trace line " + std::to_string(lineno) + ": expected header t_s,capacity_bps,loss_prob");
    }
    if (f.size() != 3) throw ParseError("trace line " + std::to_string(lineno) + ": expected 3 fields");
    const std::string where = " on trace line " + std::to_string(lineno);
    out.push_back({parse_double(f[0], "t_s" + where), parse_double(f[1], "capacity_bps" + where),
                   parse_double(f[2], "loss_prob" + where)});
  }
  return ChannelTrace(std::move(out));
}

ChannelTrace load_trace(const std::string& path) { return parse_trace(read_text_file(path)); }

std::string trace_to_csv(const ChannelTrace& trace) {
  std::ostringstream os;
  os << "t_s,capacity_bps,loss_prob\n";
  for (const auto& s : trace.samples())
    os << format_double(s.t_s) << ',' << format_double(s.capacity_bps) << ',' << format_double(s.loss_prob) << '\n';
  return os.str();
}

ChannelTrace trace_from_capacity_profile(const std::vector<CapacitySample>& profile, double speed_mps,
                                         double base_loss) {
  if (profile.empty()) throw ValidationError("capacity profile is empty");
  if (!(speed_mps > 0)) throw ValidationError("speed must be > 0");
  std::vector<TraceSample> out;
  const double d0 = profile.front().distance_m;
  for (const auto& p : profile) {
    const bool up = p.capacity_bps > 0;
    out.push_back({(p.distance_m - d0) / speed_mps, p.capacity_bps, up ? base_loss : 1.0});
  }
  return ChannelTrace(std::move(out));
}

ChannelTrace constant_trace(double duration_s, double capacity_bps, double loss_prob, double step_s) {
  if (!(duration_s > 0) || !(step_s > 0)) throw ValidationError("duration and step must be > 0");
  std::vector<TraceSample> out;
  const auto n = static_cast<std::size_t>(std::llround(duration_s / step_s));
  for (std::size_t i = 0; i < std::max<std::size_t>(n, 1); ++i)
    out.push_back({static_cast<double>(i) * step_s, capacity_bps, loss_prob});
  return ChannelTrace(std::move(out));
}

std::string to_string(Transport t) { return t == Transport::ltl ? "ltl" : "udp"; }

Transport transport_from_string(const std::string& s) {
  if (s == "ltl") return Transport::ltl;
  if (s == "udp") return Transport::udp;
  throw ValidationError("unknown transport '" + s + "'");
}

void validate(const SessionParams& p) {
  if (!(p.fps > 0) || !(p.bitrate_bps > 0)) throw ValidationError("fps and bitrate must be > 0");
  if (p.symbol_size == 0) throw ValidationError("symbol size must be > 0");
  if (p.overhead < 0) throw ValidationError("overhead must be >= 0");
  if (!(p.latency_budget_ms > 0)) throw ValidationError("latency budget must be > 0");
  if (p.display_fraction <= 0 || p.display_fraction > 1) throw ValidationError("display fraction must be in (0, 1]");
}

namespace {

std::vector<std::uint8_t> frame_bytes(std::uint64_t seed, std::uint32_t frame, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  std::uint64_t state = hash_words(seed, frame, 0xf4a3e);
  for (std::size_t i = 0; i < n; i += 8) {
    std::uint64_t w = splitmix64(state);
    for (std::size_t j = 0; j < 8 && i + j < n; ++j) out[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
  }
  return out;
}

double symbol_uniform(std::uint64_t seed, std::uint32_t frame, std::uint32_t symbol) {
  return static_cast<double>(hash_words(seed, frame, symbol, 0x10551) >> 11) * 0x1.0p-53;
}

}  // namespace

QoEReport stream_session(const ChannelTrace& trace, const SessionParams& p, Transport transport,
                         std::uint64_t seed) {
  validate(p);
  const auto frame_size = static_cast<std::size_t>(std::llround(p.bitrate_bps / p.fps / 8.0));
  const int k = static_cast<int>((frame_size + p.symbol_size - 1) / p.symbol_size);
  if (k > fountain::kMaxSourceSymbols) throw ValidationError("frame needs more than 256 symbols");
  const int repair = transport == Transport::ltl ? static_cast<int>(std::ceil(p.overhead * k - 1e-9)) : 0;
  const auto n_frames = static_cast<std::uint32_t>(std::floor(trace.duration_s() * p.fps + 1e-9));
  const double sym_bits = static_cast<double>(p.symbol_size) * 8.0;
  const double budget_s = p.latency_budget_ms / 1e3;
  const double prop_s = p.propagation_ms / 1e3;
  const std::uint64_t code_seed = hash_words(seed, 0xc0de);
  const std::uint64_t loss_seed = hash_words(seed, 0x1055);

  QoEReport r;
  r.frames = n_frames;
  double link_free = 0.0;
  std::size_t intact = 0, displayed = 0;

  for (std::uint32_t f = 0; f < n_frames; ++f) {
    const double t_f = f / p.fps;
    const double deadline = t_f + budget_s;
    const auto data = frame_bytes(seed, f, frame_size);
    const auto block = fountain::SourceBlock::from_bytes(f, data, p.symbol_size);
    fountain::BlockDecoder dec(f, k, p.symbol_size);
    FrameOutcome o;
    o.frame = f;
    o.generated_s = t_f;
    int systematic = 0;
    double systematic_ready = -1.0;
    std::vector<std::uint8_t> assembled(block.payload.size(), 0);

    for (int s = 0; s < k + repair; ++s) {
      const double start = std::max(t_f, link_free);
      if (start > deadline) break;  // stale: the sender drops the rest of the frame
      const auto& ch = trace.at(start);
      if (!(ch.capacity_bps > 0)) {
        // No capacity: the link idles until the next trace sample.
        auto it = std::upper_bound(trace.samples().begin(), trace.samples().end(), start,
                                   [](double t, const TraceSample& x) { return t < x.t_s; });
        link_free = it == trace.samples().end() ? trace.duration_s() + budget_s + 1.0 : it->t_s;
        --s;
        continue;
      }
      link_free = start + sym_bits / ch.capacity_bps;
      const bool lost = symbol_uniform(loss_seed, f, static_cast<std::uint32_t>(s)) < ch.loss_prob;
      const double arrival = link_free + prop_s;
      if (lost || arrival > deadline) continue;
      ++o.received_symbols;
      if (transport == Transport::ltl && !dec.complete()) {
        const auto sym = fountain::encode_symbol(block, static_cast<std::uint32_t>(s), code_seed);
        if (dec.add(sym) && dec.complete()) o.ready_s = arrival;
      }
      if (s < k) {
        ++systematic;
        std::copy_n(block.payload.begin() + static_cast<std::ptrdiff_t>(s * p.symbol_size), p.symbol_size,
                    assembled.begin() + static_cast<std::ptrdiff_t>(s * p.symbol_size));
        if (systematic >= static_cast<int>(std::ceil(p.display_fraction * k - 1e-9)) && systematic_ready < 0)
          systematic_ready = arrival;
      }
    }

    if (transport == Transport::ltl && dec.complete()) {
      o.displayed = true;
      o.intact = dec.payload() == block.payload;
    } else if (systematic_ready >= 0) {
      o.ready_s = systematic_ready;
      o.displayed = true;
      o.intact = assembled == block.payload;
    }
    if (o.displayed) ++displayed;
    if (o.intact) ++intact;
    r.outcomes.push_back(o);
  }

  const auto seconds = static_cast<std::size_t>(std::ceil(n_frames / p.fps - 1e-9));
  r.fps_series.assign(seconds, 0.0);
  for (const auto& o : r.outcomes)
    if (o.displayed) r.fps_series[std::min(seconds - 1, static_cast<std::size_t>(o.generated_s + 1e-9))] += 1.0;
  r.fps_cdf = r.fps_series;
  std::sort(r.fps_cdf.begin(), r.fps_cdf.end());
  if (!r.fps_cdf.empty()) {
    const std::size_t n = r.fps_cdf.size();
    r.median_fps = n % 2 ? r.fps_cdf[n / 2] : 0.5 * (r.fps_cdf[n / 2 - 1] + r.fps_cdf[n / 2]);
  }
  if (n_frames > 0) {
    r.stall_ratio = static_cast<double>(n_frames - displayed) / n_frames;
    r.frame_intact_ratio = static_cast<double>(intact) / n_frames;
    r.delivered_bitrate_bps = static_cast<double>(displayed) * frame_size * 8.0 / (n_frames / p.fps);
  }
  return r;
}

std::string qoe_to_json(const QoEReport& r, Transport t) {
  nlohmann::ordered_json j;
  j["transport"] = to_string(t);
  j["frames"] = r.frames;
  j["median_fps"] = r.median_fps;
  j["stall_ratio"] = r.stall_ratio;
  j["frame_intact_ratio"] = r.frame_intact_ratio;
  j["delivered_bitrate_bps"] = r.delivered_bitrate_bps;
  j["fps_series"] = r.fps_series;
  return j.dump();
}

}  // namespace aralab::streaming
