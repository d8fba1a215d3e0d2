#include <cmath>
#include <limits>

#include "aralab/error.hpp"
#include "aralab/fsoc.hpp"

namespace aralab::fsoc {

namespace {

constexpr std::size_t kFieldBits = 16;

void push_word(std::vector<std::uint8_t>& bits, std::uint16_t w) {
  for (int i = 15; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((w >> i) & 1u));
}

std::uint16_t read_word(const std::vector<std::uint8_t>& bits, std::size_t at) {
  std::uint16_t w = 0;
  for (std::size_t i = 0; i < kFieldBits; ++i) w = static_cast<std::uint16_t>((w << 1) | bits[at + i]);
  return w;
}

}  // namespace

std::vector<std::uint8_t> beacon_preamble() {
  // Balanced pseudo-random pattern: a fixed LFSR sequence with its
  // complement appended, so the all-zero channel correlates to exactly 0.
  std::vector<std::uint8_t> p;
  std::uint16_t lfsr = 0xACE1u;
  for (std::size_t i = 0; i < kBeaconPreambleBits / 2; ++i) {
    const std::uint16_t bit = ((lfsr >> 0) ^ (lfsr >> 2) ^ (lfsr >> 3) ^ (lfsr >> 5)) & 1u;
    lfsr = static_cast<std::uint16_t>((lfsr >> 1) | (bit << 15));
    p.push_back(static_cast<std::uint8_t>(lfsr & 1u));
  }
  for (std::size_t i = 0; i < kBeaconPreambleBits / 2; ++i) p.push_back(static_cast<std::uint8_t>(1 - p[i]));
  return p;
}

std::vector<std::uint8_t> beacon_frame_bits(const BeaconFrame& frame) {
  if (frame.payload.empty()) throw ValidationError("beacon payload must be non-empty");
  if (frame.payload.size() > 0xFFFF) throw ValidationError("beacon payload too long");
  std::vector<std::uint8_t> bits = beacon_preamble();
  const auto centi = static_cast<std::int16_t>(std::lround(frame.rx_power_report_dbm * 100.0));
  push_word(bits, static_cast<std::uint16_t>(centi));
  push_word(bits, static_cast<std::uint16_t>(frame.payload.size()));
  for (auto b : frame.payload) {
    if (b > 1) throw ValidationError("beacon payload must contain bits");
    bits.push_back(b);
  }
  return bits;
}

std::optional<BeaconDecode> beacon_receive(const std::vector<double>& samples, double amplitude) {
  if (!(amplitude > 0)) throw ValidationError("amplitude must be > 0");
  const auto pre = beacon_preamble();
  const double half = 0.5 * amplitude;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_at = 0;
  for (std::size_t off = 0; off <= kBeaconIdleBits && off + pre.size() <= samples.size(); ++off) {
    double c = 0.0;
    for (std::size_t i = 0; i < pre.size(); ++i) c += (pre[i] ? 1.0 : -1.0) * (samples[off + i] - half);
    c /= half * static_cast<double>(pre.size());
    if (c > best) {
      best = c;
      best_at = off;
    }
  }
  if (!(best >= 0.5)) return std::nullopt;
  const std::size_t head = best_at + pre.size();
  if (head + 2 * kFieldBits > samples.size()) return std::nullopt;
  std::vector<std::uint8_t> bits(samples.size() - head);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = samples[head + i] > half ? 1 : 0;
  BeaconDecode d;
  d.offset = best_at;
  d.frame.rx_power_report_dbm = static_cast<std::int16_t>(read_word(bits, 0)) / 100.0;
  std::size_t len = read_word(bits, kFieldBits);
  // A corrupted length field cannot read past the captured samples.
  len = std::min(len, bits.size() - 2 * kFieldBits);
  d.frame.payload.assign(bits.begin() + 2 * kFieldBits, bits.begin() + 2 * kFieldBits + len);
  d.raw_bits = std::move(bits);
  return d;
}

double ook_ber(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  const double snr = std::pow(10.0, snr_db / 10.0);
  return 0.5 * std::erfc(std::sqrt(snr) / 2.0 / std::sqrt(2.0));
}

BeaconResult beacon_roundtrip(const std::vector<std::uint8_t>& payload, double snr_db, RngStream& rng,
                              double rate_bps, double rx_power_report_dbm) {
  if (!(rate_bps > 0)) throw ValidationError("beacon rate must be > 0");
  const auto bits = beacon_frame_bits({rx_power_report_dbm, payload});
  const double amplitude = 1.0;
  const bool noiseless = std::isinf(snr_db) && snr_db > 0;
  const double sigma = noiseless ? 0.0 : amplitude / std::sqrt(std::pow(10.0, snr_db / 10.0));
  // Unknown idle gap before the frame; the receiver must find the preamble.
  const std::size_t gap = rng.below(kBeaconIdleBits + 1);
  std::vector<double> samples;
  samples.reserve(gap + bits.size());
  for (std::size_t i = 0; i < gap; ++i) samples.push_back(sigma * rng.normal());
  for (auto b : bits) samples.push_back(amplitude * b + sigma * rng.normal());

  BeaconResult r;
  r.bits = bits.size() - kBeaconPreambleBits;
  auto d = beacon_receive(samples, amplitude);
  if (!d) {
    r.frame_lost = true;
    return r;
  }
  r.decoded = d->frame.payload;
  r.rx_power_report_dbm = d->frame.rx_power_report_dbm;
  for (std::size_t i = 0; i < r.bits; ++i) {
    const std::size_t at = kBeaconPreambleBits + i;
    if (i >= d->raw_bits.size() || d->raw_bits[i] != bits[at]) ++r.bit_errors;
  }
  r.ber = static_cast<double>(r.bit_errors) / static_cast<double>(r.bits);
  return r;
}

}  // namespace aralab::fsoc
