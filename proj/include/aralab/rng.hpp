#pragma once

#include <cstdint>

namespace aralab {

/// Counter-free splitmix64 step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Stateless 64-bit mix of several words (order sensitive).
std::uint64_t hash_words(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0,
                         std::uint64_t d = 0);

/// Deterministic random stream identified by (seed, stream id).
///
/// Draw sequences depend only on the pair, never on the standard library's
/// distribution implementations, so results files are reproducible across
/// toolchains.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  double exponential(double mean);
  bool bernoulli(double p) { return uniform() < p; }

  /// Child stream with the same seed and a derived id.
  RngStream fork(std::uint64_t sub_id) const;

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace aralab
