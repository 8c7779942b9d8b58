#pragma once

#include <cstdint>
#include <cstddef>

namespace sae {

/// Deterministic random stream. The generator is xoshiro256** seeded through
/// splitmix64 from (seed, stream_id), so identical (seed, stream_id) pairs
/// reproduce bit-identical sequences on every platform. Distribution code
/// (uniform, normal, bounded integers) is implemented here rather than with
/// std::*_distribution, whose output is implementation-defined.
///
/// Streams are single-owner: never share one Rng across threads. Use
/// derive()/split() to hand independent child streams to workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (second deviate cached).
  double normal();

  /// Uniform integer in [0, n), unbiased (rejection on the top range).
  std::size_t uniform_index(std::size_t n);

  /// Child stream with a stream id mixed from (stream_id, child).
  /// Does not advance this generator.
  Rng derive(std::uint64_t child) const;

  /// Child stream keyed off the current position; advances this generator,
  /// so consecutive split() calls give independent streams.
  Rng split();

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t state_[4] = {0, 0, 0, 0};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sae
