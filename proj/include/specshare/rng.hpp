#pragma once

#include <cmath>
#include <cstdint>

namespace specshare {

// Counter-based random stream. The state is a pure function of
// (seed, stream_id, counter), so any draw can be reproduced without
// replaying the sequence and shards indexed by stream_id are
// independent of worker layout. Output mixing is the splitmix64
// finalizer; the counter gives a full 2^64 period per stream.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    base_ = mix(seed + kGamma * (stream_id + 1)) ^ mix(stream_id + kSalt);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return mix(base_ + kGamma * ++counter_); }

  // Derive an independent child stream; handy for per-shard substreams.
  RngStream substream(std::uint64_t id) const {
    return RngStream(seed_, mix(stream_id_ + kSalt) ^ mix(id + kGamma));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSalt = 0xD1B54A32D192ED03ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t base_ = 0;
  std::uint64_t counter_ = 0;
};

// Uniform draw on [0,1) with 53 mantissa bits.
inline double sample_uniform(RngStream& rng) {
  return static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller. Two uniforms are consumed per draw;
// the first is shifted into (0,1] so the log never sees zero.
inline double sample_std_normal(RngStream& rng) {
  const double u1 = static_cast<double>((rng.next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace specshare
