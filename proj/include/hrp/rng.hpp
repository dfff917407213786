#pragma once

#include <cstdint>

namespace hrp {

// Deterministic substream RNG. The generator is pinned to a fixed, documented
// algorithm (xoshiro256++ seeded through SplitMix64, Gaussians via the
// Marsaglia polar method) so that identical (seed, stream_id) reproduce
// identical sequences on every platform, independent of the standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double uniform01();

  // Standard normal. Polar rejection; pairs are cached, draw order is fixed.
  double gaussian();

  // Uniform index in [0, n). n must be > 0. Uses rejection to avoid modulo
  // bias so the draw count stays reproducible per accepted value.
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hrp
