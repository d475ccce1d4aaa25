#pragma once

#include <array>
#include <cstdint>

namespace gnireg {

// Counter-based random source built on Philox-4x32-10.
//
// The output is a pure function of (seed, stream, counter), so draws are
// bit-reproducible and independent streams can be handed to workers with
// split() without any shared state.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t counter() const noexcept { return counter_; }

  // Child source whose stream id is derived from this stream and `index`.
  // Does not advance the parent.
  RandomSource split(std::uint64_t index) const noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  // +1 or -1 with equal probability.
  double rademacher() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }
  // Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  // Raw Philox block for (key, counter); exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gnireg
