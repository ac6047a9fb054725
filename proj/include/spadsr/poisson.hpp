#pragma once

#include <cstdint>

namespace spadsr {

// SplitMix64 stream keyed by (seed, stream id). Each (pixel, bin) gets its own
// stream, so draws do not depend on generation order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();

 private:
  std::uint64_t state_;
};

[[nodiscard]] std::uint64_t mix64(std::uint64_t z);

// Poisson(mean) draw: inversion below mean 10, PTRS transformed rejection
// (Hormann 1993) above. mean <= 0 yields 0.
[[nodiscard]] std::uint32_t sample_poisson(double mean, CounterRng& rng);

}  // namespace spadsr
