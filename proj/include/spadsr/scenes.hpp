#pragma once

#include <cstddef>
#include <cstdint>

#include "spadsr/simulator.hpp"

namespace spadsr {

// Synthetic piecewise-planar scene: a slanted back plane plus a handful of
// occluding rectangles and ellipses, each with its own albedo and texture.
// Depth stays inside [0.2, 0.8] so IRF tails do not leave the range window.
[[nodiscard]] ScenePair synthetic_scene(std::size_t height, std::size_t width, std::uint64_t seed);

// As above, with every depth value mapped into [lo, hi].
[[nodiscard]] ScenePair synthetic_scene(std::size_t height, std::size_t width, std::uint64_t seed, double lo,
                                        double hi);

}  // namespace spadsr
