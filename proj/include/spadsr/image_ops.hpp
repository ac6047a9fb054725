#pragma once

#include <cstddef>

#include "spadsr/types.hpp"

namespace spadsr {

// Each input pixel replicated factor x factor (values and mask).
[[nodiscard]] DepthMap upsample_nearest(const DepthMap& depth, std::size_t factor);

// Keep the top-left pixel of every factor x factor block.
[[nodiscard]] DepthMap downsample_top_left(const DepthMap& depth, std::size_t factor);

// Spatially sum factor x factor pixel blocks of a cube. Dims must divide.
[[nodiscard]] HistogramCube block_sum(const HistogramCube& cube, std::size_t factor);

// Keep bins [lo, hi] (1-based, inclusive).
[[nodiscard]] HistogramCube crop_bins(const HistogramCube& cube, std::size_t lo, std::size_t hi);

// Symmetric (edge-excluded) reflection padding on the bottom/right so that
// both dims become multiples of `multiple`.
[[nodiscard]] Grid<double> pad_reflect(const Grid<double>& g, std::size_t multiple);
[[nodiscard]] DepthMap pad_reflect(const DepthMap& d, std::size_t multiple);
[[nodiscard]] IntensityMap pad_reflect(const IntensityMap& m, std::size_t multiple);
[[nodiscard]] HistogramCube pad_reflect(const HistogramCube& c, std::size_t multiple);

[[nodiscard]] DepthMap crop_top_left(const DepthMap& d, std::size_t h, std::size_t w);

// Antialiased bicubic reduction by an integer factor (Keys kernel, a = -0.5,
// stretched by the factor).
[[nodiscard]] Grid<double> downsample_bicubic(const Grid<double>& g, std::size_t factor);

[[nodiscard]] std::size_t round_up(std::size_t n, std::size_t multiple);

}  // namespace spadsr
