#pragma once

#include <cstddef>

#include "spadsr/types.hpp"

namespace spadsr {

// Both metrics run over pixels valid in pred and gt. An empty intersection
// yields NaN.
[[nodiscard]] double rmse(const DepthMap& pred, const DepthMap& gt);

struct AdeResult {
  Grid<double> map;  // |pred - gt|, 0 outside the shared valid mask
  double mean = 0.0;
};
[[nodiscard]] AdeResult ade(const DepthMap& pred, const DepthMap& gt);

struct NoiseReport {
  double sbr = 0.0;                   // average over pixels with finite SBR
  double ppp = 0.0;                   // average over all pixels
  std::size_t infinite_sbr_pixels = 0;  // b = 0 pixels, excluded from `sbr`
  Grid<double> pixel_sbr;             // +inf where b = 0
  Grid<double> pixel_ppp;
};

// Per-pixel window sums of (h - b) over [max(1, d-1), min(T, d+1)]:
// ppp = sum, SBR = sum / (b * bins in window). A peak of 0 means "no signal"
// and yields ppp = SBR = 0.
[[nodiscard]] NoiseReport measure_noise(const HistogramCube& cube, const Grid<double>& background,
                                        const Grid<std::size_t>& peaks);

}  // namespace spadsr
