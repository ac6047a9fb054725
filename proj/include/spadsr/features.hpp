#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spadsr/simulator.hpp"
#include "spadsr/types.hpp"

namespace spadsr {

enum class PeakMethod { argmax, matched_filter };

struct PeakEstimate {
  std::size_t d_max = 1;  // 1-based bin
  PeakMethod method = PeakMethod::argmax;
};

struct PipelineConfig {
  std::size_t upsample_factor = 4;
  double level = 12.0;
  bool second_depth_enabled = true;
  PeakMethod peak_method = PeakMethod::argmax;
  bool crop_enabled = false;
  std::size_t median_window = 3;
  double irf_sigma = 0.5714;

  // 4x: argmax peaks, second depth, no crop. 8x: matched filter, crop, no second depth.
  static PipelineConfig for_factor(std::size_t factor);
  void validate() const;
};

// ---- per-pixel estimators (bins are 1-based) --------------------------------

// Lower median: element (T-1)/2 of the sorted histogram.
[[nodiscard]] double lower_median(std::span<const std::uint32_t> h);

// Windowed centre of mass of max(0, h - b) over [max(1, d-1), min(T, d+1)],
// in bin units. Empty when the window holds no counts above background.
[[nodiscard]] std::optional<double> center_of_mass(std::span<const std::uint32_t> h, double b, std::size_t d_max);

// Unit-sum Gaussian taps over +-max(1, ceil(3 sigma)) bins.
[[nodiscard]] std::vector<double> matched_filter_kernel(double sigma);

// Lowest-index maximum of the raw counts or of the zero-padded correlation
// with matched_filter_kernel(sigma).
[[nodiscard]] PeakEstimate find_peak(std::span<const std::uint32_t> h, PeakMethod method, double sigma);

// Strongest bin outside the first peak's 3-bin window, if it exceeds b + level sqrt(b).
[[nodiscard]] std::optional<std::size_t> second_peak(std::span<const std::uint32_t> h, double b,
                                                     std::size_t first_peak, double level);

// ---- map-level operations ---------------------------------------------------

[[nodiscard]] Grid<double> estimate_background(const HistogramCube& cube);

[[nodiscard]] Grid<std::size_t> find_peaks(const HistogramCube& cube, PeakMethod method, double sigma);

// Centre of mass depth divided by `divisor` (the bin count). Zero-denominator
// pixels are 0 and invalid.
[[nodiscard]] DepthMap center_of_mass_depth(const HistogramCube& cube, const Grid<double>& background,
                                            const Grid<std::size_t>& peaks, double divisor);

[[nodiscard]] DepthMap second_depth(const HistogramCube& cube, const Grid<double>& background,
                                    const Grid<std::size_t>& first_peaks, double level, double divisor);

// Median filter of a 0/1 mask with zero padding: a sample survives when the
// window holds a strict majority of ones.
[[nodiscard]] std::vector<std::uint8_t> median_filter_binary(const std::vector<std::uint8_t>& mask,
                                                             std::size_t window);

// Bin range [lo, hi] (1-based) holding the aggregate signal; [1, T] if none.
[[nodiscard]] std::pair<std::size_t, std::size_t> temporal_crop(const HistogramCube& cube, double level,
                                                                std::size_t median_window);

// Background, peaks and normalized centre-of-mass depth in one go.
[[nodiscard]] DepthMap lr_depth(const HistogramCube& cube, PeakMethod method, double sigma);

// Nearest-neighbour upscaled first depth; works for any cube size.
[[nodiscard]] DepthMap first_depth(const HistogramCube& cube, const PipelineConfig& cfg);

[[nodiscard]] FeatureSet build_features(const Measurement& meas, const PipelineConfig& cfg);
[[nodiscard]] FeatureSet build_features(const HistogramCube& cube, const IntensityMap& intensity,
                                        const PipelineConfig& cfg);

// Reflect-pads cube and intensity so that the target size is a multiple of 16.
struct PaddedInput {
  HistogramCube cube;
  IntensityMap intensity;
  std::size_t target_height = 0, target_width = 0;  // before padding
};
[[nodiscard]] PaddedInput pad_for_features(const HistogramCube& cube, const IntensityMap& intensity,
                                           std::size_t factor);

}  // namespace spadsr
