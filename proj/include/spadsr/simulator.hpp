#pragma once

#include <cstddef>
#include <vector>

#include "spadsr/types.hpp"

namespace spadsr {

struct ScenePair {
  DepthMap depth_gt;
  IntensityMap intensity_gt;
};

enum class SimulationMode {
  // Histograms simulated at full resolution, then summed over factor x factor blocks.
  block_sum,
  // Ground truth reduced by bicubic interpolation first, histograms simulated at LR.
  bicubic_lr,
};

// Noise-free LR histogram and the calibration that produced it.
struct ExpectedMeasurement {
  std::size_t height = 0, width = 0, bins = 0;
  std::vector<double> signal;      // [H, W, T] expected signal counts (already scaled by signal_scale)
  std::vector<std::size_t> peaks;  // 1-based true peak per LR pixel, 0 where there is no signal
  double signal_scale = 0.0;       // a
  double background = 0.0;         // b, per LR pixel and bin

  [[nodiscard]] double mean(std::size_t pixel, std::size_t t) const { return signal[pixel * bins + t] + background; }
};

struct Measurement {
  HistogramCube histogram;
  IntensityMap intensity;
  std::size_t factor = 4;
  std::vector<double> true_background;  // per LR pixel
  std::vector<std::size_t> true_peaks;  // per LR pixel, 1-based, 0 = no signal
  double signal_scale = 0.0;
};

// Unit-sum Gaussian sampled at integer bin centres within +-ceil(4 sigma) of
// `center`; entries for bins 1..T (index t-1). Mass outside [1, T] is dropped.
[[nodiscard]] std::vector<double> irf_weights(double center, double sigma, std::size_t bins);

[[nodiscard]] ExpectedMeasurement expected_measurement(const ScenePair& scene, std::size_t bins,
                                                       const NoiseSpec& spec, std::size_t factor,
                                                       SimulationMode mode = SimulationMode::block_sum);

// Poisson draw of the full-resolution cube (block_sum mode only).
[[nodiscard]] HistogramCube simulate_hr_cube(const ScenePair& scene, std::size_t bins, const NoiseSpec& spec,
                                             std::size_t factor);

[[nodiscard]] Measurement simulate(const ScenePair& scene, std::size_t bins, const NoiseSpec& spec,
                                   std::size_t factor, SimulationMode mode = SimulationMode::block_sum);

[[nodiscard]] std::vector<ScenePair> make_patches(const ScenePair& scene, std::size_t size = 96,
                                                  std::size_t stride = 48);

// The eight dihedral transforms: rotations by 0/90/180/270 degrees, each
// with and without a horizontal flip.
[[nodiscard]] std::vector<ScenePair> augment(const ScenePair& scene);

// k quarter turns counter-clockwise.
template <typename T>
[[nodiscard]] Grid<T> rotate90(const Grid<T>& g, int k);
template <typename T>
[[nodiscard]] Grid<T> flip_horizontal(const Grid<T>& g);

}  // namespace spadsr
