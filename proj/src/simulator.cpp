#include "spadsr/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "spadsr/image_ops.hpp"
#include "spadsr/poisson.hpp"

namespace spadsr {
namespace {

constexpr double kWindowBins = 3.0;

void check_scene(const ScenePair& scene) {
  if (!scene.depth_gt.values.same_shape(scene.intensity_gt.values))
    throw DimensionError("depth and intensity ground truth differ in size");
}

void check_args(const ScenePair& scene, std::size_t bins, const NoiseSpec& spec, std::size_t factor) {
  check_scene(scene);
  spec.validate();
  if (bins < 3) throw InvalidArgument("at least 3 time bins are required");
  if (factor == 0) throw InvalidArgument("spatial factor must be >= 1");
  if (scene.depth_gt.height() % factor || scene.depth_gt.width() % factor)
    throw DimensionError("scene dims must be divisible by the spatial factor (pad-reflect first)");
}

// Accumulates r * g(t - d T) of one ground-truth pixel into `dst`.
void add_signal(double depth, double reflectivity, double sigma, std::size_t bins, double* dst) {
  if (reflectivity <= 0.0) return;
  const auto w = irf_weights(depth * static_cast<double>(bins), sigma, bins);
  for (std::size_t t = 0; t < bins; ++t) dst[t] += reflectivity * w[t];
}

// LR expected signal at unit scale for the given (possibly reduced) ground truth.
std::vector<double> unit_signal(const Grid<double>& depth, const Grid<double>& refl, std::size_t bins,
                                double sigma, std::size_t block) {
  const std::size_t h = depth.height / block;
  const std::size_t w = depth.width / block;
  std::vector<double> sig(h * w * bins, 0.0);
  for (std::size_t i = 0; i < depth.height; ++i)
    for (std::size_t j = 0; j < depth.width; ++j)
      add_signal(std::clamp(depth(i, j), 0.0, 1.0), refl(i, j), sigma, bins,
                 sig.data() + ((i / block) * w + j / block) * bins);
  return sig;
}

void calibrate(ExpectedMeasurement& em, const std::vector<double>& unit, const NoiseSpec& spec) {
  const std::size_t n = em.height * em.width;
  const std::size_t T = em.bins;
  em.peaks.assign(n, 0);
  double window_total = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double* s = unit.data() + p * T;
    const auto it = std::max_element(s, s + T);  // first maximum
    if (*it <= 0.0) continue;
    const std::size_t peak = static_cast<std::size_t>(it - s) + 1;
    em.peaks[p] = peak;
    const std::size_t lo = std::max<std::size_t>(1, peak - 1);
    const std::size_t hi = std::min(T, peak + 1);
    for (std::size_t t = lo; t <= hi; ++t) window_total += s[t - 1];
  }
  const double mean_window = window_total / static_cast<double>(n);
  em.signal_scale = mean_window > 0.0 ? spec.ppp / mean_window : 0.0;
  em.background = spec.ppp / (spec.sbr * kWindowBins);
  em.signal.resize(unit.size());
  for (std::size_t k = 0; k < unit.size(); ++k) em.signal[k] = em.signal_scale * unit[k];
}

Grid<double> clamp_grid(Grid<double> g, double lo, double hi) {
  for (double& v : g.data) v = std::clamp(v, lo, hi);
  return g;
}

}  // namespace

std::vector<double> irf_weights(double center, double sigma, std::size_t bins) {
  const double reach = std::ceil(4.0 * sigma);
  const auto first = static_cast<long>(std::ceil(center - reach));
  const auto last = static_cast<long>(std::floor(center + reach));
  std::vector<double> w(bins, 0.0);
  double total = 0.0;
  for (long t = first; t <= last; ++t) {
    const double x = (static_cast<double>(t) - center) / sigma;
    const double g = std::exp(-0.5 * x * x);
    total += g;
    if (t >= 1 && t <= static_cast<long>(bins)) w[static_cast<std::size_t>(t - 1)] = g;
  }
  if (total > 0.0)
    for (double& v : w) v /= total;
  return w;
}

ExpectedMeasurement expected_measurement(const ScenePair& scene, std::size_t bins, const NoiseSpec& spec,
                                         std::size_t factor, SimulationMode mode) {
  check_args(scene, bins, spec, factor);
  ExpectedMeasurement em;
  em.height = scene.depth_gt.height() / factor;
  em.width = scene.depth_gt.width() / factor;
  em.bins = bins;
  if (mode == SimulationMode::block_sum) {
    calibrate(em, unit_signal(scene.depth_gt.values, scene.intensity_gt.values, bins, spec.sigma_bins, factor), spec);
  } else {
    const auto depth = clamp_grid(downsample_bicubic(scene.depth_gt.values, factor), 0.0, 1.0);
    const auto refl = clamp_grid(downsample_bicubic(scene.intensity_gt.values, factor), 0.0, 1.0);
    calibrate(em, unit_signal(depth, refl, bins, spec.sigma_bins, 1), spec);
  }
  return em;
}

HistogramCube simulate_hr_cube(const ScenePair& scene, std::size_t bins, const NoiseSpec& spec, std::size_t factor) {
  const ExpectedMeasurement em = expected_measurement(scene, bins, spec, factor, SimulationMode::block_sum);
  const std::size_t H = scene.depth_gt.height();
  const std::size_t W = scene.depth_gt.width();
  const double bg = em.background / static_cast<double>(factor * factor);
  HistogramCube cube(H, W, bins);
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      std::vector<double> mean(bins, 0.0);
      add_signal(std::clamp(scene.depth_gt.values(i, j), 0.0, 1.0), scene.intensity_gt.values(i, j),
                 spec.sigma_bins, bins, mean.data());
      auto out = cube.pixel(i, j);
      for (std::size_t t = 0; t < bins; ++t) {
        CounterRng rng(spec.seed, (i * W + j) * bins + t);
        out[t] = sample_poisson(em.signal_scale * mean[t] + bg, rng);
      }
    }
  }
  return cube;
}

Measurement simulate(const ScenePair& scene, std::size_t bins, const NoiseSpec& spec, std::size_t factor,
                     SimulationMode mode) {
  Measurement m;
  m.factor = factor;
  m.intensity = scene.intensity_gt;
  for (double& v : m.intensity.values.data) v = std::clamp(v, 0.0, 1.0);

  const ExpectedMeasurement em = expected_measurement(scene, bins, spec, factor, mode);
  m.true_background.assign(em.height * em.width, em.background);
  m.true_peaks = em.peaks;
  m.signal_scale = em.signal_scale;

  if (mode == SimulationMode::block_sum) {
    m.histogram = block_sum(simulate_hr_cube(scene, bins, spec, factor), factor);
    return m;
  }
  HistogramCube cube(em.height, em.width, bins);
  for (std::size_t p = 0; p < em.height * em.width; ++p) {
    auto out = cube.pixel(p / em.width, p % em.width);
    for (std::size_t t = 0; t < bins; ++t) {
      CounterRng rng(spec.seed, p * bins + t);
      out[t] = sample_poisson(em.mean(p, t), rng);
    }
  }
  m.histogram = std::move(cube);
  return m;
}

std::vector<ScenePair> make_patches(const ScenePair& scene, std::size_t size, std::size_t stride) {
  check_scene(scene);
  const std::size_t H = scene.depth_gt.height();
  const std::size_t W = scene.depth_gt.width();
  if (size == 0 || stride == 0) throw InvalidArgument("patch size and stride must be positive");
  if (size > H || size > W) throw DimensionError("patch size exceeds image dims");
  std::vector<ScenePair> patches;
  for (std::size_t i0 = 0; i0 + size <= H; i0 += stride) {
    for (std::size_t j0 = 0; j0 + size <= W; j0 += stride) {
      ScenePair p{DepthMap(size, size), IntensityMap(size, size)};
      for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
          p.depth_gt.values(i, j) = scene.depth_gt.values(i0 + i, j0 + j);
          p.depth_gt.valid(i, j) = scene.depth_gt.valid(i0 + i, j0 + j);
          p.intensity_gt.values(i, j) = scene.intensity_gt.values(i0 + i, j0 + j);
        }
      }
      patches.push_back(std::move(p));
    }
  }
  return patches;
}

template <typename T>
Grid<T> rotate90(const Grid<T>& g, int k) {
  k = ((k % 4) + 4) % 4;
  if (k == 0) return g;
  Grid<T> out(g.width, g.height);
  // One counter-clockwise quarter turn: out(W-1-j, i) = g(i, j).
  for (std::size_t i = 0; i < g.height; ++i)
    for (std::size_t j = 0; j < g.width; ++j) out(g.width - 1 - j, i) = g(i, j);
  return rotate90(out, k - 1);
}

template <typename T>
Grid<T> flip_horizontal(const Grid<T>& g) {
  Grid<T> out(g.height, g.width);
  for (std::size_t i = 0; i < g.height; ++i)
    for (std::size_t j = 0; j < g.width; ++j) out(i, g.width - 1 - j) = g(i, j);
  return out;
}

template Grid<double> rotate90(const Grid<double>&, int);
template Grid<std::uint8_t> rotate90(const Grid<std::uint8_t>&, int);
template Grid<double> flip_horizontal(const Grid<double>&);
template Grid<std::uint8_t> flip_horizontal(const Grid<std::uint8_t>&);

std::vector<ScenePair> augment(const ScenePair& scene) {
  check_scene(scene);
  std::vector<ScenePair> out;
  out.reserve(8);
  for (int flip = 0; flip < 2; ++flip) {
    for (int k = 0; k < 4; ++k) {
      ScenePair s;
      auto d = flip ? flip_horizontal(scene.depth_gt.values) : scene.depth_gt.values;
      auto v = flip ? flip_horizontal(scene.depth_gt.valid) : scene.depth_gt.valid;
      auto r = flip ? flip_horizontal(scene.intensity_gt.values) : scene.intensity_gt.values;
      s.depth_gt.values = rotate90(d, k);
      s.depth_gt.valid = rotate90(v, k);
      s.intensity_gt.values = rotate90(r, k);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace spadsr
