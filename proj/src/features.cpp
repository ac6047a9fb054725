#include "spadsr/features.hpp"

#include <algorithm>
#include <cmath>

#include "spadsr/image_ops.hpp"

namespace spadsr {

PipelineConfig PipelineConfig::for_factor(std::size_t factor) {
  PipelineConfig cfg;
  cfg.upsample_factor = factor;
  if (factor == 8) {
    cfg.peak_method = PeakMethod::matched_filter;
    cfg.second_depth_enabled = false;
    cfg.crop_enabled = true;
  }
  return cfg;
}

void PipelineConfig::validate() const {
  if (upsample_factor != 4 && upsample_factor != 8) throw InvalidArgument("upsample factor must be 4 or 8");
  if (!(level > 0.0)) throw InvalidArgument("level must be > 0");
  if (median_window % 2 == 0) throw InvalidArgument("median window must be odd");
  if (!(irf_sigma > 0.0)) throw InvalidArgument("irf sigma must be > 0");
}

double lower_median(std::span<const std::uint32_t> h) {
  if (h.empty()) return 0.0;
  std::vector<std::uint32_t> v(h.begin(), h.end());
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

std::optional<double> center_of_mass(std::span<const std::uint32_t> h, double b, std::size_t d_max) {
  const std::size_t T = h.size();
  const std::size_t lo = d_max > 1 ? d_max - 1 : 1;
  const std::size_t hi = std::min(T, d_max + 1);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = lo; t <= hi; ++t) {
    const double s = std::max(0.0, static_cast<double>(h[t - 1]) - b);
    num += static_cast<double>(t) * s;
    den += s;
  }
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

std::vector<double> matched_filter_kernel(double sigma) {
  const auto half = std::max<long>(1, static_cast<long>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  double total = 0.0;
  for (long o = -half; o <= half; ++o) {
    const double x = static_cast<double>(o) / sigma;
    k[static_cast<std::size_t>(o + half)] = std::exp(-0.5 * x * x);
    total += k[static_cast<std::size_t>(o + half)];
  }
  for (double& v : k) v /= total;
  return k;
}

namespace {

std::size_t argmax_bin(std::span<const std::uint32_t> h) {
  return static_cast<std::size_t>(std::max_element(h.begin(), h.end()) - h.begin()) + 1;
}

std::size_t matched_filter_bin(std::span<const std::uint32_t> h, const std::vector<double>& kernel) {
  const auto half = static_cast<long>(kernel.size() / 2);
  const auto T = static_cast<long>(h.size());
  double best = -1.0;
  long best_t = 0;
  for (long t = 0; t < T; ++t) {
    double score = 0.0;
    for (long o = -half; o <= half; ++o) {
      const long u = t + o;
      if (u < 0 || u >= T) continue;
      score += kernel[static_cast<std::size_t>(o + half)] * h[static_cast<std::size_t>(u)];
    }
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  return static_cast<std::size_t>(best_t) + 1;
}

}  // namespace

PeakEstimate find_peak(std::span<const std::uint32_t> h, PeakMethod method, double sigma) {
  if (h.empty()) throw InvalidArgument("empty histogram");
  if (method == PeakMethod::argmax) return {argmax_bin(h), method};
  if (!(sigma > 0.0)) throw InvalidArgument("matched filter needs sigma > 0");
  return {matched_filter_bin(h, matched_filter_kernel(sigma)), method};
}

std::optional<std::size_t> second_peak(std::span<const std::uint32_t> h, double b, std::size_t first_peak,
                                       double level) {
  std::optional<std::size_t> best;
  std::uint32_t best_count = 0;
  for (std::size_t t = 1; t <= h.size(); ++t) {
    if (t + 1 >= first_peak && t <= first_peak + 1) continue;  // |t - first_peak| <= 1
    if (!best || h[t - 1] > best_count) {
      best = t;
      best_count = h[t - 1];
    }
  }
  if (!best) return std::nullopt;
  if (!(static_cast<double>(best_count) > b + level * std::sqrt(b))) return std::nullopt;
  return best;
}

Grid<double> estimate_background(const HistogramCube& cube) {
  Grid<double> b(cube.height(), cube.width());
  for (std::size_t p = 0; p < cube.pixels(); ++p) b.data[p] = lower_median(cube.pixel(p));
  return b;
}

Grid<std::size_t> find_peaks(const HistogramCube& cube, PeakMethod method, double sigma) {
  Grid<std::size_t> peaks(cube.height(), cube.width(), 1);
  if (method == PeakMethod::argmax) {
    for (std::size_t p = 0; p < cube.pixels(); ++p) peaks.data[p] = argmax_bin(cube.pixel(p));
    return peaks;
  }
  if (!(sigma > 0.0)) throw InvalidArgument("matched filter needs sigma > 0");
  const auto kernel = matched_filter_kernel(sigma);
  for (std::size_t p = 0; p < cube.pixels(); ++p) peaks.data[p] = matched_filter_bin(cube.pixel(p), kernel);
  return peaks;
}

DepthMap center_of_mass_depth(const HistogramCube& cube, const Grid<double>& background,
                              const Grid<std::size_t>& peaks, double divisor) {
  DepthMap d(cube.height(), cube.width());
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    const auto com = center_of_mass(cube.pixel(p), background.data[p], peaks.data[p]);
    if (com) {
      d.values.data[p] = *com / divisor;
    } else {
      d.values.data[p] = 0.0;
      d.valid.data[p] = 0;
    }
  }
  return d;
}

DepthMap second_depth(const HistogramCube& cube, const Grid<double>& background, const Grid<std::size_t>& first_peaks,
                      double level, double divisor) {
  DepthMap d(cube.height(), cube.width());
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    const auto h = cube.pixel(p);
    const auto peak = second_peak(h, background.data[p], first_peaks.data[p], level);
    const auto com = peak ? center_of_mass(h, background.data[p], *peak) : std::nullopt;
    if (com) {
      d.values.data[p] = *com / divisor;
    } else {
      d.values.data[p] = 0.0;
      d.valid.data[p] = 0;
    }
  }
  return d;
}

std::vector<std::uint8_t> median_filter_binary(const std::vector<std::uint8_t>& mask, std::size_t window) {
  const auto n = static_cast<long>(mask.size());
  const auto half = static_cast<long>(window / 2);
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (long t = 0; t < n; ++t) {
    std::size_t ones = 0;
    for (long o = -half; o <= half; ++o) {
      const long u = t + o;
      if (u >= 0 && u < n && mask[static_cast<std::size_t>(u)]) ++ones;
    }
    out[static_cast<std::size_t>(t)] = 2 * ones > window ? 1 : 0;
  }
  return out;
}

std::pair<std::size_t, std::size_t> temporal_crop(const HistogramCube& cube, double level, std::size_t median_window) {
  const std::size_t T = cube.bins();
  std::vector<std::uint64_t> aggregate(T, 0);
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    auto h = cube.pixel(p);
    for (std::size_t t = 0; t < T; ++t) aggregate[t] += h[t];
  }
  std::vector<std::uint64_t> sorted = aggregate;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>((T - 1) / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double b = static_cast<double>(*mid);
  const double threshold = b + level * std::sqrt(b);

  std::vector<std::uint8_t> mask(T);
  for (std::size_t t = 0; t < T; ++t) mask[t] = static_cast<double>(aggregate[t]) > threshold ? 1 : 0;
  const auto kept = median_filter_binary(mask, median_window);

  const auto first = std::find(kept.begin(), kept.end(), 1);
  if (first == kept.end()) return {1, T};
  const auto last = std::find(kept.rbegin(), kept.rend(), 1);
  return {static_cast<std::size_t>(first - kept.begin()) + 1, static_cast<std::size_t>(kept.rend() - last)};
}

DepthMap lr_depth(const HistogramCube& cube, PeakMethod method, double sigma) {
  const auto b = estimate_background(cube);
  const auto peaks = find_peaks(cube, method, sigma);
  return center_of_mass_depth(cube, b, peaks, static_cast<double>(cube.bins()));
}

namespace {

HistogramCube maybe_crop(const HistogramCube& cube, const PipelineConfig& cfg, std::pair<std::size_t, std::size_t>& range) {
  range = {1, cube.bins()};
  if (!cfg.crop_enabled) return cube;
  range = temporal_crop(cube, cfg.level, cfg.median_window);
  if (range.first == 1 && range.second == cube.bins()) return cube;
  return crop_bins(cube, range.first, range.second);
}

}  // namespace

DepthMap first_depth(const HistogramCube& cube, const PipelineConfig& cfg) {
  cfg.validate();
  std::pair<std::size_t, std::size_t> range;
  const HistogramCube work = maybe_crop(cube, cfg, range);
  return upsample_nearest(lr_depth(work, cfg.peak_method, cfg.irf_sigma), cfg.upsample_factor);
}

FeatureSet build_features(const Measurement& meas, const PipelineConfig& cfg) {
  if (meas.factor != cfg.upsample_factor) throw InvalidArgument("measurement factor differs from pipeline factor");
  return build_features(meas.histogram, meas.intensity, cfg);
}

FeatureSet build_features(const HistogramCube& cube, const IntensityMap& intensity, const PipelineConfig& cfg) {
  cfg.validate();
  const std::size_t s = cfg.upsample_factor;
  if (intensity.height() != cube.height() * s || intensity.width() != cube.width() * s)
    throw DimensionError("intensity must be the histogram size times the upsampling factor");
  const std::size_t lr_multiple = 16 / s;
  if (cube.height() % lr_multiple || cube.width() % lr_multiple)
    throw DimensionError("target size must be a multiple of 16 (use pad_for_features)");

  FeatureSet f;
  const HistogramCube work = maybe_crop(cube, cfg, f.crop_range);
  const double divisor = static_cast<double>(work.bins());

  const auto b = estimate_background(work);
  const auto peaks = find_peaks(work, cfg.peak_method, cfg.irf_sigma);
  const DepthMap lr_first = center_of_mass_depth(work, b, peaks, divisor);
  f.first_depth = upsample_nearest(lr_first, s);

  if (cfg.second_depth_enabled && s == 4) {
    f.second_depth = upsample_nearest(second_depth(work, b, peaks, cfg.level, divisor), s);
  } else {
    f.second_depth = DepthMap(f.first_depth.height(), f.first_depth.width());
    std::fill(f.second_depth.valid.data.begin(), f.second_depth.valid.data.end(), 0);
  }

  f.d1 = downsample_top_left(f.first_depth, 2);
  if (s == 4) {
    f.d2 = lr_first;
    f.d3 = lr_depth(block_sum(work, 2), cfg.peak_method, cfg.irf_sigma);
    f.d4 = lr_depth(block_sum(work, 4), cfg.peak_method, cfg.irf_sigma);
  } else {
    f.d2 = downsample_top_left(f.first_depth, 4);
    f.d3 = lr_first;
    f.d4 = lr_depth(block_sum(work, 2), cfg.peak_method, cfg.irf_sigma);
  }
  // lr_depth divides by the bin count of the (cropped) cube it sees, which is `divisor`.
  f.intensity = intensity;
  return f;
}

PaddedInput pad_for_features(const HistogramCube& cube, const IntensityMap& intensity, std::size_t factor) {
  if (factor != 4 && factor != 8) throw InvalidArgument("upsample factor must be 4 or 8");
  PaddedInput out;
  out.target_height = cube.height() * factor;
  out.target_width = cube.width() * factor;
  if (intensity.height() != out.target_height || intensity.width() != out.target_width)
    throw DimensionError("intensity must be the histogram size times the upsampling factor");
  out.cube = pad_reflect(cube, 16 / factor);
  out.intensity = pad_reflect(intensity, 16);
  return out;
}

}  // namespace spadsr
