#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spadsr/error.hpp"

namespace spadsr {

// Row-major 2-D array.
template <typename T>
struct Grid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(std::size_t h, std::size_t w, T fill = T{}) : height(h), width(w), data(h * w, fill) {}

  [[nodiscard]] std::size_t size() const { return data.size(); }
  [[nodiscard]] bool same_shape(const Grid& o) const { return height == o.height && width == o.width; }

  T& operator()(std::size_t i, std::size_t j) {
    assert(i < height && j < width);
    return data[i * width + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    assert(i < height && j < width);
    return data[i * width + j];
  }

  bool operator==(const Grid&) const = default;
};

// Normalized depth in [0,1]. Invalid pixels hold 0.
struct DepthMap {
  Grid<double> values;
  Grid<std::uint8_t> valid;

  DepthMap() = default;
  DepthMap(std::size_t h, std::size_t w) : values(h, w, 0.0), valid(h, w, 1) {}

  [[nodiscard]] std::size_t height() const { return values.height; }
  [[nodiscard]] std::size_t width() const { return values.width; }

  void set_invalid(std::size_t i, std::size_t j) {
    values(i, j) = 0.0;
    valid(i, j) = 0;
  }
};

struct IntensityMap {
  Grid<double> values;

  IntensityMap() = default;
  IntensityMap(std::size_t h, std::size_t w) : values(h, w, 0.0) {}

  [[nodiscard]] std::size_t height() const { return values.height; }
  [[nodiscard]] std::size_t width() const { return values.width; }
};

// H x W x T photon counts, [i, j, t] row-major. Bin indices in the public
// estimator API are 1-based; storage is 0-based.
class HistogramCube {
 public:
  HistogramCube() = default;
  HistogramCube(std::size_t h, std::size_t w, std::size_t t, double bin_width = 0.0)
      : height_(h), width_(w), bins_(t), bin_width_(bin_width), counts_(h * w * t, 0) {}
  HistogramCube(std::size_t h, std::size_t w, std::size_t t, std::vector<std::uint32_t> counts,
                double bin_width = 0.0)
      : height_(h), width_(w), bins_(t), bin_width_(bin_width), counts_(std::move(counts)) {
    if (counts_.size() != h * w * t) throw DimensionError("histogram payload does not match dims");
  }

  [[nodiscard]] std::size_t height() const { return height_; }
  [[nodiscard]] std::size_t width() const { return width_; }
  [[nodiscard]] std::size_t bins() const { return bins_; }
  [[nodiscard]] std::size_t pixels() const { return height_ * width_; }
  [[nodiscard]] double bin_width() const { return bin_width_; }

  [[nodiscard]] std::span<const std::uint32_t> pixel(std::size_t i, std::size_t j) const {
    return {counts_.data() + (i * width_ + j) * bins_, bins_};
  }
  [[nodiscard]] std::span<std::uint32_t> pixel(std::size_t i, std::size_t j) {
    return {counts_.data() + (i * width_ + j) * bins_, bins_};
  }
  [[nodiscard]] std::span<const std::uint32_t> pixel(std::size_t p) const {
    return {counts_.data() + p * bins_, bins_};
  }

  std::uint32_t& at(std::size_t i, std::size_t j, std::size_t t) {
    return counts_[(i * width_ + j) * bins_ + t];
  }
  [[nodiscard]] std::uint32_t at(std::size_t i, std::size_t j, std::size_t t) const {
    return counts_[(i * width_ + j) * bins_ + t];
  }

  [[nodiscard]] const std::vector<std::uint32_t>& counts() const { return counts_; }
  [[nodiscard]] std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }

  bool operator==(const HistogramCube&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t bins_ = 0;
  double bin_width_ = 0.0;
  std::vector<std::uint32_t> counts_;
};

struct NoiseSpec {
  double ppp = 1200.0;
  double sbr = 2.0;
  double sigma_bins = 0.5714;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(ppp > 0.0)) throw InvalidArgument("ppp must be > 0");
    if (!(sbr > 0.0)) throw InvalidArgument("sbr must be > 0");
    if (!(sigma_bins > 0.0)) throw InvalidArgument("sigma_bins must be > 0");
  }
};

// Named noise scenarios.
struct NoisePreset {
  const char* name;
  double ppp;
  double sbr;
};
inline constexpr NoisePreset kPresetHigh{"high", 1200.0, 2.0};
inline constexpr NoisePreset kPresetMedium{"medium", 4.0, 0.02};
inline constexpr NoisePreset kPresetLow{"low", 4.0, 0.006};

// First/second depth at target resolution, multi-scale depths at R/2..R/16,
// and the guide intensity.
struct FeatureSet {
  DepthMap first_depth;
  DepthMap second_depth;
  DepthMap d1, d2, d3, d4;
  IntensityMap intensity;
  std::pair<std::size_t, std::size_t> crop_range{1, 1};  // 1-based inclusive

  [[nodiscard]] const DepthMap& scale(int k) const {
    switch (k) {
      case 1: return d1;
      case 2: return d2;
      case 3: return d3;
      default: return d4;
    }
  }
};

}  // namespace spadsr
