#include "spadsr/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace spadsr {
namespace {

std::size_t reflect_index(std::size_t i, std::size_t n) {
  // Mirror about the last sample: n-1, n-2, ... (period 2n-2).
  if (n == 1) return 0;
  const std::size_t period = 2 * n - 2;
  i %= period;
  return i < n ? i : period - i;
}

double keys_cubic(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

// Weights for one output sample of a 1-D reduction, clamped-edge indices.
struct Taps {
  std::vector<std::size_t> index;
  std::vector<double> weight;
};

std::vector<Taps> reduction_taps(std::size_t in_size, std::size_t factor) {
  const std::size_t out_size = in_size / factor;
  const double scale = static_cast<double>(factor);
  const double support = 2.0 * scale;
  std::vector<Taps> taps(out_size);
  for (std::size_t o = 0; o < out_size; ++o) {
    const double center = (static_cast<double>(o) + 0.5) * scale - 0.5;
    const auto first = static_cast<long>(std::floor(center - support));
    const auto last = static_cast<long>(std::ceil(center + support));
    double total = 0.0;
    for (long k = first; k <= last; ++k) {
      const double w = keys_cubic((static_cast<double>(k) - center) / scale);
      if (w == 0.0) continue;
      const long clamped = std::clamp<long>(k, 0, static_cast<long>(in_size) - 1);
      taps[o].index.push_back(static_cast<std::size_t>(clamped));
      taps[o].weight.push_back(w);
      total += w;
    }
    for (double& w : taps[o].weight) w /= total;
  }
  return taps;
}

}  // namespace

std::size_t round_up(std::size_t n, std::size_t multiple) { return (n + multiple - 1) / multiple * multiple; }

DepthMap upsample_nearest(const DepthMap& depth, std::size_t factor) {
  if (factor == 0) throw InvalidArgument("upsampling factor must be >= 1");
  DepthMap out(depth.height() * factor, depth.width() * factor);
  for (std::size_t i = 0; i < out.height(); ++i) {
    for (std::size_t j = 0; j < out.width(); ++j) {
      out.values(i, j) = depth.values(i / factor, j / factor);
      out.valid(i, j) = depth.valid(i / factor, j / factor);
    }
  }
  return out;
}

DepthMap downsample_top_left(const DepthMap& depth, std::size_t factor) {
  if (factor == 0 || depth.height() % factor || depth.width() % factor)
    throw DimensionError("top-left downsampling needs dims divisible by the factor");
  DepthMap out(depth.height() / factor, depth.width() / factor);
  for (std::size_t i = 0; i < out.height(); ++i) {
    for (std::size_t j = 0; j < out.width(); ++j) {
      out.values(i, j) = depth.values(i * factor, j * factor);
      out.valid(i, j) = depth.valid(i * factor, j * factor);
    }
  }
  return out;
}

HistogramCube block_sum(const HistogramCube& cube, std::size_t factor) {
  if (factor == 0 || cube.height() % factor || cube.width() % factor)
    throw DimensionError("block sum needs spatial dims divisible by the factor");
  HistogramCube out(cube.height() / factor, cube.width() / factor, cube.bins(), cube.bin_width());
  for (std::size_t i = 0; i < cube.height(); ++i) {
    for (std::size_t j = 0; j < cube.width(); ++j) {
      auto src = cube.pixel(i, j);
      auto dst = out.pixel(i / factor, j / factor);
      for (std::size_t t = 0; t < cube.bins(); ++t) dst[t] += src[t];
    }
  }
  return out;
}

HistogramCube crop_bins(const HistogramCube& cube, std::size_t lo, std::size_t hi) {
  if (lo < 1 || hi > cube.bins() || lo > hi) throw InvalidArgument("crop range outside histogram");
  const std::size_t t = hi - lo + 1;
  HistogramCube out(cube.height(), cube.width(), t, cube.bin_width());
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    auto src = cube.pixel(p);
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(lo - 1), src.begin() + static_cast<std::ptrdiff_t>(hi),
              out.pixel(p / cube.width(), p % cube.width()).begin());
  }
  return out;
}

Grid<double> pad_reflect(const Grid<double>& g, std::size_t multiple) {
  const std::size_t h = round_up(g.height, multiple);
  const std::size_t w = round_up(g.width, multiple);
  Grid<double> out(h, w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) out(i, j) = g(reflect_index(i, g.height), reflect_index(j, g.width));
  return out;
}

DepthMap pad_reflect(const DepthMap& d, std::size_t multiple) {
  DepthMap out;
  out.values = pad_reflect(d.values, multiple);
  out.valid = Grid<std::uint8_t>(out.values.height, out.values.width);
  for (std::size_t i = 0; i < out.height(); ++i)
    for (std::size_t j = 0; j < out.width(); ++j)
      out.valid(i, j) = d.valid(reflect_index(i, d.height()), reflect_index(j, d.width()));
  return out;
}

IntensityMap pad_reflect(const IntensityMap& m, std::size_t multiple) {
  IntensityMap out;
  out.values = pad_reflect(m.values, multiple);
  return out;
}

HistogramCube pad_reflect(const HistogramCube& c, std::size_t multiple) {
  const std::size_t h = round_up(c.height(), multiple);
  const std::size_t w = round_up(c.width(), multiple);
  HistogramCube out(h, w, c.bins(), c.bin_width());
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      auto src = c.pixel(reflect_index(i, c.height()), reflect_index(j, c.width()));
      std::copy(src.begin(), src.end(), out.pixel(i, j).begin());
    }
  }
  return out;
}

DepthMap crop_top_left(const DepthMap& d, std::size_t h, std::size_t w) {
  if (h > d.height() || w > d.width()) throw DimensionError("crop larger than source");
  DepthMap out(h, w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      out.values(i, j) = d.values(i, j);
      out.valid(i, j) = d.valid(i, j);
    }
  }
  return out;
}

Grid<double> downsample_bicubic(const Grid<double>& g, std::size_t factor) {
  if (factor == 0 || g.height % factor || g.width % factor)
    throw DimensionError("bicubic reduction needs dims divisible by the factor");
  if (factor == 1) return g;
  const auto rows = reduction_taps(g.height, factor);
  const auto cols = reduction_taps(g.width, factor);
  Grid<double> tmp(g.height, cols.size());
  for (std::size_t i = 0; i < g.height; ++i) {
    for (std::size_t o = 0; o < cols.size(); ++o) {
      double s = 0.0;
      for (std::size_t k = 0; k < cols[o].index.size(); ++k) s += cols[o].weight[k] * g(i, cols[o].index[k]);
      tmp(i, o) = s;
    }
  }
  Grid<double> out(rows.size(), cols.size());
  for (std::size_t o = 0; o < rows.size(); ++o) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < rows[o].index.size(); ++k) s += rows[o].weight[k] * tmp(rows[o].index[k], j);
      out(o, j) = s;
    }
  }
  return out;
}

}  // namespace spadsr
