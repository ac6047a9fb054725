#include "spadsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spadsr {
namespace {

void check_same(const DepthMap& a, const DepthMap& b) {
  if (!a.values.same_shape(b.values)) throw DimensionError("metric inputs differ in size");
}

}  // namespace

double rmse(const DepthMap& pred, const DepthMap& gt) {
  check_same(pred, gt);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < pred.values.size(); ++k) {
    if (!pred.valid.data[k] || !gt.valid.data[k]) continue;
    const double e = pred.values.data[k] - gt.values.data[k];
    acc += e * e;
    ++n;
  }
  return n ? std::sqrt(acc / static_cast<double>(n)) : std::numeric_limits<double>::quiet_NaN();
}

AdeResult ade(const DepthMap& pred, const DepthMap& gt) {
  check_same(pred, gt);
  AdeResult r{Grid<double>(pred.height(), pred.width(), 0.0), 0.0};
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < pred.values.size(); ++k) {
    if (!pred.valid.data[k] || !gt.valid.data[k]) continue;
    r.map.data[k] = std::abs(pred.values.data[k] - gt.values.data[k]);
    acc += r.map.data[k];
    ++n;
  }
  r.mean = n ? acc / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

NoiseReport measure_noise(const HistogramCube& cube, const Grid<double>& background, const Grid<std::size_t>& peaks) {
  if (background.height != cube.height() || background.width != cube.width() || peaks.height != cube.height() ||
      peaks.width != cube.width())
    throw DimensionError("background/peaks do not match the histogram");
  NoiseReport rep;
  rep.pixel_sbr = Grid<double>(cube.height(), cube.width());
  rep.pixel_ppp = Grid<double>(cube.height(), cube.width());
  const std::size_t T = cube.bins();
  double sbr_acc = 0.0, ppp_acc = 0.0;
  std::size_t sbr_n = 0;
  for (std::size_t p = 0; p < cube.pixels(); ++p) {
    const std::size_t d = peaks.data[p];
    const double b = background.data[p];
    double signal = 0.0;
    double width = 0.0;
    if (d >= 1) {
      const auto h = cube.pixel(p);
      const std::size_t lo = d > 1 ? d - 1 : 1;
      const std::size_t hi = std::min(T, d + 1);
      for (std::size_t t = lo; t <= hi; ++t) signal += static_cast<double>(h[t - 1]) - b;
      width = static_cast<double>(hi - lo + 1);
    }
    rep.pixel_ppp.data[p] = signal;
    ppp_acc += signal;
    if (d == 0) {
      rep.pixel_sbr.data[p] = 0.0;
    } else if (b <= 0.0) {
      rep.pixel_sbr.data[p] = std::numeric_limits<double>::infinity();
      ++rep.infinite_sbr_pixels;
      continue;
    } else {
      rep.pixel_sbr.data[p] = signal / (b * width);
    }
    sbr_acc += rep.pixel_sbr.data[p];
    ++sbr_n;
  }
  rep.ppp = cube.pixels() ? ppp_acc / static_cast<double>(cube.pixels()) : 0.0;
  rep.sbr = sbr_n ? sbr_acc / static_cast<double>(sbr_n) : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace spadsr
