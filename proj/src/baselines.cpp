#include "spadsr/baselines.hpp"

#include <algorithm>
#include <vector>

namespace spadsr {

Grid<double> box_mean(const Grid<double>& image, std::size_t radius) {
  const std::size_t H = image.height;
  const std::size_t W = image.width;
  const std::size_t r = radius;
  const std::size_t PH = H + 2 * r;
  const std::size_t PW = W + 2 * r;

  // Prefix sums of the replicate-padded image, one extra leading row/column of zeros.
  std::vector<double> sat((PH + 1) * (PW + 1), 0.0);
  for (std::size_t pi = 0; pi < PH; ++pi) {
    const std::size_t si = std::min(H - 1, pi > r ? pi - r : 0);
    double row = 0.0;
    for (std::size_t pj = 0; pj < PW; ++pj) {
      const std::size_t sj = std::min(W - 1, pj > r ? pj - r : 0);
      row += image(si, sj);
      sat[(pi + 1) * (PW + 1) + pj + 1] = sat[pi * (PW + 1) + pj + 1] + row;
    }
  }

  const double inv = 1.0 / static_cast<double>((2 * r + 1) * (2 * r + 1));
  const std::size_t k = 2 * r + 1;
  Grid<double> out(H, W);
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      // Window in padded coordinates: rows [i, i+k), cols [j, j+k).
      const double s = sat[(i + k) * (PW + 1) + j + k] - sat[i * (PW + 1) + j + k] - sat[(i + k) * (PW + 1) + j] +
                       sat[i * (PW + 1) + j];
      out(i, j) = s * inv;
    }
  }
  return out;
}

DepthMap guided_filter(const DepthMap& input, const IntensityMap& guide, const GuidedFilterParams& params) {
  params.validate();
  if (!input.values.same_shape(guide.values)) throw DimensionError("guided filter input and guide differ in size");
  const auto& I = guide.values;
  const auto& p = input.values;
  const std::size_t n = p.size();

  Grid<double> Ip(p.height, p.width), II(p.height, p.width);
  for (std::size_t k = 0; k < n; ++k) {
    Ip.data[k] = I.data[k] * p.data[k];
    II.data[k] = I.data[k] * I.data[k];
  }
  const auto mean_I = box_mean(I, params.radius);
  const auto mean_p = box_mean(p, params.radius);
  const auto mean_Ip = box_mean(Ip, params.radius);
  const auto mean_II = box_mean(II, params.radius);

  Grid<double> a(p.height, p.width), b(p.height, p.width);
  for (std::size_t k = 0; k < n; ++k) {
    const double cov = mean_Ip.data[k] - mean_I.data[k] * mean_p.data[k];
    const double var = mean_II.data[k] - mean_I.data[k] * mean_I.data[k];
    const double den = var + params.eps;
    a.data[k] = den > 0.0 ? cov / den : 0.0;
    b.data[k] = mean_p.data[k] - a.data[k] * mean_I.data[k];
  }
  const auto mean_a = box_mean(a, params.radius);
  const auto mean_b = box_mean(b, params.radius);

  DepthMap out = input;
  for (std::size_t k = 0; k < n; ++k) out.values.data[k] = mean_a.data[k] * I.data[k] + mean_b.data[k];
  return out;
}

}  // namespace spadsr
