#pragma once

#include <cstddef>

#include "spadsr/image_ops.hpp"
#include "spadsr/types.hpp"

namespace spadsr {

struct GuidedFilterParams {
  std::size_t radius = 8;
  double eps = 1e-4;

  void validate() const {
    if (radius < 1) throw InvalidArgument("guided filter radius must be >= 1");
    if (!(eps >= 0.0)) throw InvalidArgument("guided filter eps must be >= 0");
  }
};

// Mean over the (2r+1)^2 window with edge-replicated borders, via 2-D prefix
// sums (O(1) per pixel).
[[nodiscard]] Grid<double> box_mean(const Grid<double>& image, std::size_t radius);

// Local linear model q = mean(a) I + mean(b) with a = cov(I,p)/(var(I)+eps),
// b = mean(p) - a mean(I). The input's valid mask is carried over.
[[nodiscard]] DepthMap guided_filter(const DepthMap& input, const IntensityMap& guide, const GuidedFilterParams& params);

}  // namespace spadsr
