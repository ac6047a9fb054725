#include "spadsr/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "spadsr/poisson.hpp"

namespace spadsr {
namespace {

struct Shape {
  bool ellipse;
  double ci, cj, ri, rj;    // centre and half-extents in pixels
  double depth, slope_i, slope_j;
  double albedo, tex_amp, tex_freq, tex_phase;
};

}  // namespace

ScenePair synthetic_scene(std::size_t height, std::size_t width, std::uint64_t seed) {
  return synthetic_scene(height, width, seed, 0.2, 0.8);
}

ScenePair synthetic_scene(std::size_t height, std::size_t width, std::uint64_t seed, double lo, double hi) {
  CounterRng rng(seed, 0x5ce9e);
  auto uni = [&](double a, double b) { return a + (b - a) * rng.uniform(); };
  const double H = static_cast<double>(height);
  const double W = static_cast<double>(width);

  ScenePair scene{DepthMap(height, width), IntensityMap(height, width)};

  // Back plane: far, gently slanted.
  const double back = uni(0.75, 0.95);
  const double back_si = uni(-0.15, 0.15) / H;
  const double back_sj = uni(-0.15, 0.15) / W;
  const double back_albedo = uni(0.2, 0.5);
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      scene.depth_gt.values(i, j) = back + back_si * (i - H / 2) + back_sj * (j - W / 2);
      scene.intensity_gt.values(i, j) = back_albedo * (0.9 + 0.1 * std::sin(0.21 * i + 0.13 * j));
    }
  }

  const int count = 3 + static_cast<int>(rng.next() % 4);
  std::vector<Shape> shapes;
  for (int k = 0; k < count; ++k) {
    Shape s{};
    s.ellipse = rng.next() % 2 == 0;
    s.ci = uni(0.1, 0.9) * H;
    s.cj = uni(0.1, 0.9) * W;
    s.ri = uni(0.08, 0.3) * H;
    s.rj = uni(0.08, 0.3) * W;
    s.depth = uni(0.0, 0.65);
    s.slope_i = uni(-0.2, 0.2) / H;
    s.slope_j = uni(-0.2, 0.2) / W;
    s.albedo = uni(0.3, 1.0);
    s.tex_amp = uni(0.0, 0.15);
    s.tex_freq = uni(0.2, 0.8);
    s.tex_phase = uni(0.0, 2.0 * std::numbers::pi);
    shapes.push_back(s);
  }
  // Painter's order: far shapes first so nearer ones occlude them.
  std::sort(shapes.begin(), shapes.end(), [](const Shape& a, const Shape& b) { return a.depth > b.depth; });

  for (const Shape& s : shapes) {
    for (std::size_t i = 0; i < height; ++i) {
      for (std::size_t j = 0; j < width; ++j) {
        const double di = (static_cast<double>(i) - s.ci) / s.ri;
        const double dj = (static_cast<double>(j) - s.cj) / s.rj;
        const bool inside = s.ellipse ? di * di + dj * dj <= 1.0 : std::abs(di) <= 1.0 && std::abs(dj) <= 1.0;
        if (!inside) continue;
        scene.depth_gt.values(i, j) = s.depth + s.slope_i * (i - s.ci) + s.slope_j * (j - s.cj);
        scene.intensity_gt.values(i, j) =
            s.albedo * (1.0 - s.tex_amp + s.tex_amp * std::sin(s.tex_freq * static_cast<double>(i + j) + s.tex_phase));
      }
    }
  }

  for (double& v : scene.depth_gt.values.data) v = lo + (hi - lo) * std::clamp(v, 0.0, 1.0);
  for (double& v : scene.intensity_gt.values.data) v = std::clamp(v, 0.0, 1.0);
  return scene;
}

}  // namespace spadsr
