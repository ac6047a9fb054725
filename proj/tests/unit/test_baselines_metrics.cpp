#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "spadsr/baselines.hpp"
#include "spadsr/experiments.hpp"
#include "spadsr/metrics.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace spadsr;

namespace {

oracle::Img to_img(const Grid<double>& g) {
  return {static_cast<long>(g.height), static_cast<long>(g.width), g.data};
}

// Guided filter written directly from the windowed definitions.
std::vector<double> guided_oracle(const Grid<double>& p, const Grid<double>& I, long r, double eps) {
  const long H = static_cast<long>(p.height), W = static_cast<long>(p.width);
  oracle::Img ip = to_img(p), ii = to_img(I), ipi = ip, iii = ii;
  for (std::size_t k = 0; k < p.size(); ++k) {
    ipi.v[k] = I.data[k] * p.data[k];
    iii.v[k] = I.data[k] * I.data[k];
  }
  oracle::Img a = ip, b = ip;
  for (long i = 0; i < H; ++i)
    for (long j = 0; j < W; ++j) {
      const double mi = oracle::box_mean(ii, i, j, r), mp = oracle::box_mean(ip, i, j, r);
      const double cov = oracle::box_mean(ipi, i, j, r) - mi * mp;
      const double var = oracle::box_mean(iii, i, j, r) - mi * mi;
      a.v[i * W + j] = cov / (var + eps);
      b.v[i * W + j] = mp - a.v[i * W + j] * mi;
    }
  std::vector<double> q(p.size());
  for (long i = 0; i < H; ++i)
    for (long j = 0; j < W; ++j)
      q[i * W + j] = oracle::box_mean(a, i, j, r) * I.data[i * W + j] + oracle::box_mean(b, i, j, r);
  return q;
}

DepthMap depth_of(const Grid<double>& g) {
  DepthMap d(g.height, g.width);
  d.values = g;
  return d;
}

}  // namespace

TEST_CASE("box mean matches the windowed sum") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing_support::random_grid(rng, 1 + rng() % 12, 1 + rng() % 12);
    const std::size_t r = 1 + rng() % 4;
    const auto m = box_mean(g, r);
    const auto o = to_img(g);
    for (long i = 0; i < o.h; ++i)
      for (long j = 0; j < o.w; ++j)
        CHECK(m(i, j) == doctest::Approx(oracle::box_mean(o, i, j, static_cast<long>(r))).epsilon(1e-12));
  }
}

TEST_CASE("guided filter matches the direct formulation") {
  std::mt19937_64 rng(2);
  const auto p = testing_support::random_grid(rng, 13, 9);
  const auto I = testing_support::random_grid(rng, 13, 9);
  IntensityMap guide(13, 9);
  guide.values = I;
  const DepthMap q = guided_filter(depth_of(p), guide, {3, 1e-3});
  const auto o = guided_oracle(p, I, 3, 1e-3);
  for (std::size_t k = 0; k < o.size(); ++k) CHECK(q.values.data[k] == doctest::Approx(o[k]).epsilon(1e-9));
}

TEST_CASE("guided filter properties") {
  std::mt19937_64 rng(3);
  IntensityMap guide(16, 16);
  guide.values = testing_support::random_grid(rng, 16, 16);
  // A constant input stays constant.
  const DepthMap c = guided_filter(depth_of(Grid<double>(16, 16, 0.4)), guide, {});
  for (double v : c.values.data) CHECK(v == doctest::Approx(0.4).epsilon(1e-9));
  // With eps = 0 an input that is an affine function of the guide is reproduced.
  Grid<double> lin(16, 16);
  for (std::size_t k = 0; k < lin.size(); ++k) lin.data[k] = 0.3 * guide.values.data[k] + 0.1;
  const DepthMap l = guided_filter(depth_of(lin), guide, {2, 0.0});
  for (std::size_t k = 0; k < lin.size(); ++k) CHECK(l.values.data[k] == doctest::Approx(lin.data[k]).epsilon(1e-9));
  CHECK_THROWS_AS((void)guided_filter(depth_of(lin), IntensityMap(4, 4), {}), DimensionError);
  CHECK_THROWS_AS(GuidedFilterParams({0, 1e-4}).validate(), InvalidArgument);
}

TEST_CASE("nearest-neighbour reconstruction of a single pixel") {
  HistogramCube c(1, 1, 16);
  c.at(0, 0, 7) = 20;
  const DepthMap d = reconstruct_nn(c, PipelineConfig::for_factor(4));
  REQUIRE(d.height() == 4);
  REQUIRE(d.width() == 4);
  for (double v : d.values.data) CHECK(v == doctest::Approx(8.0 / 16.0));
}

TEST_CASE("rmse and ade examples") {
  std::mt19937_64 rng(4);
  const auto g = testing_support::random_grid(rng, 6, 7);
  const DepthMap gt = depth_of(g);
  CHECK(rmse(gt, gt) == 0.0);
  CHECK(ade(gt, gt).mean == 0.0);
  Grid<double> shifted = g;
  for (double& v : shifted.data) v += 0.1;
  CHECK(rmse(depth_of(shifted), gt) == doctest::Approx(0.1));
  CHECK(ade(depth_of(shifted), gt).mean == doctest::Approx(0.1));

  const DepthMap pred = depth_of(testing_support::random_grid(rng, 6, 7));
  double s2 = 0, s1 = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double e = pred.values.data[k] - g.data[k];
    s2 += e * e;
    s1 += std::abs(e);
  }
  CHECK(rmse(pred, gt) == doctest::Approx(std::sqrt(s2 / g.size())).epsilon(1e-12));
  const auto a = ade(pred, gt);
  CHECK(a.mean == doctest::Approx(s1 / g.size()).epsilon(1e-12));
  CHECK(a.map(2, 3) == doctest::Approx(std::abs(pred.values(2, 3) - g(2, 3))));
}

TEST_CASE("metric properties on random maps") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t h = 1 + rng() % 9, w = 1 + rng() % 9;
    DepthMap a = depth_of(testing_support::random_grid(rng, h, w));
    DepthMap b = depth_of(testing_support::random_grid(rng, h, w));
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      if (rng() % 5 == 0) a.valid.data[k] = 0;
      if (rng() % 5 == 0) b.valid.data[k] = 0;
    }
    const double r = rmse(a, b), m = ade(a, b).mean;
    if (std::isnan(r)) continue;
    CHECK(r * r >= m * m - 1e-15);
    CHECK(r == rmse(b, a));
    CHECK(m == ade(b, a).mean);
  }
  // Invalid pixels are ignored.
  DepthMap x(1, 2), y(1, 2);
  x.values(0, 1) = 0.9;
  x.valid(0, 1) = 0;
  CHECK(rmse(x, y) == 0.0);
  y.valid(0, 0) = 0;
  CHECK(std::isnan(rmse(x, y)));
  CHECK_THROWS_AS((void)rmse(DepthMap(2, 2), DepthMap(2, 3)), DimensionError);
}

TEST_CASE("noise measurement examples") {
  // Window (h - b) sums to 40 with b = 2 over three bins.
  HistogramCube c(1, 3, 8);
  const std::uint32_t counts[8] = {2, 2, 12, 22, 12, 2, 2, 2};
  for (std::size_t t = 0; t < 8; ++t) {
    c.at(0, 0, t) = counts[t];
    c.at(0, 1, t) = 2;
    c.at(0, 2, t) = t == 3 ? 5 : 0;
  }
  Grid<double> b(1, 3, 2.0);
  b(0, 2) = 0.0;
  Grid<std::size_t> peaks(1, 3);
  peaks(0, 0) = 4;
  peaks(0, 1) = 0;
  peaks(0, 2) = 4;
  const NoiseReport r = measure_noise(c, b, peaks);
  CHECK(r.pixel_ppp(0, 0) == doctest::Approx(40.0));
  CHECK(r.pixel_sbr(0, 0) == doctest::Approx(40.0 / 6.0));
  CHECK(r.pixel_ppp(0, 1) == 0.0);
  CHECK(r.pixel_sbr(0, 1) == 0.0);
  CHECK(std::isinf(r.pixel_sbr(0, 2)));
  CHECK(r.infinite_sbr_pixels == 1);
  CHECK(r.sbr == doctest::Approx((40.0 / 6.0) / 2.0));
  CHECK(r.ppp == doctest::Approx((40.0 + 0.0 + 5.0) / 3.0));
}

TEST_CASE("noise measurement agrees with brute force") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 3 + rng() % 30;
    const auto h = testing_support::peaky_hist(rng, T);
    HistogramCube c(1, 1, T, h);
    const double bg = static_cast<double>(rng() % 5);
    const std::size_t d = rng() % (T + 1);
    const NoiseReport r = measure_noise(c, Grid<double>(1, 1, bg), Grid<std::size_t>(1, 1, d));
    const auto [ppp, sbr] = oracle::noise(h, bg, static_cast<long>(d));
    CHECK(r.pixel_ppp(0, 0) == doctest::Approx(ppp).epsilon(1e-12));
    if (std::isinf(sbr))
      CHECK(std::isinf(r.pixel_sbr(0, 0)));
    else
      CHECK(r.pixel_sbr(0, 0) == doctest::Approx(sbr).epsilon(1e-12));
  }
}
