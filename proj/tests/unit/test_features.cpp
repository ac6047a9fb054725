#include <doctest.h>

#include <random>

#include "spadsr/features.hpp"
#include "spadsr/scenes.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace spadsr;

namespace {

std::vector<std::uint32_t> hist(std::initializer_list<std::uint32_t> v) { return v; }

}  // namespace

TEST_CASE("centre of mass examples") {
  const auto h = hist({0, 0, 2, 10, 4, 0, 0, 0});
  // Window 3..5 around the peak at 4: (3*2 + 4*10 + 5*4) / 16.
  CHECK(*center_of_mass(h, 0.0, 4) == doctest::Approx(66.0 / 16.0));
  // Background is subtracted and clipped at zero.
  CHECK(*center_of_mass(h, 3.0, 4) == doctest::Approx((4 * 7.0 + 5 * 1.0) / 8.0));
  CHECK(!center_of_mass(h, 20.0, 4).has_value());
  // Windows are clipped at the histogram edges.
  CHECK(*center_of_mass(hist({9, 3, 0, 0}), 0.0, 1) == doctest::Approx(15.0 / 12.0));
}

TEST_CASE("lower median background") {
  CHECK(lower_median(hist({5, 1, 3, 2})) == 2.0);
  CHECK(lower_median(hist({4, 4, 9})) == 4.0);
  CHECK(lower_median(hist({7})) == 7.0);
}

TEST_CASE("per-pixel estimators agree with brute force on random histograms") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t T = 3 + rng() % 30;
    const auto h = trial % 2 ? testing_support::peaky_hist(rng, T) : testing_support::random_hist(rng, T, 20);
    const double b = lower_median(h);
    CHECK(b == oracle::median_lower(h));
    const auto peak = find_peak(h, PeakMethod::argmax, 0.5714);
    CHECK(static_cast<long>(peak.d_max) == oracle::argmax(h));
    const auto mf = find_peak(h, PeakMethod::matched_filter, 0.5714);
    CHECK(static_cast<long>(mf.d_max) == oracle::matched(h, 0.5714));
    CHECK(mf.method == PeakMethod::matched_filter);

    const auto got = center_of_mass(h, b, peak.d_max);
    const auto want = oracle::com(h, b, static_cast<long>(peak.d_max));
    REQUIRE(got.has_value() == want.has_value());
    if (got) CHECK(*got == doctest::Approx(*want).epsilon(1e-12));

    const auto s = second_peak(h, b, peak.d_max, 12.0);
    const auto so = oracle::second(h, b, static_cast<long>(peak.d_max), 12.0);
    REQUIRE(s.has_value() == so.has_value());
    if (s) CHECK(static_cast<long>(*s) == *so);
  }
}

TEST_CASE("matched filter kernel") {
  const auto k = matched_filter_kernel(0.5714);
  CHECK(k.size() == 5);  // half width ceil(3 sigma) = 2
  CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0));
  CHECK(matched_filter_kernel(0.2).size() == 3);  // half width at least one bin
  const auto ok = oracle::gauss_kernel(0.5714);
  for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[i] == doctest::Approx(ok[i]).epsilon(1e-12));
}

TEST_CASE("matched filter finds a sparse peak that raw argmax misses") {
  // A single noise spike versus a three-bin return of the same height.
  const auto h = hist({0, 0, 3, 0, 0, 0, 0, 3, 3, 3, 0, 0});
  CHECK(find_peak(h, PeakMethod::argmax, 0.5714).d_max == 3);
  CHECK(find_peak(h, PeakMethod::matched_filter, 0.5714).d_max == 9);
}

TEST_CASE("second peak needs a level above background") {
  const auto h = hist({1, 1, 30, 60, 20, 1, 1, 1, 40, 1, 1, 1});
  const double b = lower_median(h);
  CHECK(b == 1.0);
  CHECK(second_peak(h, b, 4, 12.0) == std::optional<std::size_t>(9));
  CHECK(!second_peak(h, b, 4, 40.0).has_value());
  // Bins adjacent to the first peak are never a second peak.
  CHECK(second_peak(hist({1, 1, 1, 50, 60, 1, 1, 1}), 1.0, 5, 12.0) == std::nullopt);
}

TEST_CASE("binary median filter") {
  const std::vector<std::uint8_t> m{0, 1, 0, 1, 1, 1, 0, 0, 1};
  const auto out = median_filter_binary(m, 3);
  CHECK(out == std::vector<std::uint8_t>{0, 0, 1, 1, 1, 1, 0, 0, 0});
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    const std::size_t w = 1 + 2 * (rng() % 4);
    std::vector<std::uint8_t> mask(n);
    std::vector<int> im(n);
    for (std::size_t i = 0; i < n; ++i) im[i] = mask[i] = rng() % 2;
    const auto a = median_filter_binary(mask, w);
    const auto b = oracle::median_mask(im, static_cast<long>(w));
    for (std::size_t i = 0; i < n; ++i) CHECK(int(a[i]) == b[i]);
  }
}

TEST_CASE("temporal crop matches brute force") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = 4 + rng() % 29;
    const HistogramCube c = testing_support::random_cube(rng, 2 + rng() % 3, 2 + rng() % 3, T);
    std::vector<oracle::Hist> px;
    for (std::size_t p = 0; p < c.pixels(); ++p) px.emplace_back(c.pixel(p).begin(), c.pixel(p).end());
    const auto got = temporal_crop(c, 12.0, 3);
    const auto want = oracle::crop(px, 12.0, 3);
    CHECK(static_cast<long>(got.first) == want.first);
    CHECK(static_cast<long>(got.second) == want.second);
  }
  // Flat cube: nothing above background, keep everything.
  const HistogramCube flat(2, 2, 10, std::vector<std::uint32_t>(40, 5));
  CHECK(temporal_crop(flat, 12.0, 3) == std::pair<std::size_t, std::size_t>{1, 10});
}

TEST_CASE("centre of mass depth map normalizes by the bin count") {
  HistogramCube c(1, 2, 8);
  for (std::size_t t = 0; t < 8; ++t) c.at(0, 0, t) = t == 3 ? 10 : 0;
  const auto b = estimate_background(c);
  const auto peaks = find_peaks(c, PeakMethod::argmax, 0.5714);
  const DepthMap d = center_of_mass_depth(c, b, peaks, 8.0);
  CHECK(d.values(0, 0) == doctest::Approx(4.0 / 8.0));
  CHECK(d.valid(0, 0) == 1);
  // All-zero histogram: no counts above background.
  CHECK(d.valid(0, 1) == 0);
  CHECK(d.values(0, 1) == 0.0);
}

TEST_CASE("feature dims for 4x and 8x pipelines") {
  std::mt19937_64 rng(4);
  {
    const HistogramCube c = testing_support::random_cube(rng, 16, 8, 16);
    const FeatureSet f = build_features(c, IntensityMap(64, 32), PipelineConfig::for_factor(4));
    CHECK(f.first_depth.height() == 64);
    CHECK(f.first_depth.width() == 32);
    CHECK(f.second_depth.height() == 64);
    CHECK(f.d1.height() == 32);
    CHECK(f.d2.height() == 16);
    CHECK(f.d3.height() == 8);
    CHECK(f.d4.height() == 4);
    CHECK(f.d4.width() == 2);
    CHECK(f.crop_range == std::pair<std::size_t, std::size_t>{1, 16});
  }
  {
    const HistogramCube c = testing_support::random_cube(rng, 4, 6, 20);
    const FeatureSet f = build_features(c, IntensityMap(32, 48), PipelineConfig::for_factor(8));
    CHECK(f.first_depth.height() == 32);
    CHECK(f.d1.height() == 16);
    CHECK(f.d2.height() == 8);
    CHECK(f.d3.height() == 4);
    CHECK(f.d4.height() == 2);
    CHECK(f.d4.width() == 3);
    for (auto v : f.second_depth.valid.data) CHECK(v == 0);
  }
  const HistogramCube odd = testing_support::random_cube(rng, 5, 8, 16);
  CHECK_THROWS_AS((void)build_features(odd, IntensityMap(20, 32), PipelineConfig::for_factor(4)), DimensionError);
  CHECK_THROWS_AS((void)build_features(odd, IntensityMap(21, 32), PipelineConfig::for_factor(4)), DimensionError);
  const PaddedInput p = pad_for_features(odd, IntensityMap(20, 32), 4);
  CHECK(p.cube.height() == 8);
  CHECK(p.intensity.height() == 32);
  CHECK(p.target_height == 20);
}

TEST_CASE("noise-free first depth recovers a constant scene") {
  ScenePair s{DepthMap(32, 32), IntensityMap(32, 32)};
  std::fill(s.depth_gt.values.data.begin(), s.depth_gt.values.data.end(), 0.5);
  std::fill(s.intensity_gt.values.data.begin(), s.intensity_gt.values.data.end(), 0.8);
  NoiseSpec spec;
  spec.ppp = 5000;
  spec.sbr = 100;
  const FeatureSet f = build_features(simulate(s, 16, spec, 4), PipelineConfig::for_factor(4));
  for (double v : f.first_depth.values.data) CHECK(v == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("pipeline config validation") {
  PipelineConfig c;
  c.upsample_factor = 2;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = PipelineConfig{};
  c.median_window = 4;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = PipelineConfig{};
  c.level = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}
