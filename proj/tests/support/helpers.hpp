#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "spadsr/types.hpp"

namespace testing_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("spadsr_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::uint32_t> random_hist(std::mt19937_64& rng, std::size_t T, std::uint32_t max_count) {
  std::uniform_int_distribution<std::uint32_t> d(0, max_count);
  std::vector<std::uint32_t> h(T);
  for (auto& v : h) v = d(rng);
  return h;
}

// Background plus one or two bumps; random T in [3, 32] unless given.
inline std::vector<std::uint32_t> peaky_hist(std::mt19937_64& rng, std::size_t T) {
  std::uniform_int_distribution<std::uint32_t> bg(0, 6);
  std::vector<std::uint32_t> h(T);
  for (auto& v : h) v = bg(rng);
  const std::size_t bumps = 1 + rng() % 2;
  for (std::size_t k = 0; k < bumps; ++k) {
    const std::size_t c = rng() % T;
    const std::uint32_t amp = 5 + static_cast<std::uint32_t>(rng() % 60);
    h[c] += amp;
    if (c > 0) h[c - 1] += amp / 3;
    if (c + 1 < T) h[c + 1] += amp / 4;
  }
  return h;
}

inline spadsr::HistogramCube random_cube(std::mt19937_64& rng, std::size_t H, std::size_t W, std::size_t T) {
  spadsr::HistogramCube c(H, W, T);
  for (std::size_t i = 0; i < H; ++i)
    for (std::size_t j = 0; j < W; ++j) {
      const auto h = peaky_hist(rng, T);
      std::copy(h.begin(), h.end(), c.pixel(i, j).begin());
    }
  return c;
}

inline spadsr::Grid<double> random_grid(std::mt19937_64& rng, std::size_t H, std::size_t W, double lo = 0.0,
                                        double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  spadsr::Grid<double> g(H, W);
  for (auto& v : g.data) v = d(rng);
  return g;
}

}  // namespace testing_support
