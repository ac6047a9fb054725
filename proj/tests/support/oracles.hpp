#pragma once

// Deliberately naive reference implementations. They share no code with the
// library and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace oracle {

using Hist = std::vector<std::uint32_t>;

// Bins are 1-based in every oracle, like the library API.
inline double median_lower(Hist h) {
  std::sort(h.begin(), h.end());
  return h[(h.size() - 1) / 2];
}

inline std::optional<double> com(const Hist& h, double b, long dmax) {
  const long T = static_cast<long>(h.size());
  double num = 0, den = 0;
  for (long t = 1; t <= T; ++t) {
    if (t < dmax - 1 || t > dmax + 1) continue;
    const double s = std::max(0.0, double(h[t - 1]) - b);
    num += t * s;
    den += s;
  }
  if (den == 0) return std::nullopt;
  return num / den;
}

inline long argmax(const Hist& h) {
  long best = 1;
  for (long t = 1; t <= long(h.size()); ++t)
    if (h[t - 1] > h[best - 1]) best = t;
  return best;
}

inline std::vector<double> gauss_kernel(double sigma) {
  long half = long(std::ceil(3 * sigma));
  if (half < 1) half = 1;
  std::vector<double> k;
  double s = 0;
  for (long o = -half; o <= half; ++o) {
    k.push_back(std::exp(-(o * o) / (2 * sigma * sigma)));
    s += k.back();
  }
  for (auto& v : k) v /= s;
  return k;
}

inline std::vector<double> correlate(const Hist& h, double sigma) {
  const auto k = gauss_kernel(sigma);
  const long half = long(k.size() / 2), T = long(h.size());
  std::vector<double> out(h.size(), 0.0);
  for (long t = 0; t < T; ++t)
    for (long u = 0; u < T; ++u)
      if (std::abs(u - t) <= half) out[t] += k[u - t + half] * h[u];
  return out;
}

inline long matched(const Hist& h, double sigma) {
  const auto c = correlate(h, sigma);
  long best = 1;
  for (long t = 1; t <= long(c.size()); ++t)
    if (c[t - 1] > c[best - 1]) best = t;
  return best;
}

inline std::optional<long> second(const Hist& h, double b, long first, double level) {
  std::optional<long> best;
  for (long t = 1; t <= long(h.size()); ++t) {
    if (std::abs(t - first) <= 1) continue;
    if (!best || h[t - 1] > h[*best - 1]) best = t;
  }
  if (best && double(h[*best - 1]) > b + level * std::sqrt(b)) return best;
  return std::nullopt;
}

inline std::vector<int> median_mask(const std::vector<int>& m, long window) {
  const long n = long(m.size()), half = window / 2;
  std::vector<int> out(m.size());
  for (long t = 0; t < n; ++t) {
    std::vector<int> w;
    for (long o = -half; o <= half; ++o) w.push_back(t + o >= 0 && t + o < n ? m[t + o] : 0);
    std::sort(w.begin(), w.end());
    out[t] = w[w.size() / 2];
  }
  return out;
}

inline std::pair<long, long> crop(const std::vector<Hist>& pixels, double level, long window) {
  const long T = long(pixels.front().size());
  Hist agg(T, 0);
  for (const auto& h : pixels)
    for (long t = 0; t < T; ++t) agg[t] += h[t];
  const double b = median_lower(agg);
  std::vector<int> mask(T);
  for (long t = 0; t < T; ++t) mask[t] = agg[t] > b + level * std::sqrt(b);
  const auto kept = median_mask(mask, window);
  long lo = 0, hi = 0;
  for (long t = 1; t <= T; ++t)
    if (kept[t - 1]) {
      if (!lo) lo = t;
      hi = t;
    }
  if (!lo) return {1, T};
  return {lo, hi};
}

// Window sums of (h - b) around dmax: returns {ppp, sbr}.
inline std::pair<double, double> noise(const Hist& h, double b, long dmax) {
  if (dmax == 0) return {0, 0};
  const long T = long(h.size());
  const long lo = std::max(1L, dmax - 1), hi = std::min(T, dmax + 1);
  double s = 0;
  for (long t = lo; t <= hi; ++t) s += double(h[t - 1]) - b;
  const double sbr = b == 0 ? std::numeric_limits<double>::infinity() : s / (b * double(hi - lo + 1));
  return {s, sbr};
}

// ---- images -----------------------------------------------------------------

struct Img {
  long h = 0, w = 0;
  std::vector<double> v;
  double at(long i, long j) const { return v[i * w + j]; }
};

inline double box_mean(const Img& a, long i, long j, long r) {
  double s = 0;
  long n = 0;
  for (long di = -r; di <= r; ++di)
    for (long dj = -r; dj <= r; ++dj) {
      const long ii = std::clamp(i + di, 0L, a.h - 1), jj = std::clamp(j + dj, 0L, a.w - 1);
      s += a.at(ii, jj);
      ++n;
    }
  return s / n;
}

// ---- layers (input [c][h][w], double) ---------------------------------------

inline std::vector<double> conv3x3(const std::vector<double>& in, long cin, long H, long W, const std::vector<double>& wt,
                                   const std::vector<double>& bias, long cout) {
  std::vector<double> out(cout * H * W);
  for (long co = 0; co < cout; ++co)
    for (long y = 0; y < H; ++y)
      for (long x = 0; x < W; ++x) {
        double s = bias[co];
        for (long ci = 0; ci < cin; ++ci)
          for (long ky = 0; ky < 3; ++ky)
            for (long kx = 0; kx < 3; ++kx) {
              const long yy = y + ky - 1, xx = x + kx - 1;
              if (yy < 0 || yy >= H || xx < 0 || xx >= W) continue;
              s += wt[((co * cin + ci) * 3 + ky) * 3 + kx] * in[(ci * H + yy) * W + xx];
            }
        out[(co * H + y) * W + x] = s;
      }
  return out;
}

// Transposed conv, stride 2, pad 1, output pad 1, weights [cin][cout][3][3].
inline std::vector<double> deconv_up2(const std::vector<double>& in, long cin, long H, long W,
                                      const std::vector<double>& wt, const std::vector<double>& bias, long cout) {
  const long OH = 2 * H, OW = 2 * W;
  std::vector<double> out(cout * OH * OW);
  for (long co = 0; co < cout; ++co)
    for (long oy = 0; oy < OH; ++oy)
      for (long ox = 0; ox < OW; ++ox) {
        double s = bias[co];
        // out(oy, ox) gathers in(y, x) with oy = 2y - 1 + ky.
        for (long ci = 0; ci < cin; ++ci)
          for (long ky = 0; ky < 3; ++ky)
            for (long kx = 0; kx < 3; ++kx) {
              if ((oy + 1 - ky) % 2 != 0 || (ox + 1 - kx) % 2 != 0) continue;
              const long y = (oy + 1 - ky) / 2, x = (ox + 1 - kx) / 2;
              if (oy + 1 - ky < 0 || ox + 1 - kx < 0 || y >= H || x >= W) continue;
              s += wt[((ci * cout + co) * 3 + ky) * 3 + kx] * in[(ci * H + y) * W + x];
            }
        out[(co * OH + oy) * OW + ox] = s;
      }
  return out;
}

inline std::vector<double> maxpool(const std::vector<double>& in, long c, long H, long W) {
  std::vector<double> out(c * (H / 2) * (W / 2));
  for (long k = 0; k < c; ++k)
    for (long y = 0; y < H / 2; ++y)
      for (long x = 0; x < W / 2; ++x) {
        double m = -std::numeric_limits<double>::infinity();
        for (long dy = 0; dy < 2; ++dy)
          for (long dx = 0; dx < 2; ++dx) m = std::max(m, in[(k * H + 2 * y + dy) * W + 2 * x + dx]);
        out[(k * (H / 2) + y) * (W / 2) + x] = m;
      }
  return out;
}

}  // namespace oracle
