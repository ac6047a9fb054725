#include "spadsr/nn/layers.hpp"

#include <algorithm>
#include <cassert>

#include "spadsr/nn/gemm.hpp"

namespace spadsr::nn {
namespace {

// col[(ci*9 + ky*3 + kx), y*W + x] = in(ci, y+ky-1, x+kx-1), zero outside.
template <typename T>
void im2col3x3(const Blob<T>& in, std::vector<T>& col) {
  const std::size_t H = in.h, W = in.w, HW = in.plane();
  col.resize(in.c * 9 * HW);
  for (std::size_t ci = 0; ci < in.c; ++ci) {
    const T* src = in.channel(ci);
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* dst = col.data() + (ci * 9 + static_cast<std::size_t>(ky * 3 + kx)) * HW;
        for (std::size_t y = 0; y < H; ++y) {
          const long sy = static_cast<long>(y) + ky - 1;
          T* row = dst + y * W;
          if (sy < 0 || sy >= static_cast<long>(H)) {
            std::fill(row, row + W, T{});
            continue;
          }
          const T* srow = src + static_cast<std::size_t>(sy) * W;
          // x + kx - 1 in [0, W)
          const std::size_t x0 = kx == 0 ? 1 : 0;
          const std::size_t x1 = kx == 2 ? W - 1 : W;
          if (x0 > 0) row[0] = T{};
          if (x1 < W) row[W - 1] = T{};
          for (std::size_t x = x0; x < x1; ++x) row[x] = srow[x + static_cast<std::size_t>(kx) - 1];
        }
      }
    }
  }
}

template <typename T>
void col2im3x3_add(const std::vector<T>& col, Blob<T>& out) {
  const std::size_t H = out.h, W = out.w, HW = out.plane();
  for (std::size_t ci = 0; ci < out.c; ++ci) {
    T* dst = out.channel(ci);
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* src = col.data() + (ci * 9 + static_cast<std::size_t>(ky * 3 + kx)) * HW;
        for (std::size_t y = 0; y < H; ++y) {
          const long sy = static_cast<long>(y) + ky - 1;
          if (sy < 0 || sy >= static_cast<long>(H)) continue;
          T* drow = dst + static_cast<std::size_t>(sy) * W;
          const T* row = src + y * W;
          const std::size_t x0 = kx == 0 ? 1 : 0;
          const std::size_t x1 = kx == 2 ? W - 1 : W;
          for (std::size_t x = x0; x < x1; ++x) drow[x + static_cast<std::size_t>(kx) - 1] += row[x];
        }
      }
    }
  }
}

template <typename T>
void add_bias(Blob<T>& out, std::span<const T> bias) {
  for (std::size_t k = 0; k < out.c; ++k) {
    T* p = out.channel(k);
    const T b = bias[k];
    for (std::size_t i = 0; i < out.plane(); ++i) p[i] += b;
  }
}

template <typename T>
void bias_grad(const Blob<T>& dout, std::span<T> dbias) {
  for (std::size_t k = 0; k < dout.c; ++k) {
    const T* p = dout.channel(k);
    double s = 0.0;
    for (std::size_t i = 0; i < dout.plane(); ++i) s += p[i];
    dbias[k] += static_cast<T>(s);
  }
}

template <typename T>
std::vector<T>& scratch() {
  thread_local std::vector<T> buf;
  return buf;
}

}  // namespace

template <typename T>
void conv3x3_forward(const Blob<T>& in, std::span<const T> weights, std::span<const T> bias, std::size_t cout,
                     Blob<T>& out) {
  assert(weights.size() == cout * in.c * 9 && bias.size() == cout);
  auto& col = scratch<T>();
  im2col3x3(in, col);
  out.reshape(cout, in.h, in.w);
  const std::size_t K = in.c * 9, HW = in.plane();
  gemm<T>(false, false, cout, HW, K, weights.data(), K, col.data(), HW, out.data.data(), HW, false);
  add_bias(out, bias);
}

template <typename T>
void conv3x3_backward(const Blob<T>& in, const Blob<T>& dout, std::span<const T> weights, std::span<T> dweights,
                      std::span<T> dbias, Blob<T>* din) {
  const std::size_t cout = dout.c, K = in.c * 9, HW = in.plane();
  auto& col = scratch<T>();
  im2col3x3(in, col);
  gemm<T>(false, true, cout, K, HW, dout.data.data(), HW, col.data(), HW, dweights.data(), K, true);
  bias_grad(dout, dbias);
  if (!din) return;
  gemm<T>(true, false, K, HW, cout, weights.data(), K, dout.data.data(), HW, col.data(), HW, false);
  din->reshape(in.c, in.h, in.w);
  col2im3x3_add(col, *din);
}

template <typename T>
void deconv_up2_forward(const Blob<T>& in, std::span<const T> weights, std::span<const T> bias, std::size_t cout,
                        Blob<T>& out) {
  assert(weights.size() == in.c * cout * 9 && bias.size() == cout);
  const std::size_t HWin = in.plane(), N9 = cout * 9;
  auto& col = scratch<T>();
  col.resize(N9 * HWin);
  gemm<T>(true, false, N9, HWin, in.c, weights.data(), N9, in.data.data(), HWin, col.data(), HWin, false);
  out.reshape(cout, 2 * in.h, 2 * in.w);
  const long OH = static_cast<long>(out.h), OW = static_cast<long>(out.w);
  for (std::size_t co = 0; co < cout; ++co) {
    T* dst = out.channel(co);
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* src = col.data() + (co * 9 + static_cast<std::size_t>(ky * 3 + kx)) * HWin;
        for (std::size_t y = 0; y < in.h; ++y) {
          const long oy = 2 * static_cast<long>(y) - 1 + ky;
          if (oy < 0 || oy >= OH) continue;
          for (std::size_t x = 0; x < in.w; ++x) {
            const long ox = 2 * static_cast<long>(x) - 1 + kx;
            if (ox < 0 || ox >= OW) continue;
            dst[static_cast<std::size_t>(oy * OW + ox)] += src[y * in.w + x];
          }
        }
      }
    }
  }
  add_bias(out, bias);
}

template <typename T>
void deconv_up2_backward(const Blob<T>& in, const Blob<T>& dout, std::span<const T> weights, std::span<T> dweights,
                         std::span<T> dbias, Blob<T>* din) {
  const std::size_t cout = dout.c, HWin = in.plane(), N9 = cout * 9;
  auto& col = scratch<T>();
  col.assign(N9 * HWin, T{});
  const long OH = static_cast<long>(dout.h), OW = static_cast<long>(dout.w);
  for (std::size_t co = 0; co < cout; ++co) {
    const T* src = dout.channel(co);
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* dst = col.data() + (co * 9 + static_cast<std::size_t>(ky * 3 + kx)) * HWin;
        for (std::size_t y = 0; y < in.h; ++y) {
          const long oy = 2 * static_cast<long>(y) - 1 + ky;
          if (oy < 0 || oy >= OH) continue;
          for (std::size_t x = 0; x < in.w; ++x) {
            const long ox = 2 * static_cast<long>(x) - 1 + kx;
            if (ox < 0 || ox >= OW) continue;
            dst[y * in.w + x] = src[static_cast<std::size_t>(oy * OW + ox)];
          }
        }
      }
    }
  }
  gemm<T>(false, true, in.c, N9, HWin, in.data.data(), HWin, col.data(), HWin, dweights.data(), N9, true);
  bias_grad(dout, dbias);
  if (!din) return;
  din->reshape(in.c, in.h, in.w);
  gemm<T>(false, false, in.c, HWin, N9, weights.data(), N9, col.data(), HWin, din->data.data(), HWin, false);
}

template <typename T>
void maxpool2x2_forward(const Blob<T>& in, Blob<T>& out, std::vector<std::uint32_t>& argmax) {
  assert(in.h % 2 == 0 && in.w % 2 == 0);
  out.reshape(in.c, in.h / 2, in.w / 2);
  argmax.resize(out.size());
  std::size_t o = 0;
  for (std::size_t k = 0; k < in.c; ++k) {
    for (std::size_t y = 0; y < out.h; ++y) {
      for (std::size_t x = 0; x < out.w; ++x, ++o) {
        std::size_t best = (k * in.h + 2 * y) * in.w + 2 * x;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (k * in.h + 2 * y + dy) * in.w + 2 * x + dx;
            if (in.data[idx] > in.data[best]) best = idx;
          }
        }
        out.data[o] = in.data[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
}

template <typename T>
void maxpool2x2_backward(const Blob<T>& dout, const std::vector<std::uint32_t>& argmax, Blob<T>& din) {
  for (std::size_t o = 0; o < dout.size(); ++o) din.data[argmax[o]] += dout.data[o];
}

template <typename T>
void relu_inplace(Blob<T>& x) {
  for (T& v : x.data) v = v > T{} ? v : T{};
}

template <typename T>
void relu_backward_inplace(const Blob<T>& y, Blob<T>& dx) {
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(y.data[i] > T{})) dx.data[i] = T{};
}

template <typename T>
void concat_channels(std::span<const Blob<T>* const> parts, Blob<T>& out) {
  std::size_t c = 0;
  for (const auto* p : parts) {
    assert(p->h == parts[0]->h && p->w == parts[0]->w);
    c += p->c;
  }
  out.reshape(c, parts[0]->h, parts[0]->w);
  auto it = out.data.begin();
  for (const auto* p : parts) it = std::copy(p->data.begin(), p->data.end(), it);
}

template <typename T>
void accumulate_slice(const Blob<T>& whole, std::size_t offset, Blob<T>& part) {
  const T* src = whole.channel(offset);
  for (std::size_t i = 0; i < part.size(); ++i) part.data[i] += src[i];
}

#define SPADSR_INSTANTIATE(T)                                                                                     \
  template void conv3x3_forward<T>(const Blob<T>&, std::span<const T>, std::span<const T>, std::size_t, Blob<T>&); \
  template void conv3x3_backward<T>(const Blob<T>&, const Blob<T>&, std::span<const T>, std::span<T>, std::span<T>, \
                                    Blob<T>*);                                                                    \
  template void deconv_up2_forward<T>(const Blob<T>&, std::span<const T>, std::span<const T>, std::size_t,         \
                                      Blob<T>&);                                                                  \
  template void deconv_up2_backward<T>(const Blob<T>&, const Blob<T>&, std::span<const T>, std::span<T>,           \
                                       std::span<T>, Blob<T>*);                                                   \
  template void maxpool2x2_forward<T>(const Blob<T>&, Blob<T>&, std::vector<std::uint32_t>&);                      \
  template void maxpool2x2_backward<T>(const Blob<T>&, const std::vector<std::uint32_t>&, Blob<T>&);               \
  template void relu_inplace<T>(Blob<T>&);                                                                        \
  template void relu_backward_inplace<T>(const Blob<T>&, Blob<T>&);                                               \
  template void concat_channels<T>(std::span<const Blob<T>* const>, Blob<T>&);                                    \
  template void accumulate_slice<T>(const Blob<T>&, std::size_t, Blob<T>&);

SPADSR_INSTANTIATE(float)
SPADSR_INSTANTIATE(double)

#undef SPADSR_INSTANTIATE

}  // namespace spadsr::nn
