#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spadsr::nn {

// Single-sample activation volume, [C, H, W] row-major.
template <typename T>
struct Blob {
  std::size_t c = 0, h = 0, w = 0;
  std::vector<T> data;

  Blob() = default;
  Blob(std::size_t channels, std::size_t height, std::size_t width)
      : c(channels), h(height), w(width), data(channels * height * width, T{}) {}

  [[nodiscard]] std::size_t plane() const { return h * w; }
  [[nodiscard]] std::size_t size() const { return data.size(); }
  T* channel(std::size_t k) { return data.data() + k * plane(); }
  [[nodiscard]] const T* channel(std::size_t k) const { return data.data() + k * plane(); }
  T& at(std::size_t k, std::size_t i, std::size_t j) { return data[(k * h + i) * w + j]; }
  [[nodiscard]] const T& at(std::size_t k, std::size_t i, std::size_t j) const { return data[(k * h + i) * w + j]; }

  void zero() { std::fill(data.begin(), data.end(), T{}); }
  void reshape(std::size_t channels, std::size_t height, std::size_t width) {
    c = channels;
    h = height;
    w = width;
    data.assign(channels * height * width, T{});
  }
};

// 3x3 convolution, stride 1, zero "same" padding.
// weights: [cout, cin, 3, 3]; bias: [cout].
template <typename T>
void conv3x3_forward(const Blob<T>& in, std::span<const T> weights, std::span<const T> bias, std::size_t cout,
                     Blob<T>& out);

// Accumulates into dweights/dbias; writes dinput when non-null.
template <typename T>
void conv3x3_backward(const Blob<T>& in, const Blob<T>& dout, std::span<const T> weights, std::span<T> dweights,
                      std::span<T> dbias, Blob<T>* din);

// Transposed 3x3 convolution, stride 2, padding 1, output padding 1: exactly
// doubles H and W. weights: [cin, cout, 3, 3]; bias: [cout].
template <typename T>
void deconv_up2_forward(const Blob<T>& in, std::span<const T> weights, std::span<const T> bias, std::size_t cout,
                        Blob<T>& out);

template <typename T>
void deconv_up2_backward(const Blob<T>& in, const Blob<T>& dout, std::span<const T> weights, std::span<T> dweights,
                         std::span<T> dbias, Blob<T>* din);

// 2x2 max pooling, stride 2; `argmax` records the winning flat input index
// (first maximum in row-major window order).
template <typename T>
void maxpool2x2_forward(const Blob<T>& in, Blob<T>& out, std::vector<std::uint32_t>& argmax);

// Accumulates into din.
template <typename T>
void maxpool2x2_backward(const Blob<T>& dout, const std::vector<std::uint32_t>& argmax, Blob<T>& din);

template <typename T>
void relu_inplace(Blob<T>& x);

// dx *= (y > 0), y being the ReLU output.
template <typename T>
void relu_backward_inplace(const Blob<T>& y, Blob<T>& dx);

// Channel-wise concatenation / split.
template <typename T>
void concat_channels(std::span<const Blob<T>* const> parts, Blob<T>& out);

// Adds the channel slice [offset, offset + part.c) of `whole` into `part`.
template <typename T>
void accumulate_slice(const Blob<T>& whole, std::size_t offset, Blob<T>& part);

}  // namespace spadsr::nn
