#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spadsr/nn/layers.hpp"
#include "spadsr/types.hpp"

namespace spadsr::nn {

enum class LayerKind { conv3x3, deconv_up2, conv_out };

struct LayerSpec {
  std::string name;
  LayerKind kind;
  std::size_t in_ch;
  std::size_t out_ch;
};

// Filter counts 64, 128, 256, 512, 1024 times width_scale (rounded, >= 1).
[[nodiscard]] std::array<std::size_t, 5> histnet_widths(double width_scale);

// All parameterized layers in a fixed order; the order is also the
// checkpoint order.
[[nodiscard]] std::vector<LayerSpec> histnet_layers(double width_scale);

template <typename T>
struct Parameter {
  std::string name;  // e.g. "enc1.conv2.weight"
  std::vector<std::size_t> dims;
  std::vector<T> value;
};

template <typename T>
struct HistNetParams {
  double width_scale = 1.0;
  std::vector<Parameter<T>> tensors;  // weight, bias per layer in histnet_layers order

  [[nodiscard]] std::size_t count() const;
  // Zero-filled tensors with the same layout.
  [[nodiscard]] HistNetParams zeros_like() const;
};

// Fan-in scaled uniform weights (+-sqrt(6 / fan_in)), zero biases. By default
// the output layer starts at zero, so training begins from residual 0.
template <typename T>
[[nodiscard]] HistNetParams<T> init_histnet(double width_scale, std::uint64_t seed, bool zero_output = true);

template <typename T, typename U>
[[nodiscard]] HistNetParams<T> convert_params(const HistNetParams<U>& p);

// Network inputs for one sample. Target size R must be divisible by 16.
template <typename T>
struct NetInput {
  Blob<T> main;         // [2, R]: first and second depth
  std::array<Blob<T>, 4> depth_scales;  // [1, R/2] ... [1, R/16]
  Blob<T> intensity;    // [1, R]
};

template <typename T>
[[nodiscard]] NetInput<T> make_input(const FeatureSet& f);

// Activations kept by forward for backward.
template <typename T>
struct ForwardCache {
  NetInput<T> input;
  std::array<Blob<T>, 5> enc_a, enc;         // first / second conv outputs per encoder level
  std::array<Blob<T>, 4> pooled, guide, cat; // encoder levels 1..4
  std::array<std::vector<std::uint32_t>, 4> pool_idx;
  std::array<Blob<T>, 4> int_conv, int_pool;
  std::array<std::vector<std::uint32_t>, 4> int_pool_idx;
  std::array<Blob<T>, 4> up, dcat, dec_a, dec;  // decoder levels 5..8
  Blob<T> residual;
};

template <typename T>
class HistNet {
 public:
  explicit HistNet(HistNetParams<T> params);

  [[nodiscard]] const HistNetParams<T>& params() const { return params_; }
  HistNetParams<T>& params() { return params_; }
  [[nodiscard]] const std::array<std::size_t, 5>& widths() const { return widths_; }

  // Residual map [1, R]. `cache` may be null for inference.
  Blob<T> forward(const NetInput<T>& in, ForwardCache<T>* cache) const;

  // Accumulates parameter gradients given dL/dresidual.
  void backward(const ForwardCache<T>& cache, const Blob<T>& dresidual, HistNetParams<T>& grads) const;

 private:
  // Index of the weight tensor of layer `name`; bias is the next one.
  [[nodiscard]] std::size_t index_of(const std::string& name) const;

  void conv(std::size_t layer, const Blob<T>& in, Blob<T>& out, bool relu) const;
  void conv_back(std::size_t layer, const Blob<T>& in, const Blob<T>& out, Blob<T>& dout, bool relu,
                 HistNetParams<T>& grads, Blob<T>* din) const;
  void deconv(std::size_t layer, const Blob<T>& in, Blob<T>& out) const;
  void deconv_back(std::size_t layer, const Blob<T>& in, const Blob<T>& out, Blob<T>& dout, HistNetParams<T>& grads,
                   Blob<T>* din) const;

  HistNetParams<T> params_;
  std::array<std::size_t, 5> widths_{};
  std::vector<LayerSpec> layers_;

  // Layer indices (into layers_), resolved once.
  std::array<std::size_t, 5> enc1_{}, enc2_{};
  std::array<std::size_t, 4> guide_{}, int_{}, up_{}, dec1_{}, dec2_{};
  std::size_t out_ = 0;
};

// (1/MN) sum |R + d - d_ref| over a batch of M maps with N pixels each.
template <typename T>
[[nodiscard]] double l1_loss(std::span<const Blob<T>> residuals, std::span<const Blob<T>> first_depths,
                             std::span<const Blob<T>> targets);

// Sample used for training and gradient checks.
template <typename T>
struct TrainingSample {
  NetInput<T> input;
  Blob<T> target;  // [1, R] ground-truth depth
  Blob<T> mask;    // [1, R] 1 where the ground truth is valid
};

template <typename T>
[[nodiscard]] TrainingSample<T> make_sample(const FeatureSet& f, const DepthMap& depth_gt);

// Mean l1 loss over `batch` and, if `grads` is non-null, its gradient
// (scaled by `loss_scale`).
template <typename T>
double loss_and_gradient(const HistNet<T>& net, std::span<const TrainingSample<T>* const> batch,
                         HistNetParams<T>* grads, T loss_scale = T{1});

// clamp(first_depth + residual, 0, 1) at the feature resolution.
template <typename T>
[[nodiscard]] DepthMap infer(const HistNet<T>& net, const FeatureSet& f);

}  // namespace spadsr::nn
