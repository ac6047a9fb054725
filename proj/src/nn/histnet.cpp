#include "spadsr/nn/histnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spadsr/error.hpp"
#include "spadsr/poisson.hpp"

namespace spadsr::nn {

std::array<std::size_t, 5> histnet_widths(double width_scale) {
  if (!(width_scale > 0.0) || width_scale > 1.0) throw InvalidArgument("width_scale must be in (0, 1]");
  constexpr std::array<double, 5> canonical{64, 128, 256, 512, 1024};
  std::array<std::size_t, 5> w{};
  for (std::size_t k = 0; k < 5; ++k)
    w[k] = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(canonical[k] * width_scale)));
  return w;
}

std::vector<LayerSpec> histnet_layers(double width_scale) {
  const auto c = histnet_widths(width_scale);
  std::vector<LayerSpec> L;
  L.push_back({"enc0.conv1", LayerKind::conv3x3, 2, c[0]});
  L.push_back({"enc0.conv2", LayerKind::conv3x3, c[0], c[0]});
  for (std::size_t l = 1; l <= 4; ++l) {
    const std::string lvl = std::to_string(l);
    L.push_back({"guide" + lvl + ".conv", LayerKind::conv3x3, 1, c[l - 1]});
    L.push_back({"enc" + lvl + ".conv1", LayerKind::conv3x3, 2 * c[l - 1], c[l]});
    L.push_back({"enc" + lvl + ".conv2", LayerKind::conv3x3, c[l], c[l]});
  }
  for (std::size_t l = 1; l <= 4; ++l)
    L.push_back({"int" + std::to_string(l) + ".conv", LayerKind::conv3x3, l == 1 ? 1 : c[l - 2], c[l - 1]});
  for (std::size_t l = 0; l < 4; ++l) {
    const std::string lvl = std::to_string(5 + l);
    const std::size_t from = c[4 - l], to = c[3 - l];
    L.push_back({"dec" + lvl + ".up", LayerKind::deconv_up2, from, to});
    L.push_back({"dec" + lvl + ".conv1", LayerKind::conv3x3, 3 * to, to});
    L.push_back({"dec" + lvl + ".conv2", LayerKind::conv3x3, to, to});
  }
  L.push_back({"out.conv", LayerKind::conv_out, c[0], 1});
  return L;
}

template <typename T>
std::size_t HistNetParams<T>::count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.value.size();
  return n;
}

template <typename T>
HistNetParams<T> HistNetParams<T>::zeros_like() const {
  HistNetParams out = *this;
  for (auto& t : out.tensors) std::fill(t.value.begin(), t.value.end(), T{});
  return out;
}

template <typename T>
HistNetParams<T> init_histnet(double width_scale, std::uint64_t seed, bool zero_output) {
  HistNetParams<T> p;
  p.width_scale = width_scale;
  std::uint64_t stream = 0;
  for (const auto& layer : histnet_layers(width_scale)) {
    Parameter<T> w, b;
    w.name = layer.name + ".weight";
    b.name = layer.name + ".bias";
    if (layer.kind == LayerKind::deconv_up2) {
      w.dims = {layer.in_ch, layer.out_ch, 3, 3};
    } else {
      w.dims = {layer.out_ch, layer.in_ch, 3, 3};
    }
    b.dims = {layer.out_ch};
    // A stride-2 transposed conv feeds each output pixel from ~9/4 taps per input channel.
    const double fan_in = layer.kind == LayerKind::deconv_up2 ? 9.0 * layer.in_ch / 4.0 : 9.0 * layer.in_ch;
    const double limit = std::sqrt(6.0 / fan_in);
    CounterRng rng(seed, stream++);
    w.value.resize(9 * layer.in_ch * layer.out_ch);
    for (T& v : w.value) v = static_cast<T>((2.0 * rng.uniform() - 1.0) * limit);
    if (zero_output && layer.kind == LayerKind::conv_out) std::fill(w.value.begin(), w.value.end(), T{});
    b.value.assign(layer.out_ch, T{});
    p.tensors.push_back(std::move(w));
    p.tensors.push_back(std::move(b));
  }
  return p;
}

template <typename T, typename U>
HistNetParams<T> convert_params(const HistNetParams<U>& p) {
  HistNetParams<T> out;
  out.width_scale = p.width_scale;
  for (const auto& t : p.tensors) {
    Parameter<T> c{t.name, t.dims, {}};
    c.value.assign(t.value.begin(), t.value.end());
    out.tensors.push_back(std::move(c));
  }
  return out;
}

namespace {

template <typename T>
Blob<T> to_blob(const DepthMap& d) {
  Blob<T> b(1, d.height(), d.width());
  for (std::size_t k = 0; k < b.size(); ++k) b.data[k] = static_cast<T>(d.values.data[k]);
  return b;
}

}  // namespace

template <typename T>
NetInput<T> make_input(const FeatureSet& f) {
  const std::size_t R_h = f.first_depth.height(), R_w = f.first_depth.width();
  if (R_h % 16 || R_w % 16) throw DimensionError("network input size must be a multiple of 16");
  if (!f.second_depth.values.same_shape(f.first_depth.values) || f.intensity.height() != R_h ||
      f.intensity.width() != R_w)
    throw DimensionError("first/second depth and intensity must share dims");
  NetInput<T> in;
  in.main = Blob<T>(2, R_h, R_w);
  for (std::size_t k = 0; k < R_h * R_w; ++k) {
    in.main.data[k] = static_cast<T>(f.first_depth.values.data[k]);
    in.main.data[R_h * R_w + k] = static_cast<T>(f.second_depth.values.data[k]);
  }
  for (int s = 1; s <= 4; ++s) {
    const DepthMap& d = f.scale(s);
    if (d.height() != R_h >> s || d.width() != R_w >> s)
      throw DimensionError("depth feature D" + std::to_string(s) + " has the wrong size");
    in.depth_scales[static_cast<std::size_t>(s - 1)] = to_blob<T>(d);
  }
  in.intensity = Blob<T>(1, R_h, R_w);
  for (std::size_t k = 0; k < R_h * R_w; ++k) in.intensity.data[k] = static_cast<T>(f.intensity.values.data[k]);
  return in;
}

template <typename T>
HistNet<T>::HistNet(HistNetParams<T> params) : params_(std::move(params)) {
  widths_ = histnet_widths(params_.width_scale);
  layers_ = histnet_layers(params_.width_scale);
  if (params_.tensors.size() != 2 * layers_.size()) throw DimensionError("parameter set does not match HistNet layout");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& w = params_.tensors[2 * i];
    const auto& b = params_.tensors[2 * i + 1];
    if (w.value.size() != 9 * layers_[i].in_ch * layers_[i].out_ch || b.value.size() != layers_[i].out_ch)
      throw DimensionError("parameter '" + w.name + "' has the wrong size for width_scale");
  }
  enc1_[0] = index_of("enc0.conv1");
  enc2_[0] = index_of("enc0.conv2");
  for (std::size_t l = 1; l <= 4; ++l) {
    const std::string lvl = std::to_string(l);
    guide_[l - 1] = index_of("guide" + lvl + ".conv");
    enc1_[l] = index_of("enc" + lvl + ".conv1");
    enc2_[l] = index_of("enc" + lvl + ".conv2");
    int_[l - 1] = index_of("int" + lvl + ".conv");
  }
  for (std::size_t l = 0; l < 4; ++l) {
    const std::string lvl = std::to_string(5 + l);
    up_[l] = index_of("dec" + lvl + ".up");
    dec1_[l] = index_of("dec" + lvl + ".conv1");
    dec2_[l] = index_of("dec" + lvl + ".conv2");
  }
  out_ = index_of("out.conv");
}

template <typename T>
std::size_t HistNet<T>::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < layers_.size(); ++i)
    if (layers_[i].name == name) return i;
  throw std::logic_error("unknown layer " + name);
}

template <typename T>
void HistNet<T>::conv(std::size_t layer, const Blob<T>& in, Blob<T>& out, bool relu) const {
  if (in.c != layers_[layer].in_ch) throw std::logic_error("channel mismatch entering " + layers_[layer].name);
  conv3x3_forward<T>(in, params_.tensors[2 * layer].value, params_.tensors[2 * layer + 1].value,
                     layers_[layer].out_ch, out);
  if (relu) relu_inplace(out);
}

template <typename T>
void HistNet<T>::conv_back(std::size_t layer, const Blob<T>& in, const Blob<T>& out, Blob<T>& dout, bool relu,
                           HistNetParams<T>& grads, Blob<T>* din) const {
  if (relu) relu_backward_inplace(out, dout);
  conv3x3_backward<T>(in, dout, params_.tensors[2 * layer].value, grads.tensors[2 * layer].value,
                      grads.tensors[2 * layer + 1].value, din);
}

template <typename T>
void HistNet<T>::deconv(std::size_t layer, const Blob<T>& in, Blob<T>& out) const {
  if (in.c != layers_[layer].in_ch) throw std::logic_error("channel mismatch entering " + layers_[layer].name);
  deconv_up2_forward<T>(in, params_.tensors[2 * layer].value, params_.tensors[2 * layer + 1].value,
                        layers_[layer].out_ch, out);
  relu_inplace(out);
}

template <typename T>
void HistNet<T>::deconv_back(std::size_t layer, const Blob<T>& in, const Blob<T>& out, Blob<T>& dout,
                             HistNetParams<T>& grads, Blob<T>* din) const {
  relu_backward_inplace(out, dout);
  deconv_up2_backward<T>(in, dout, params_.tensors[2 * layer].value, grads.tensors[2 * layer].value,
                         grads.tensors[2 * layer + 1].value, din);
}

namespace {

void require_same_plane(std::size_t h1, std::size_t w1, std::size_t h2, std::size_t w2, const char* where) {
  if (h1 != h2 || w1 != w2) throw std::logic_error(std::string("spatial mismatch at ") + where);
}

}  // namespace

template <typename T>
Blob<T> HistNet<T>::forward(const NetInput<T>& in, ForwardCache<T>* cache) const {
  ForwardCache<T> local;
  ForwardCache<T>& c = cache ? *cache : local;
  c.input = in;
  if (in.main.h % 16 || in.main.w % 16) throw DimensionError("network input size must be a multiple of 16");

  conv(enc1_[0], c.input.main, c.enc_a[0], true);
  conv(enc2_[0], c.enc_a[0], c.enc[0], true);
  for (std::size_t l = 1; l <= 4; ++l) {
    maxpool2x2_forward(c.enc[l - 1], c.pooled[l - 1], c.pool_idx[l - 1]);
    conv(guide_[l - 1], c.input.depth_scales[l - 1], c.guide[l - 1], true);
    require_same_plane(c.pooled[l - 1].h, c.pooled[l - 1].w, c.guide[l - 1].h, c.guide[l - 1].w, "depth guidance");
    const Blob<T>* parts[] = {&c.pooled[l - 1], &c.guide[l - 1]};
    concat_channels<T>(parts, c.cat[l - 1]);
    conv(enc1_[l], c.cat[l - 1], c.enc_a[l], true);
    conv(enc2_[l], c.enc_a[l], c.enc[l], true);
  }

  const Blob<T>* x = &c.input.intensity;
  for (std::size_t l = 0; l < 4; ++l) {
    conv(int_[l], *x, c.int_conv[l], true);
    if (l < 3) {
      maxpool2x2_forward(c.int_conv[l], c.int_pool[l], c.int_pool_idx[l]);
      x = &c.int_pool[l];
    }
  }

  for (std::size_t l = 0; l < 4; ++l) {
    const Blob<T>& src = l == 0 ? c.enc[4] : c.dec[l - 1];
    deconv(up_[l], src, c.up[l]);
    const Blob<T>& skip = c.enc[3 - l];
    const Blob<T>& guide = c.int_conv[3 - l];
    require_same_plane(c.up[l].h, c.up[l].w, skip.h, skip.w, "skip connection");
    require_same_plane(c.up[l].h, c.up[l].w, guide.h, guide.w, "intensity guidance");
    const Blob<T>* parts[] = {&c.up[l], &skip, &guide};
    concat_channels<T>(parts, c.dcat[l]);
    conv(dec1_[l], c.dcat[l], c.dec_a[l], true);
    conv(dec2_[l], c.dec_a[l], c.dec[l], true);
  }

  conv(out_, c.dec[3], c.residual, false);
  return c.residual;
}

template <typename T>
void HistNet<T>::backward(const ForwardCache<T>& c, const Blob<T>& dresidual, HistNetParams<T>& grads) const {
  std::array<Blob<T>, 5> g_enc;
  for (std::size_t l = 0; l < 5; ++l) g_enc[l].reshape(c.enc[l].c, c.enc[l].h, c.enc[l].w);
  std::array<Blob<T>, 4> g_int;
  for (std::size_t l = 0; l < 4; ++l) g_int[l].reshape(c.int_conv[l].c, c.int_conv[l].h, c.int_conv[l].w);

  Blob<T> g_dec, tmp, g_cat;
  Blob<T> dres = dresidual;
  conv_back(out_, c.dec[3], c.residual, dres, false, grads, &g_dec);

  for (std::size_t l = 4; l-- > 0;) {
    conv_back(dec2_[l], c.dec_a[l], c.dec[l], g_dec, true, grads, &tmp);
    conv_back(dec1_[l], c.dcat[l], c.dec_a[l], tmp, true, grads, &g_cat);
    Blob<T> g_up(c.up[l].c, c.up[l].h, c.up[l].w);
    accumulate_slice(g_cat, 0, g_up);
    accumulate_slice(g_cat, c.up[l].c, g_enc[3 - l]);
    accumulate_slice(g_cat, c.up[l].c + c.enc[3 - l].c, g_int[3 - l]);
    const Blob<T>& src = l == 0 ? c.enc[4] : c.dec[l - 1];
    Blob<T> g_src;
    deconv_back(up_[l], src, c.up[l], g_up, grads, &g_src);
    if (l == 0) {
      for (std::size_t k = 0; k < g_src.size(); ++k) g_enc[4].data[k] += g_src.data[k];
    } else {
      g_dec = std::move(g_src);
    }
  }

  for (std::size_t l = 4; l >= 1; --l) {
    conv_back(enc2_[l], c.enc_a[l], c.enc[l], g_enc[l], true, grads, &tmp);
    conv_back(enc1_[l], c.cat[l - 1], c.enc_a[l], tmp, true, grads, &g_cat);
    Blob<T> g_pool(c.pooled[l - 1].c, c.pooled[l - 1].h, c.pooled[l - 1].w);
    Blob<T> g_guide(c.guide[l - 1].c, c.guide[l - 1].h, c.guide[l - 1].w);
    accumulate_slice(g_cat, 0, g_pool);
    accumulate_slice(g_cat, g_pool.c, g_guide);
    maxpool2x2_backward(g_pool, c.pool_idx[l - 1], g_enc[l - 1]);
    conv_back(guide_[l - 1], c.input.depth_scales[l - 1], c.guide[l - 1], g_guide, true, grads, nullptr);
  }
  conv_back(enc2_[0], c.enc_a[0], c.enc[0], g_enc[0], true, grads, &tmp);
  conv_back(enc1_[0], c.input.main, c.enc_a[0], tmp, true, grads, nullptr);

  for (std::size_t l = 4; l-- > 0;) {
    if (l == 0) {
      conv_back(int_[0], c.input.intensity, c.int_conv[0], g_int[0], true, grads, nullptr);
    } else {
      Blob<T> g_in;
      conv_back(int_[l], c.int_pool[l - 1], c.int_conv[l], g_int[l], true, grads, &g_in);
      maxpool2x2_backward(g_in, c.int_pool_idx[l - 1], g_int[l - 1]);
    }
  }
}

template <typename T>
double l1_loss(std::span<const Blob<T>> residuals, std::span<const Blob<T>> first_depths,
               std::span<const Blob<T>> targets) {
  if (residuals.size() != first_depths.size() || residuals.size() != targets.size() || residuals.empty())
    throw DimensionError("loss batch sizes differ or are empty");
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t m = 0; m < residuals.size(); ++m) {
    const auto& r = residuals[m];
    if (r.size() != first_depths[m].size() || r.size() != targets[m].size())
      throw DimensionError("loss maps differ in size");
    for (std::size_t k = 0; k < r.size(); ++k)
      acc += std::abs(static_cast<double>(r.data[k]) + first_depths[m].data[k] - targets[m].data[k]);
    n = r.size();
  }
  return acc / (static_cast<double>(residuals.size()) * static_cast<double>(n));
}

template <typename T>
TrainingSample<T> make_sample(const FeatureSet& f, const DepthMap& depth_gt) {
  TrainingSample<T> s;
  s.input = make_input<T>(f);
  if (!depth_gt.values.same_shape(f.first_depth.values)) throw DimensionError("ground truth differs from feature size");
  s.target = to_blob<T>(depth_gt);
  s.mask = Blob<T>(1, depth_gt.height(), depth_gt.width());
  for (std::size_t k = 0; k < s.mask.size(); ++k) s.mask.data[k] = depth_gt.valid.data[k] ? T{1} : T{};
  return s;
}

template <typename T>
double loss_and_gradient(const HistNet<T>& net, std::span<const TrainingSample<T>* const> batch,
                         HistNetParams<T>* grads, T loss_scale) {
  if (batch.empty()) throw InvalidArgument("empty batch");
  ForwardCache<T> cache;
  double total = 0.0;
  const std::size_t N = batch[0]->target.size();
  const double norm = 1.0 / (static_cast<double>(batch.size()) * static_cast<double>(N));
  for (const TrainingSample<T>* s : batch) {
    if (s->target.size() != N) throw DimensionError("batch samples must share a size");
    const Blob<T> residual = net.forward(s->input, grads ? &cache : nullptr);
    Blob<T> dres(1, residual.h, residual.w);
    const T* first = s->input.main.channel(0);
    for (std::size_t k = 0; k < N; ++k) {
      if (s->mask.data[k] == T{}) continue;
      const double e = static_cast<double>(residual.data[k]) + first[k] - s->target.data[k];
      total += std::abs(e);
      const double sign = e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
      dres.data[k] = static_cast<T>(sign * norm * static_cast<double>(loss_scale));
    }
    if (grads) net.backward(cache, dres, *grads);
  }
  return total * norm;
}

template <typename T>
DepthMap infer(const HistNet<T>& net, const FeatureSet& f) {
  const NetInput<T> in = make_input<T>(f);
  const Blob<T> residual = net.forward(in, nullptr);
  DepthMap out(f.first_depth.height(), f.first_depth.width());
  for (std::size_t k = 0; k < residual.size(); ++k)
    out.values.data[k] = std::clamp(f.first_depth.values.data[k] + static_cast<double>(residual.data[k]), 0.0, 1.0);
  return out;
}

#define SPADSR_INSTANTIATE(T)                                                                                     \
  template struct HistNetParams<T>;                                                                               \
  template HistNetParams<T> init_histnet<T>(double, std::uint64_t, bool);                                         \
  template NetInput<T> make_input<T>(const FeatureSet&);                                                          \
  template class HistNet<T>;                                                                                      \
  template double l1_loss<T>(std::span<const Blob<T>>, std::span<const Blob<T>>, std::span<const Blob<T>>);      \
  template TrainingSample<T> make_sample<T>(const FeatureSet&, const DepthMap&);                                  \
  template double loss_and_gradient<T>(const HistNet<T>&, std::span<const TrainingSample<T>* const>,              \
                                       HistNetParams<T>*, T);                                                     \
  template DepthMap infer<T>(const HistNet<T>&, const FeatureSet&);

SPADSR_INSTANTIATE(float)
SPADSR_INSTANTIATE(double)
#undef SPADSR_INSTANTIATE

template HistNetParams<double> convert_params<double, float>(const HistNetParams<float>&);
template HistNetParams<float> convert_params<float, double>(const HistNetParams<double>&);
template HistNetParams<float> convert_params<float, float>(const HistNetParams<float>&);
template HistNetParams<double> convert_params<double, double>(const HistNetParams<double>&);

}  // namespace spadsr::nn
