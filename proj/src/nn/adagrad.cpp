#include "spadsr/nn/adagrad.hpp"

#include <algorithm>
#include <cmath>

namespace spadsr::nn {

void AdagradConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be > 0");
  if (!(l1_reg >= 0.0)) throw InvalidArgument("l1 regularization must be >= 0");
  if (!(accumulator_init > 0.0)) throw InvalidArgument("accumulator init must be > 0");
}

template <typename T>
ProximalAdagrad<T>::ProximalAdagrad(const HistNetParams<T>& like, AdagradConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  accum_.reserve(like.tensors.size());
  for (const auto& t : like.tensors) accum_.emplace_back(t.value.size(), cfg_.accumulator_init);
}

template <typename T>
void ProximalAdagrad<T>::step(HistNetParams<T>& params, const HistNetParams<T>& grads) {
  if (params.tensors.size() != accum_.size() || grads.tensors.size() != accum_.size())
    throw DimensionError("optimizer state does not match parameters");
  const double lr = cfg_.learning_rate, l1 = cfg_.l1_reg;
  for (std::size_t k = 0; k < accum_.size(); ++k) {
    auto& w = params.tensors[k].value;
    const auto& g = grads.tensors[k].value;
    auto& G = accum_[k];
    if (w.size() != G.size() || g.size() != G.size()) throw DimensionError("optimizer state does not match parameters");
    for (std::size_t i = 0; i < G.size(); ++i) {
      const double gi = g[i];
      G[i] += gi * gi;
      const double lr_t = lr / std::sqrt(G[i]);
      double prox = static_cast<double>(w[i]) - lr_t * gi;
      if (l1 > 0.0) {
        const double mag = std::abs(prox) - lr_t * l1;
        prox = mag > 0.0 ? std::copysign(mag, prox) : 0.0;
      }
      w[i] = static_cast<T>(prox);
    }
  }
  ++steps_;
}

template class ProximalAdagrad<float>;
template class ProximalAdagrad<double>;

}  // namespace spadsr::nn
