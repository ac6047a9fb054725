#pragma once

#include <cstddef>
#include <vector>

#include "spadsr/nn/histnet.hpp"

namespace spadsr::nn {

struct AdagradConfig {
  double learning_rate = 0.1;
  double l1_reg = 0.0;
  double accumulator_init = 0.1;
  void validate() const;
};

// Proximal Adagrad with l1 shrinkage:
//   G += g^2;  lr_t = lr / sqrt(G);  w' = w - lr_t g;
//   w = sign(w') max(|w'| - lr_t l1, 0)
template <typename T>
class ProximalAdagrad {
 public:
  ProximalAdagrad(const HistNetParams<T>& like, AdagradConfig cfg);

  void step(HistNetParams<T>& params, const HistNetParams<T>& grads);

  [[nodiscard]] std::size_t steps() const { return steps_; }
  [[nodiscard]] const std::vector<std::vector<double>>& accumulators() const { return accum_; }

 private:
  AdagradConfig cfg_;
  std::vector<std::vector<double>> accum_;
  std::size_t steps_ = 0;
};

}  // namespace spadsr::nn
