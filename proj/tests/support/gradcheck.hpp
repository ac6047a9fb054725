#pragma once

// Central-difference gradient check for HistNet in double precision.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spadsr/nn/histnet.hpp"

namespace testing_support {

struct TensorCheck {
  std::string name;
  double worst_rel = 0.0;
  std::size_t checked = 0;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  double worst_rel = 0.0;
  std::size_t kinks_skipped = 0;
};

inline double rel_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

// Checks `per_tensor` random coordinates of every tensor (all of them when the
// tensor is smaller). A coordinate whose one-sided differences disagree sits on
// a ReLU or |.| kink within +-h, where no finite difference is meaningful; it
// is replaced by another draw.
inline GradCheckReport gradient_check(spadsr::nn::HistNet<double>& net, const spadsr::nn::TrainingSample<double>& s,
                                      std::size_t per_tensor, std::uint64_t seed, double h = 1e-6) {
  using namespace spadsr::nn;
  const TrainingSample<double>* batch[] = {&s};
  HistNetParams<double> grads = net.params().zeros_like();
  const double l0 = loss_and_gradient<double>(net, batch, &grads);
  std::mt19937_64 rng(seed);
  GradCheckReport rep;
  for (std::size_t k = 0; k < net.params().tensors.size(); ++k) {
    auto& t = net.params().tensors[k];
    TensorCheck tc{t.name};
    const std::size_t n = t.value.size();
    const std::size_t want = std::min(per_tensor, n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t q = 0; q < n && tc.checked < want; ++q) {
      const std::size_t i = order[q];
      const double w0 = t.value[i];
      t.value[i] = w0 + h;
      const double lp = loss_and_gradient<double>(net, batch, nullptr);
      t.value[i] = w0 - h;
      const double lm = loss_and_gradient<double>(net, batch, nullptr);
      t.value[i] = w0;
      const double fwd = (lp - l0) / h, bwd = (l0 - lm) / h;
      if (rel_error(fwd, bwd) > 1e-4) {
        ++rep.kinks_skipped;
        continue;
      }
      const double err = rel_error((lp - lm) / (2 * h), grads.tensors[k].value[i]);
      tc.worst_rel = std::max(tc.worst_rel, err);
      ++tc.checked;
    }
    rep.worst_rel = std::max(rep.worst_rel, tc.worst_rel);
    rep.tensors.push_back(tc);
  }
  return rep;
}

}  // namespace testing_support
