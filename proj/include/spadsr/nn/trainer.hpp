#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "spadsr/nn/histnet.hpp"

namespace spadsr::nn {

struct TrainConfig {
  std::size_t batch_size = 64;
  double learning_rate = 0.1;
  std::size_t epochs = 2000;
  double l1_reg = 0.0;
  double accumulator_init = 0.1;
  std::uint64_t seed = 0;
  std::size_t max_steps = 0;  // overrides epochs when non-zero
  std::size_t jobs = 1;
  void validate() const;
  // Optimizer steps implied by the config for a dataset of n samples.
  [[nodiscard]] std::size_t total_steps(std::size_t n) const;
};

struct TrainResult {
  HistNetParams<float> params;
  std::vector<double> loss_curve;  // batch loss before each update
};

using ProgressFn = std::function<void(std::size_t step, double loss)>;

// Proximal-Adagrad training on `data`. Batches are drawn from per-epoch
// permutations seeded by cfg.seed. Per-sample gradients are summed in batch
// order, so the result does not depend on cfg.jobs. A non-finite loss throws
// NumericalError.
[[nodiscard]] TrainResult train(const std::vector<TrainingSample<float>>& data, const TrainConfig& cfg,
                                HistNetParams<float> init, const ProgressFn& progress = {});

}  // namespace spadsr::nn
