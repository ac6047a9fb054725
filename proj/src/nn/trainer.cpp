#include "spadsr/nn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "spadsr/nn/adagrad.hpp"
#include "spadsr/poisson.hpp"

namespace spadsr::nn {

void TrainConfig::validate() const {
  if (batch_size == 0) throw InvalidArgument("batch size must be > 0");
  if (epochs == 0 && max_steps == 0) throw InvalidArgument("epochs must be > 0");
  if (jobs == 0) throw InvalidArgument("jobs must be > 0");
  AdagradConfig{learning_rate, l1_reg, accumulator_init}.validate();
}

std::size_t TrainConfig::total_steps(std::size_t n) const {
  if (max_steps > 0) return max_steps;
  return epochs * ((n + batch_size - 1) / batch_size);
}

namespace {

// Endless sequence of sample indices: one seeded permutation per epoch.
class IndexStream {
 public:
  IndexStream(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed) { reshuffle(); }

  std::size_t next() {
    if (pos_ == order_.size()) reshuffle();
    return order_[pos_++];
  }

 private:
  void reshuffle() {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    CounterRng rng(seed_, epoch_++);
    for (std::size_t i = n_; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next() % i);
      std::swap(order_[i - 1], order_[j]);
    }
    pos_ = 0;
  }

  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

void zero(HistNetParams<float>& p) {
  for (auto& t : p.tensors) std::fill(t.value.begin(), t.value.end(), 0.0f);
}

void add_into(HistNetParams<float>& acc, const HistNetParams<float>& g) {
  for (std::size_t k = 0; k < acc.tensors.size(); ++k) {
    auto& a = acc.tensors[k].value;
    const auto& b = g.tensors[k].value;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  }
}

}  // namespace

TrainResult train(const std::vector<TrainingSample<float>>& data, const TrainConfig& cfg, HistNetParams<float> init,
                  const ProgressFn& progress) {
  cfg.validate();
  if (data.empty()) throw InvalidArgument("training set is empty");

  HistNet<float> net(std::move(init));
  ProximalAdagrad<float> opt(net.params(), {cfg.learning_rate, cfg.l1_reg, cfg.accumulator_init});
  HistNetParams<float> grads = net.params().zeros_like();
  const std::size_t jobs = std::min(cfg.jobs, cfg.batch_size);
  std::vector<HistNetParams<float>> sample_grads(jobs, grads);
  std::vector<double> sample_loss(jobs);

  IndexStream stream(data.size(), cfg.seed);
  const std::size_t steps = cfg.total_steps(data.size());
  const float scale = 1.0f / static_cast<float>(cfg.batch_size);
  TrainResult result;
  result.loss_curve.reserve(steps);
  std::vector<std::size_t> batch(cfg.batch_size);

  for (std::size_t step = 0; step < steps; ++step) {
    for (auto& b : batch) b = stream.next();
    zero(grads);
    double loss = 0.0;
    for (std::size_t first = 0; first < batch.size(); first += jobs) {
      const std::size_t count = std::min(jobs, batch.size() - first);
      auto work = [&](std::size_t w) {
        zero(sample_grads[w]);
        const TrainingSample<float>* one[] = {&data[batch[first + w]]};
        sample_loss[w] = loss_and_gradient<float>(net, one, &sample_grads[w], scale);
      };
      if (count == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < count; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
      }
      for (std::size_t w = 0; w < count; ++w) {
        add_into(grads, sample_grads[w]);
        loss += sample_loss[w];
      }
    }
    loss /= static_cast<double>(batch.size());
    if (!std::isfinite(loss)) throw NumericalError("training loss is not finite at step " + std::to_string(step));
    result.loss_curve.push_back(loss);
    if (progress) progress(step, loss);
    opt.step(net.params(), grads);
  }
  result.params = net.params();
  return result;
}

}  // namespace spadsr::nn
