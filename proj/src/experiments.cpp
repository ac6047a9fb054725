#include "spadsr/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "spadsr/image_ops.hpp"
#include "spadsr/metrics.hpp"
#include "spadsr/poisson.hpp"
#include "spadsr/scenes.hpp"

namespace spadsr {

namespace {

// A reconstruction is a dense estimate: every pixel, including the 0 written
// for degenerate histograms, counts in the metrics (as it would once saved).
DepthMap dense(DepthMap d) {
  std::fill(d.valid.data.begin(), d.valid.data.end(), 1);
  return d;
}

}  // namespace

DepthMap reconstruct_nn(const HistogramCube& cube, const PipelineConfig& cfg) { return dense(first_depth(cube, cfg)); }

DepthMap reconstruct_guided(const HistogramCube& cube, const IntensityMap& intensity, const PipelineConfig& cfg,
                            const GuidedFilterParams& gf) {
  return dense(guided_filter(first_depth(cube, cfg), intensity, gf));
}

DepthMap reconstruct_histnet(const nn::HistNet<float>& net, const HistogramCube& cube, const IntensityMap& intensity,
                             const PipelineConfig& cfg) {
  const PaddedInput padded = pad_for_features(cube, intensity, cfg.upsample_factor);
  const FeatureSet f = build_features(padded.cube, padded.intensity, cfg);
  return crop_top_left(nn::infer(net, f), padded.target_height, padded.target_width);
}

void DatasetConfig::validate() const {
  noise.validate();
  pipeline.validate();
  const std::size_t s = pipeline.upsample_factor;
  if (scenes == 0) throw InvalidArgument("dataset needs at least one scene");
  if (patch == 0 || stride == 0) throw InvalidArgument("patch size and stride must be > 0");
  if (patch % 16 || patch % s) throw InvalidArgument("patch size must be a multiple of 16");
  if (patch > scene_height || patch > scene_width) throw InvalidArgument("patch larger than scene");
  if (bins < 3) throw InvalidArgument("bins must be >= 3");
}

std::vector<ScenePair> training_scenes(const DatasetConfig& cfg, const std::vector<ScenePair>& provided) {
  cfg.validate();
  std::vector<ScenePair> whole = provided;
  if (whole.empty()) {
    for (std::size_t k = 0; k < cfg.scenes; ++k)
      whole.push_back(synthetic_scene(cfg.scene_height, cfg.scene_width, mix64(cfg.noise.seed ^ (0x9e37ull + k))));
  }
  std::vector<ScenePair> out;
  for (const auto& scene : whole) {
    for (auto& p : make_patches(scene, cfg.patch, cfg.stride)) {
      if (!cfg.augment) {
        out.push_back(std::move(p));
        continue;
      }
      for (auto& a : augment(p)) out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<nn::TrainingSample<float>> build_training_set(const std::vector<ScenePair>& scenes,
                                                          const DatasetConfig& cfg) {
  cfg.validate();
  std::vector<nn::TrainingSample<float>> out;
  out.reserve(scenes.size());
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    NoiseSpec spec = cfg.noise;
    spec.seed = mix64(cfg.noise.seed + 0x51ed27ull * (k + 1));
    const Measurement m = simulate(scenes[k], cfg.bins, spec, cfg.pipeline.upsample_factor);
    out.push_back(nn::make_sample<float>(build_features(m, cfg.pipeline), scenes[k].depth_gt));
  }
  return out;
}

std::vector<SweepCell> run_sweep(const nn::HistNet<float>& net, const SweepConfig& cfg) {
  if (cfg.ppp.empty() || cfg.sbr.empty() || cfg.scenes == 0) throw InvalidArgument("empty sweep grid");
  std::vector<ScenePair> scenes;
  for (std::size_t k = 0; k < cfg.scenes; ++k)
    scenes.push_back(synthetic_scene(cfg.scene_height, cfg.scene_width, mix64(cfg.seed ^ (0xa11ceull + k))));

  std::vector<SweepCell> cells;
  for (double ppp : cfg.ppp)
    for (double sbr : cfg.sbr) cells.push_back({ppp, sbr});

  auto evaluate = [&](SweepCell& cell) {
    for (std::size_t k = 0; k < scenes.size(); ++k) {
      NoiseSpec spec;
      spec.ppp = cell.ppp;
      spec.sbr = cell.sbr;
      spec.sigma_bins = cfg.pipeline.irf_sigma;
      // Same photon streams in every cell, so cells differ only by noise level.
      spec.seed = mix64(cfg.seed + 0x5eedull * (k + 1));
      const Measurement m = simulate(scenes[k], cfg.bins, spec, cfg.pipeline.upsample_factor);
      const DepthMap pred = reconstruct_histnet(net, m.histogram, m.intensity, cfg.pipeline);
      cell.rmse += rmse(pred, scenes[k].depth_gt);
      cell.ade += ade(pred, scenes[k].depth_gt).mean;
      cell.rmse_first += rmse(reconstruct_nn(m.histogram, cfg.pipeline), scenes[k].depth_gt);
    }
    const double n = static_cast<double>(scenes.size());
    cell.rmse /= n;
    cell.ade /= n;
    cell.rmse_first /= n;
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) evaluate(cells[i]);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

}  // namespace spadsr
