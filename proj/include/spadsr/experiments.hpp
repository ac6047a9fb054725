#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spadsr/baselines.hpp"
#include "spadsr/features.hpp"
#include "spadsr/nn/histnet.hpp"
#include "spadsr/simulator.hpp"

namespace spadsr {

// Reconstructions from one measurement. nn and guided work at any size;
// histnet pads to a multiple of 16 internally and crops back.
[[nodiscard]] DepthMap reconstruct_nn(const HistogramCube& cube, const PipelineConfig& cfg);
[[nodiscard]] DepthMap reconstruct_guided(const HistogramCube& cube, const IntensityMap& intensity,
                                          const PipelineConfig& cfg, const GuidedFilterParams& gf);
[[nodiscard]] DepthMap reconstruct_histnet(const nn::HistNet<float>& net, const HistogramCube& cube,
                                           const IntensityMap& intensity, const PipelineConfig& cfg);

struct DatasetConfig {
  std::size_t scenes = 8;
  std::size_t scene_height = 96;
  std::size_t scene_width = 96;
  std::size_t patch = 32;
  std::size_t stride = 16;
  bool augment = true;
  std::size_t bins = 16;
  NoiseSpec noise;  // noise.seed seeds scene geometry and photon draws
  PipelineConfig pipeline;
  void validate() const;
};

// Ground-truth scene pairs used for training: synthetic scenes (or the given
// ones), cut into patches and optionally augmented.
[[nodiscard]] std::vector<ScenePair> training_scenes(const DatasetConfig& cfg,
                                                     const std::vector<ScenePair>& provided = {});

// Simulates and featurizes every scene; sample k uses photon stream seed
// mix(noise.seed, k).
[[nodiscard]] std::vector<nn::TrainingSample<float>> build_training_set(const std::vector<ScenePair>& scenes,
                                                                        const DatasetConfig& cfg);

struct SweepConfig {
  std::vector<double> ppp{1.0, 2.0, 4.0, 8.0};
  std::vector<double> sbr{0.005, 0.01, 0.02, 0.04};
  std::size_t scenes = 4;
  std::size_t scene_height = 64;
  std::size_t scene_width = 64;
  std::size_t bins = 16;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;  // cells evaluated in parallel; results do not depend on it
  PipelineConfig pipeline;
};

struct SweepCell {
  double ppp = 0.0, sbr = 0.0;
  double rmse = 0.0;        // HistNet, mean over scenes
  double ade = 0.0;
  double rmse_first = 0.0;  // nearest-neighbour input, for reference
};

// Row-major over (ppp, sbr).
[[nodiscard]] std::vector<SweepCell> run_sweep(const nn::HistNet<float>& net, const SweepConfig& cfg);

}  // namespace spadsr
