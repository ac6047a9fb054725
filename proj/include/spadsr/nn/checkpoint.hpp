#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "spadsr/nn/histnet.hpp"

namespace spadsr::nn {

struct Checkpoint {
  HistNetParams<float> params;
  std::size_t step = 0;
  std::string extra_json = "{}";  // free-form object stored under "config"; empty means {}
};

// One SPDT f32 file per tensor plus manifest.json (layer names, dims,
// width_scale, step).
void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt);
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace spadsr::nn
