#pragma once

#include <filesystem>

#include "spadsr/types.hpp"

namespace spadsr {

// Binary P5 PGM, 8- or 16-bit. Samples are divided by the header maxval.
[[nodiscard]] IntensityMap read_pgm(const std::filesystem::path& path);
// Values are clamped to [0,1] and quantized to `maxval` (255 or 65535).
void write_pgm(const std::filesystem::path& path, const IntensityMap& image, int maxval = 255);

// Single-channel PFM ("Pf"). Non-finite pixels are repaired with the median
// of their finite 3x3 neighbours; pixels with no finite neighbour are left
// invalid (value 0).
[[nodiscard]] DepthMap read_pfm(const std::filesystem::path& path);
// Writes little-endian, rows bottom-to-top as the format requires. Invalid
// pixels are written as their stored value (0).
void write_pfm(const std::filesystem::path& path, const Grid<double>& values);
inline void write_pfm(const std::filesystem::path& path, const DepthMap& depth) { write_pfm(path, depth.values); }

// 8-bit preview: [lo, hi] mapped linearly onto [0, 255].
void write_depth_preview(const std::filesystem::path& path, const DepthMap& depth, double lo = 0.0, double hi = 1.0);

// Single 3x3 median pass over non-finite samples, the repair step of read_pfm.
[[nodiscard]] DepthMap repair_non_finite(const Grid<double>& raw);

// Min-max rescale of the valid pixels into [0,1]. Constant maps become 0.5.
[[nodiscard]] DepthMap normalize_to_unit(const DepthMap& depth);

}  // namespace spadsr
