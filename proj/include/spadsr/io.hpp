#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "spadsr/types.hpp"

namespace spadsr {

enum class Dtype : std::uint8_t { f32 = 0, u32 = 1 };

// N-d row-major array, the payload of an SPDT file.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::uint64_t> dims, std::vector<float> data);
  Tensor(std::vector<std::uint64_t> dims, std::vector<std::uint32_t> data);

  [[nodiscard]] Dtype dtype() const {
    return std::holds_alternative<std::vector<float>>(data_) ? Dtype::f32 : Dtype::u32;
  }
  [[nodiscard]] const std::vector<std::uint64_t>& dims() const { return dims_; }
  [[nodiscard]] std::uint64_t numel() const;

  // Throw DtypeMismatchError on the wrong alternative.
  [[nodiscard]] const std::vector<float>& f32() const;
  [[nodiscard]] const std::vector<std::uint32_t>& u32() const;

  bool operator==(const Tensor&) const = default;

 private:
  std::vector<std::uint64_t> dims_;
  std::variant<std::vector<float>, std::vector<std::uint32_t>> data_;
};

// SPDT container:
//   "SPDT" | version u16 LE (=1) | dtype u8 | ndim u8 | ndim x u64 LE | payload (LE)
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
[[nodiscard]] Tensor read_tensor(const std::filesystem::path& path);
// As read_tensor, but a file whose dtype differs from `expected` is a DtypeMismatchError.
[[nodiscard]] Tensor read_tensor(const std::filesystem::path& path, Dtype expected);

[[nodiscard]] std::uint64_t spdt_file_size(const std::vector<std::uint64_t>& dims, Dtype dtype);

// Cube <-> [H, W, T] u32 tensor.
[[nodiscard]] Tensor to_tensor(const HistogramCube& cube);
[[nodiscard]] HistogramCube cube_from_tensor(const Tensor& tensor);
void write_cube(const std::filesystem::path& path, const HistogramCube& cube);
[[nodiscard]] HistogramCube read_cube(const std::filesystem::path& path);

}  // namespace spadsr
