#include "spadsr/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>

namespace spadsr {

static_assert(std::endian::native == std::endian::little, "SPDT I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'S', 'P', 'D', 'T'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kFixedHeader = 8;

std::uint64_t product(const std::vector<std::uint64_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::uint64_t{1}, std::multiplies<>());
}

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

Tensor::Tensor(std::vector<std::uint64_t> dims, std::vector<float> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (product(dims_) != std::get<0>(data_).size()) throw DimensionError("tensor dims do not match payload length");
}

Tensor::Tensor(std::vector<std::uint64_t> dims, std::vector<std::uint32_t> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (product(dims_) != std::get<1>(data_).size()) throw DimensionError("tensor dims do not match payload length");
}

std::uint64_t Tensor::numel() const { return product(dims_); }

const std::vector<float>& Tensor::f32() const {
  if (dtype() != Dtype::f32) throw DtypeMismatchError("tensor holds u32, f32 requested");
  return std::get<0>(data_);
}

const std::vector<std::uint32_t>& Tensor::u32() const {
  if (dtype() != Dtype::u32) throw DtypeMismatchError("tensor holds f32, u32 requested");
  return std::get<1>(data_);
}

std::uint64_t spdt_file_size(const std::vector<std::uint64_t>& dims, Dtype) {
  return kFixedHeader + 8 * dims.size() + 4 * product(dims);
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  if (tensor.dims().size() > 255) throw DimensionError("SPDT supports at most 255 dims");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint16_t>(out, kVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.dtype()));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.dims().size()));
  for (auto d : tensor.dims()) put<std::uint64_t>(out, d);
  if (tensor.dtype() == Dtype::f32) {
    const auto& v = tensor.f32();
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 4));
  } else {
    const auto& v = tensor.u32();
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 4));
  }
  if (!out) throw Error("write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < kMagic.size() || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
    throw BadMagicError("not an SPDT file (bad magic): " + path.string());
  if (bytes.size() < kFixedHeader) throw TruncatedError("truncated SPDT header: " + path.string());

  std::uint16_t version = 0;
  std::memcpy(&version, bytes.data() + 4, 2);
  if (version != kVersion) throw UnsupportedFormatError("unsupported SPDT version " + std::to_string(version));
  const auto dtype_code = static_cast<std::uint8_t>(bytes[6]);
  if (dtype_code > 1) throw DtypeMismatchError("unknown SPDT dtype code " + std::to_string(dtype_code));
  const auto ndim = static_cast<std::uint8_t>(bytes[7]);

  const std::size_t header = kFixedHeader + 8 * std::size_t{ndim};
  if (bytes.size() < header) throw TruncatedError("truncated SPDT extents: " + path.string());
  std::vector<std::uint64_t> dims(ndim);
  std::memcpy(dims.data(), bytes.data() + kFixedHeader, 8 * std::size_t{ndim});

  const std::uint64_t n = product(dims);
  if (bytes.size() - header < 4 * n) throw TruncatedError("truncated SPDT payload: " + path.string());
  if (bytes.size() - header > 4 * n) throw FormatError("trailing bytes after SPDT payload: " + path.string());

  const char* payload = bytes.data() + header;
  if (dtype_code == 0) {
    std::vector<float> v(n);
    std::memcpy(v.data(), payload, 4 * n);
    return Tensor(std::move(dims), std::move(v));
  }
  std::vector<std::uint32_t> v(n);
  std::memcpy(v.data(), payload, 4 * n);
  return Tensor(std::move(dims), std::move(v));
}

Tensor read_tensor(const std::filesystem::path& path, Dtype expected) {
  Tensor t = read_tensor(path);
  if (t.dtype() != expected) throw DtypeMismatchError("unexpected SPDT dtype in " + path.string());
  return t;
}

Tensor to_tensor(const HistogramCube& cube) {
  return Tensor({cube.height(), cube.width(), cube.bins()}, cube.counts());
}

HistogramCube cube_from_tensor(const Tensor& tensor) {
  const auto& d = tensor.dims();
  if (d.size() != 3) throw DimensionError("histogram tensor must be 3-D [H, W, T]");
  return HistogramCube(d[0], d[1], d[2], tensor.u32());
}

void write_cube(const std::filesystem::path& path, const HistogramCube& cube) { write_tensor(path, to_tensor(cube)); }

HistogramCube read_cube(const std::filesystem::path& path) { return cube_from_tensor(read_tensor(path, Dtype::u32)); }

}  // namespace spadsr
