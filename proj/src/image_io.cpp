#include "spadsr/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace spadsr {
namespace {

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Netpbm-style header tokenizer: whitespace separated, '#' comments to EOL.
class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<char>& bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) out += bytes_[pos_++];
    if (out.empty()) throw TruncatedError("truncated image header");
    return out;
  }

  long integer() {
    const std::string t = token();
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) throw FormatError("malformed header field: " + t);
    return v;
  }

  double real() {
    const std::string t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw FormatError("malformed header field: " + t);
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size()) throw TruncatedError("missing raster");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<char>& bytes_;
  std::size_t pos_ = 0;
};

double median_of(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

IntensityMap read_pgm(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  HeaderReader hdr(bytes);
  const std::string magic = hdr.token();
  if (magic != "P5") throw UnsupportedFormatError("only binary P5 PGM is supported, got '" + magic + "'");
  const long w = hdr.integer();
  const long h = hdr.integer();
  const long maxval = hdr.integer();
  if (w <= 0 || h <= 0) throw FormatError("PGM dims must be positive");
  if (maxval <= 0 || maxval > 65535) throw FormatError("PGM maxval out of range");
  const std::size_t offset = hdr.raster_offset();
  const std::size_t bps = maxval < 256 ? 1 : 2;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < offset + n * bps) throw TruncatedError("truncated PGM raster: " + path.string());

  IntensityMap img(static_cast<std::size_t>(h), static_cast<std::size_t>(w));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t k = 0; k < n; ++k) {
    // 16-bit samples are big-endian.
    const unsigned sample = bps == 1 ? p[k] : (unsigned{p[2 * k]} << 8) | p[2 * k + 1];
    img.values.data[k] = std::min(1.0, sample * scale);
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const IntensityMap& image, int maxval) {
  if (maxval != 255 && maxval != 65535) throw InvalidArgument("PGM maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << '\n' << maxval << '\n';
  for (double v : image.values.data) {
    const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    const auto q = static_cast<unsigned>(std::lround(c * maxval));
    if (maxval == 255) {
      out.put(static_cast<char>(q));
    } else {
      out.put(static_cast<char>(q >> 8));
      out.put(static_cast<char>(q & 0xff));
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

DepthMap repair_non_finite(const Grid<double>& raw) {
  DepthMap out(raw.height, raw.width);
  std::vector<double> neigh;
  neigh.reserve(8);
  for (std::size_t i = 0; i < raw.height; ++i) {
    for (std::size_t j = 0; j < raw.width; ++j) {
      const double v = raw(i, j);
      if (std::isfinite(v)) {
        out.values(i, j) = v;
        continue;
      }
      neigh.clear();
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const auto ii = static_cast<std::ptrdiff_t>(i) + di;
          const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(raw.height) ||
              jj >= static_cast<std::ptrdiff_t>(raw.width))
            continue;
          const double n = raw(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
          if (std::isfinite(n)) neigh.push_back(n);
        }
      }
      if (neigh.empty()) {
        out.set_invalid(i, j);
      } else {
        out.values(i, j) = median_of(neigh);
      }
    }
  }
  return out;
}

DepthMap read_pfm(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  HeaderReader hdr(bytes);
  const std::string magic = hdr.token();
  if (magic != "Pf") throw UnsupportedFormatError("only single-channel 'Pf' PFM is supported, got '" + magic + "'");
  const long w = hdr.integer();
  const long h = hdr.integer();
  const double scale = hdr.real();
  if (w <= 0 || h <= 0) throw FormatError("PFM dims must be positive");
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("PFM scale must be finite and non-zero");
  const bool little = scale < 0.0;
  const std::size_t offset = hdr.raster_offset();
  const auto uh = static_cast<std::size_t>(h);
  const auto uw = static_cast<std::size_t>(w);
  if (bytes.size() < offset + 4 * uh * uw) throw TruncatedError("truncated PFM raster: " + path.string());

  Grid<double> raw(uh, uw);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t r = 0; r < uh; ++r) {
    const std::size_t row = uh - 1 - r;  // stored bottom-to-top
    for (std::size_t c = 0; c < uw; ++c) {
      const unsigned char* s = p + 4 * (r * uw + c);
      std::uint32_t bits = little ? (std::uint32_t{s[0]} | std::uint32_t{s[1]} << 8 | std::uint32_t{s[2]} << 16 |
                                     std::uint32_t{s[3]} << 24)
                                  : (std::uint32_t{s[3]} | std::uint32_t{s[2]} << 8 | std::uint32_t{s[1]} << 16 |
                                     std::uint32_t{s[0]} << 24);
      float f;
      std::memcpy(&f, &bits, 4);
      raw(row, c) = f;
    }
  }
  return repair_non_finite(raw);
}

void write_pfm(const std::filesystem::path& path, const Grid<double>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "Pf\n" << values.width << ' ' << values.height << "\n-1.0\n";
  std::vector<float> row(values.width);
  for (std::size_t r = values.height; r-- > 0;) {
    for (std::size_t c = 0; c < values.width; ++c) row[c] = static_cast<float>(values(r, c));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(4 * row.size()));
  }
  if (!out) throw Error("write failed: " + path.string());
}

void write_depth_preview(const std::filesystem::path& path, const DepthMap& depth, double lo, double hi) {
  IntensityMap img(depth.height(), depth.width());
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t k = 0; k < img.values.size(); ++k) img.values.data[k] = (depth.values.data[k] - lo) / span;
  write_pgm(path, img, 255);
}

DepthMap normalize_to_unit(const DepthMap& depth) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < depth.values.size(); ++k) {
    if (!depth.valid.data[k]) continue;
    lo = std::min(lo, depth.values.data[k]);
    hi = std::max(hi, depth.values.data[k]);
  }
  DepthMap out = depth;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (!out.valid.data[k]) continue;
    out.values.data[k] = hi > lo ? (out.values.data[k] - lo) / (hi - lo) : 0.5;
  }
  return out;
}

}  // namespace spadsr
