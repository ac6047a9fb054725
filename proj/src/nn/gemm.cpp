#include "spadsr/nn/gemm.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

namespace spadsr::nn {
namespace {

typedef float VecF __attribute__((vector_size(64)));
typedef double VecD __attribute__((vector_size(64)));

template <typename T>
struct VecOf;
template <>
struct VecOf<float> {
  using type = VecF;
};
template <>
struct VecOf<double> {
  using type = VecD;
};

template <typename T>
struct Blocking {
  using Vec = typename VecOf<T>::type;
  static constexpr std::size_t kLanes = 64 / sizeof(T);
  static constexpr std::size_t kNR = 2 * kLanes;  // two vectors per row
  static constexpr std::size_t kMR = 6;
  static constexpr std::size_t kKC = 256;
  static constexpr std::size_t kMC = 96;
  static constexpr std::size_t kNC = 2048;
};

template <typename T>
inline T at(const T* x, std::size_t ld, bool trans, std::size_t row, std::size_t col) {
  return trans ? x[col * ld + row] : x[row * ld + col];
}

// Packs op(A)[ic.., pc..] into MR-row slivers, k-major, zero-padded.
template <typename T>
void pack_a(const T* a, std::size_t lda, bool trans, std::size_t ic, std::size_t mc, std::size_t pc, std::size_t kc,
            T* out) {
  constexpr std::size_t MR = Blocking<T>::kMR;
  for (std::size_t ir = 0; ir < mc; ir += MR) {
    const std::size_t rows = std::min(MR, mc - ir);
    for (std::size_t p = 0; p < kc; ++p) {
      for (std::size_t r = 0; r < MR; ++r) out[p * MR + r] = r < rows ? at(a, lda, trans, ic + ir + r, pc + p) : T{};
    }
    out += kc * MR;
  }
}

// Packs op(B)[pc.., jc..] into NR-column slivers, k-major, zero-padded.
template <typename T>
void pack_b(const T* b, std::size_t ldb, bool trans, std::size_t pc, std::size_t kc, std::size_t jc, std::size_t nc,
            T* out) {
  constexpr std::size_t NR = Blocking<T>::kNR;
  for (std::size_t jr = 0; jr < nc; jr += NR) {
    const std::size_t cols = std::min(NR, nc - jr);
    for (std::size_t p = 0; p < kc; ++p) {
      T* dst = out + p * NR;
      if (!trans && cols == NR) {
        std::memcpy(dst, b + (pc + p) * ldb + jc + jr, NR * sizeof(T));
      } else {
        for (std::size_t c = 0; c < NR; ++c) dst[c] = c < cols ? at(b, ldb, trans, pc + p, jc + jr + c) : T{};
      }
    }
    out += kc * NR;
  }
}

// acc[MR x NR] = Ap * Bp over kc, then added into C (only the live rows/cols).
template <typename T>
void micro_kernel(std::size_t kc, const T* ap, const T* bp, T* c, std::size_t ldc, std::size_t rows,
                  std::size_t cols) {
  using B = Blocking<T>;
  using Vec = typename B::Vec;
  constexpr std::size_t MR = B::kMR;
  constexpr std::size_t L = B::kLanes;
  Vec acc[MR][2];
  for (std::size_t r = 0; r < MR; ++r) acc[r][0] = acc[r][1] = Vec{};
  for (std::size_t p = 0; p < kc; ++p) {
    Vec b0, b1;
    std::memcpy(&b0, bp + p * 2 * L, sizeof(Vec));
    std::memcpy(&b1, bp + p * 2 * L + L, sizeof(Vec));
    const T* a = ap + p * MR;
#pragma GCC unroll 6
    for (std::size_t r = 0; r < MR; ++r) {
      acc[r][0] += a[r] * b0;
      acc[r][1] += a[r] * b1;
    }
  }
  if (rows == MR && cols == 2 * L) {
    for (std::size_t r = 0; r < MR; ++r) {
      Vec c0, c1;
      std::memcpy(&c0, c + r * ldc, sizeof(Vec));
      std::memcpy(&c1, c + r * ldc + L, sizeof(Vec));
      c0 += acc[r][0];
      c1 += acc[r][1];
      std::memcpy(c + r * ldc, &c0, sizeof(Vec));
      std::memcpy(c + r * ldc + L, &c1, sizeof(Vec));
    }
    return;
  }
  T tile[MR][2 * L];
  std::memcpy(tile, acc, sizeof(tile));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < cols; ++j) c[r * ldc + j] += tile[r][j];
}

}  // namespace

template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda,
          const T* b, std::size_t ldb, T* c, std::size_t ldc, bool accumulate) {
  using B = Blocking<T>;
  if (!accumulate)
    for (std::size_t i = 0; i < m; ++i) std::fill(c + i * ldc, c + i * ldc + n, T{});
  if (m == 0 || n == 0 || k == 0) return;

  thread_local std::vector<T> abuf, bbuf;
  abuf.resize(B::kMC * B::kKC + B::kMR * B::kKC);
  bbuf.resize(B::kNC * B::kKC + B::kNR * B::kKC);

  for (std::size_t jc = 0; jc < n; jc += B::kNC) {
    const std::size_t nc = std::min(B::kNC, n - jc);
    for (std::size_t pc = 0; pc < k; pc += B::kKC) {
      const std::size_t kc = std::min(B::kKC, k - pc);
      pack_b(b, ldb, trans_b, pc, kc, jc, nc, bbuf.data());
      for (std::size_t ic = 0; ic < m; ic += B::kMC) {
        const std::size_t mc = std::min(B::kMC, m - ic);
        pack_a(a, lda, trans_a, ic, mc, pc, kc, abuf.data());
        for (std::size_t jr = 0; jr < nc; jr += B::kNR) {
          const std::size_t cols = std::min(B::kNR, nc - jr);
          const T* bp = bbuf.data() + (jr / B::kNR) * kc * B::kNR;
          for (std::size_t ir = 0; ir < mc; ir += B::kMR) {
            const std::size_t rows = std::min(B::kMR, mc - ir);
            const T* ap = abuf.data() + (ir / B::kMR) * kc * B::kMR;
            micro_kernel<T>(kc, ap, bp, c + (ic + ir) * ldc + jc + jr, ldc, rows, cols);
          }
        }
      }
    }
  }
}

template void gemm<float>(bool, bool, std::size_t, std::size_t, std::size_t, const float*, std::size_t, const float*,
                          std::size_t, float*, std::size_t, bool);
template void gemm<double>(bool, bool, std::size_t, std::size_t, std::size_t, const double*, std::size_t,
                           const double*, std::size_t, double*, std::size_t, bool);

}  // namespace spadsr::nn
