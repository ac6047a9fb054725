#pragma once

#include <cstddef>

namespace spadsr::nn {

// C[M x N] (+)= op(A)[M x K] * op(B)[K x N], row-major with leading
// dimensions. op(X) is X or X^T. Summation order is fixed, so results are
// reproducible run to run.
template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda,
          const T* b, std::size_t ldb, T* c, std::size_t ldc, bool accumulate);

}  // namespace spadsr::nn
