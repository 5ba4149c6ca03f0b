// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "variants.hpp"

namespace ransomnet::kernels::detail {

namespace {

// Horizontal combine in the canonical (l0 + l1) + (l2 + l3) order, with the
// scalar tail folded into lanes first.
template <typename TailTerm>
double finish(__m256d acc, std::size_t tail_begin, std::size_t n, TailTerm term) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  for (std::size_t i = tail_begin; i < n; ++i) lanes[i % 4] += term(i);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  return finish(acc, i, n, [&](std::size_t j) { return a[j] * b[j]; });
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  return finish(acc, i, n, [&](std::size_t j) {
    const double d = a[j] - b[j];
    return d * d;
  });
}

void squared_distances_avx2(const double* query, const double* rows, std::size_t count, std::size_t dim,
                            double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = squared_distance_avx2(query, rows + r * dim, dim);
}

double weighted_squared_distance_avx2(const double* x, const double* mean, const double* weight,
                                      std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(d, d), _mm256_loadu_pd(weight + i)));
  }
  return finish(acc, i, n, [&](std::size_t j) {
    const double d = x[j] - mean[j];
    return (d * d) * weight[j];
  });
}

void minmax_scale_avx2(const double* in, const double* lo, const double* range, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(range + i);
    __m256d q = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(in + i), _mm256_loadu_pd(lo + i)), r);
    q = _mm256_min_pd(_mm256_max_pd(q, zero), one);
    const __m256d degenerate = _mm256_cmp_pd(r, zero, _CMP_EQ_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(q, zero, degenerate));
  }
  for (; i < n; ++i) {
    if (range[i] == 0.0) {
      out[i] = 0.0;
      continue;
    }
    double q = (in[i] - lo[i]) / range[i];
    q = q > 0.0 ? q : 0.0;
    q = q < 1.0 ? q : 1.0;
    out[i] = q;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      Isa::Avx2,          dot_avx2,          squared_distance_avx2, squared_distances_avx2,
      weighted_squared_distance_avx2, minmax_scale_avx2,
  };
  return table;
}

}  // namespace ransomnet::kernels::detail
