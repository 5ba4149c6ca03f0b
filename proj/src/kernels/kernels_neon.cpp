// AArch64 variant. Two 2-wide accumulators stand in for the four canonical
// lanes: acc01 holds lanes 0 and 1, acc23 holds lanes 2 and 3.

#include <arm_neon.h>

#include "variants.hpp"

namespace ransomnet::kernels::detail {

namespace {

template <typename TailTerm>
double finish(float64x2_t acc01, float64x2_t acc23, std::size_t tail_begin, std::size_t n, TailTerm term) {
  double lanes[4];
  vst1q_f64(lanes, acc01);
  vst1q_f64(lanes + 2, acc23);
  for (std::size_t i = tail_begin; i < n; ++i) lanes[i % 4] += term(i);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc23 = vaddq_f64(acc23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  return finish(acc01, acc23, i, n, [&](std::size_t j) { return a[j] * b[j]; });
}

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d01 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d23 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    acc01 = vaddq_f64(acc01, vmulq_f64(d01, d01));
    acc23 = vaddq_f64(acc23, vmulq_f64(d23, d23));
  }
  return finish(acc01, acc23, i, n, [&](std::size_t j) {
    const double d = a[j] - b[j];
    return d * d;
  });
}

void squared_distances_neon(const double* query, const double* rows, std::size_t count, std::size_t dim,
                            double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = squared_distance_neon(query, rows + r * dim, dim);
}

double weighted_squared_distance_neon(const double* x, const double* mean, const double* weight,
                                      std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d01 = vsubq_f64(vld1q_f64(x + i), vld1q_f64(mean + i));
    const float64x2_t d23 = vsubq_f64(vld1q_f64(x + i + 2), vld1q_f64(mean + i + 2));
    acc01 = vaddq_f64(acc01, vmulq_f64(vmulq_f64(d01, d01), vld1q_f64(weight + i)));
    acc23 = vaddq_f64(acc23, vmulq_f64(vmulq_f64(d23, d23), vld1q_f64(weight + i + 2)));
  }
  return finish(acc01, acc23, i, n, [&](std::size_t j) {
    const double d = x[j] - mean[j];
    return (d * d) * weight[j];
  });
}

void minmax_scale_neon(const double* in, const double* lo, const double* range, double* out, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t r = vld1q_f64(range + i);
    float64x2_t q = vdivq_f64(vsubq_f64(vld1q_f64(in + i), vld1q_f64(lo + i)), r);
    q = vminq_f64(vmaxq_f64(q, zero), one);
    const uint64x2_t degenerate = vceqq_f64(r, zero);
    vst1q_f64(out + i, vbslq_f64(degenerate, zero, q));
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

const KernelTable& neon_table() {
  static const KernelTable table{
      Isa::Neon,          dot_neon,          squared_distance_neon, squared_distances_neon,
      weighted_squared_distance_neon, minmax_scale_neon,
  };
  return table;
}

}  // namespace ransomnet::kernels::detail
