#include "ransomnet/kernels.hpp"

namespace ransomnet::kernels {

namespace {

template <typename Term>
double lane_sum(std::size_t n, Term term) {
  double lanes[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) lanes[i % 4] += term(i);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  return lane_sum(n, [&](std::size_t i) { return a[i] * b[i]; });
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  return lane_sum(n, [&](std::size_t i) {
    const double d = a[i] - b[i];
    return d * d;
  });
}

void squared_distances_scalar(const double* query, const double* rows, std::size_t count, std::size_t dim,
                              double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = squared_distance_scalar(query, rows + r * dim, dim);
}

double weighted_squared_distance_scalar(const double* x, const double* mean, const double* weight,
                                        std::size_t n) {
  return lane_sum(n, [&](std::size_t i) {
    const double d = x[i] - mean[i];
    return (d * d) * weight[i];
  });
}

void minmax_scale_scalar(const double* in, const double* lo, const double* range, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (range[i] == 0.0) {
      out[i] = 0.0;
      continue;
    }
    double q = (in[i] - lo[i]) / range[i];
    // Written as max-then-min with the operand order of the vector max/min
    // instructions so signed zeros agree.
    q = q > 0.0 ? q : 0.0;
    q = q < 1.0 ? q : 1.0;
    out[i] = q;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      Isa::Scalar,          dot_scalar,          squared_distance_scalar, squared_distances_scalar,
      weighted_squared_distance_scalar, minmax_scale_scalar,
  };
  return table;
}

}  // namespace ransomnet::kernels
