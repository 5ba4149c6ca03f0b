#pragma once

// Data-parallel inner loops used by the classifiers and the scaler.
//
// Every reduction uses one fixed association order: element i is added to
// lane (i mod 4) in increasing i, and the four lanes are combined as
// (l0 + l1) + (l2 + l3). The scalar reference spells that order out
// literally; the vector variants produce it natively, so results are
// bit-identical across variants.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ransomnet::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // out[r] = squared_distance(query, rows + r * dim, dim) for r < count.
  void (*squared_distances)(const double* query, const double* rows, std::size_t count, std::size_t dim,
                            double* out);
  // sum of (x - mean)^2 * weight
  double (*weighted_squared_distance)(const double* x, const double* mean, const double* weight, std::size_t n);
  // out = clamp((in - lo) / range, 0, 1), and 0 where range == 0.
  void (*minmax_scale)(const double* in, const double* lo, const double* range, double* out, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);

std::vector<Isa> available_isas();

// Chosen once per process: the widest supported variant, unless the
// RANSOMNET_ISA environment variable names another available one
// ("scalar", "avx2", "neon").
const KernelTable& active();

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
void squared_distances(std::span<const double> query, std::span<const double> rows, std::span<double> out);
double weighted_squared_distance(std::span<const double> x, std::span<const double> mean,
                                 std::span<const double> weight);
void minmax_scale(std::span<const double> in, std::span<const double> lo, std::span<const double> range,
                  std::span<double> out);

}  // namespace ransomnet::kernels
