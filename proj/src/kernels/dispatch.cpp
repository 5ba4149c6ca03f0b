#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ransomnet/kernels.hpp"
#include "variants.hpp"

namespace ransomnet::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return &scalar_table();
    case Isa::Avx2:
#if defined(RANSOMNET_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2")) return &detail::avx2_table();
#endif
      return nullptr;
    case Isa::Neon:
#if defined(RANSOMNET_HAVE_NEON)
      return &detail::neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (table_for(isa) != nullptr) out.push_back(isa);
  }
  return out;
}

namespace {

const KernelTable& select() {
  if (const char* forced = std::getenv("RANSOMNET_ISA")) {
    const std::string name(forced);
    for (Isa isa : available_isas()) {
      if (to_string(isa) == name) return *table_for(isa);
    }
  }
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (const KernelTable* table = table_for(isa)) return *table;
  }
  return scalar_table();
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return active().squared_distance(a.data(), b.data(), a.size());
}

void squared_distances(std::span<const double> query, std::span<const double> rows, std::span<double> out) {
  if (query.empty() || rows.size() != query.size() * out.size()) {
    throw std::invalid_argument("squared_distances: rows must hold out.size() vectors of query.size()");
  }
  active().squared_distances(query.data(), rows.data(), out.size(), query.size(), out.data());
}

double weighted_squared_distance(std::span<const double> x, std::span<const double> mean,
                                 std::span<const double> weight) {
  require_same_size(x.size(), mean.size());
  require_same_size(x.size(), weight.size());
  return active().weighted_squared_distance(x.data(), mean.data(), weight.data(), x.size());
}

void minmax_scale(std::span<const double> in, std::span<const double> lo, std::span<const double> range,
                  std::span<double> out) {
  require_same_size(in.size(), lo.size());
  require_same_size(in.size(), range.size());
  require_same_size(in.size(), out.size());
  active().minmax_scale(in.data(), lo.data(), range.data(), out.data(), in.size());
}

}  // namespace ransomnet::kernels
