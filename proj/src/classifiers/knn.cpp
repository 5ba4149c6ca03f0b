#include <algorithm>
#include <numeric>

#include "ransomnet/kernels.hpp"
#include "ransomnet/learners.hpp"

namespace ransomnet {

KnnState train_knn(const TrainingMatrix& data) { return {data.rows, data.labels}; }

double knn_score(const KnnState& state, std::uint32_t k, std::span<const double> x) {
  const std::size_t n = state.labels.size();
  if (n == 0) return 0.0;
  std::vector<double> distances(n);
  kernels::squared_distances(x, state.rows, distances);

  const std::size_t take = std::min<std::size_t>(k, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Equal distances resolve to the lower training index.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return distances[a] != distances[b] ? distances[a] < distances[b] : a < b;
                    });
  std::size_t positives = 0;
  for (std::size_t i = 0; i < take; ++i) positives += state.labels[order[i]] == Label::Ransomware;
  return static_cast<double>(positives) / static_cast<double>(take);
}

}  // namespace ransomnet
