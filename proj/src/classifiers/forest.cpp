#include <algorithm>
#include <cmath>
#include <thread>

#include "ransomnet/learners.hpp"

namespace ransomnet {

namespace {

std::uint32_t resolve_features_per_split(std::uint32_t requested) {
  if (requested == 0) return static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(kFeatureCount))));
  return std::min<std::uint32_t>(requested, kFeatureCount);
}

}  // namespace

ForestState train_forest(const TrainingMatrix& data, const TreeOptions& tree, const ForestOptions& forest,
                         std::uint64_t seed) {
  const TreeBuildOptions build{tree.min_leaf, resolve_features_per_split(forest.features_per_split)};
  const std::size_t n = data.size();

  ForestState state;
  state.trees.resize(forest.trees);
  state.feature_masks.assign(forest.trees, 0);

  // Each tree owns an RNG stream derived from (seed, tree index), so the
  // forest is identical whatever the thread count.
  auto fit_tree = [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> indices(n);
    if (forest.bootstrap) {
      for (std::size_t& i : indices) i = rng.below(n);
      std::sort(indices.begin(), indices.end());
    } else {
      for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    }
    state.trees[t] = build_tree(data, indices, build, &rng, &state.feature_masks[t]);
  };

  std::size_t workers = forest.threads != 0 ? forest.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<std::size_t>(workers, forest.trees);
  if (workers <= 1) {
    for (std::size_t t = 0; t < forest.trees; ++t) fit_tree(t);
    return state;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t t = w; t < forest.trees; t += workers) fit_tree(t);
    });
  }
  pool.clear();
  return state;
}

double forest_score(const ForestState& forest, std::span<const double> x) {
  if (forest.trees.empty()) return 0.0;
  double total = 0.0;
  for (const TreeState& tree : forest.trees) total += tree_score(tree, x);
  return total / static_cast<double>(forest.trees.size());
}

}  // namespace ransomnet
