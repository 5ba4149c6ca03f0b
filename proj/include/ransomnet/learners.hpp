#pragma once

// Per-family training and scoring. `train`/`predict` in classifiers.hpp are
// the public entry points; these are exposed for structural tests.

#include <cstddef>
#include <span>
#include <vector>

#include "ransomnet/classifiers.hpp"
#include "ransomnet/rng.hpp"

namespace ransomnet {

// Training data after preprocessing, row-major with kFeatureCount columns.
struct TrainingMatrix {
  std::vector<double> rows;
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const { return {rows.data() + i * kFeatureCount, kFeatureCount}; }
};

KnnState train_knn(const TrainingMatrix& data);
double knn_score(const KnnState& state, std::uint32_t k, std::span<const double> x);

MlpState mlp_init(std::uint32_t inputs, std::uint32_t hidden, double init_range, std::uint64_t seed);
// Output activation for one input.
double mlp_forward(const MlpState& state, std::span<const double> x);
// Mean binary cross-entropy over rows (row-major, state.inputs columns).
double mlp_loss(const MlpState& state, std::span<const double> rows, std::span<const Label> labels);
// Gradient of mlp_loss, laid out like the state.
MlpState mlp_gradient(const MlpState& state, std::span<const double> rows, std::span<const Label> labels);
MlpState train_mlp(const TrainingMatrix& data, const MlpOptions& options, std::uint64_t seed);

struct TreeBuildOptions {
  std::uint32_t min_leaf = 2;
  std::uint32_t features_per_split = kFeatureCount;  // < 13 samples features with `rng`
};

// C4.5-style induction over data rows `indices` (duplicates allowed, as in
// bootstrap samples). `offered_features` accumulates a bitmask of the
// features considered at any split.
TreeState build_tree(const TrainingMatrix& data, std::span<const std::size_t> indices,
                     const TreeBuildOptions& options, Rng* rng, std::uint16_t* offered_features = nullptr);
double tree_score(const TreeState& tree, std::span<const double> x);

ForestState train_forest(const TrainingMatrix& data, const TreeOptions& tree, const ForestOptions& forest,
                         std::uint64_t seed);
double forest_score(const ForestState& forest, std::span<const double> x);

SvmState train_svm(const TrainingMatrix& data, const SvmOptions& options, std::uint64_t seed);
double svm_decision(const SvmState& state, std::span<const double> x);

BayesState train_bayes(const TrainingMatrix& data, const BayesOptions& options);
double bayes_score(const BayesState& state, std::span<const double> x);

}  // namespace ransomnet
