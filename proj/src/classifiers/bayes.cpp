// Gaussian naive Bayes: the class node is the sole parent of every feature.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ransomnet/kernels.hpp"
#include "ransomnet/learners.hpp"

namespace ransomnet {

BayesState train_bayes(const TrainingMatrix& data, const BayesOptions& options) {
  const std::size_t n = data.size();
  std::array<double, 2> counts{};
  BayesState state;

  FeatureVector overall_mean{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(data.labels[i]);
    counts[c] += 1.0;
    const auto x = data.row(i);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      state.mean[c][f] += x[f];
      overall_mean[f] += x[f];
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (double& m : state.mean[c]) m /= counts[c];
  }
  for (double& m : overall_mean) m /= static_cast<double>(n);

  FeatureVector overall_var{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(data.labels[i]);
    const auto x = data.row(i);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const double d = x[f] - state.mean[c][f];
      state.variance[c][f] += d * d;
      const double g = x[f] - overall_mean[f];
      overall_var[f] += g * g;
    }
  }
  double max_var = 0.0;
  for (double& v : overall_var) {
    v /= static_cast<double>(n);
    max_var = std::max(max_var, v);
  }
  // Keeps constant columns usable; a fully constant dataset falls back to 1e-300.
  const double epsilon = std::max(options.var_smoothing * max_var, 1e-300);
  for (std::size_t c = 0; c < 2; ++c) {
    for (double& v : state.variance[c]) v = v / counts[c] + epsilon;
    state.log_prior[c] = std::log(counts[c] / static_cast<double>(n));
  }
  return state;
}

double bayes_score(const BayesState& state, std::span<const double> x) {
  std::array<double, 2> joint{};
  for (std::size_t c = 0; c < 2; ++c) {
    FeatureVector inv_var{};
    double log_norm = 0.0;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      inv_var[f] = 1.0 / state.variance[c][f];
      log_norm += std::log(2.0 * std::numbers::pi * state.variance[c][f]);
    }
    joint[c] = state.log_prior[c] - 0.5 * log_norm -
               0.5 * kernels::weighted_squared_distance(x, state.mean[c], inv_var);
  }
  // Posterior of class 1; equal joints give exactly 0.5.
  return 1.0 / (1.0 + std::exp(joint[0] - joint[1]));
}

}  // namespace ransomnet
