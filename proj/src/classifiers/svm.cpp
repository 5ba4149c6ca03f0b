// Linear soft-margin SVM trained by Pegasos-style stochastic subgradient
// descent: step 1/(lambda t), lambda = 1/(C n), projection onto the ball of
// radius 1/sqrt(lambda). The bias is an extra weight on a constant input of
// 1 and is regularized with the rest.

#include <cmath>

#include "ransomnet/kernels.hpp"
#include "ransomnet/learners.hpp"

namespace ransomnet {

SvmState train_svm(const TrainingMatrix& data, const SvmOptions& options, std::uint64_t seed) {
  const std::size_t n = data.size();
  const double lambda = 1.0 / (options.c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);
  Rng rng(seed);

  FeatureVector w{};
  double b = 0.0;
  for (std::uint64_t t = 1; t <= options.iterations; ++t) {
    const std::size_t i = rng.below(n);
    const auto x = data.row(i);
    const double y = data.labels[i] == Label::Ransomware ? 1.0 : -1.0;
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    const double margin = y * (kernels::dot(w, x) + b);

    const double shrink = 1.0 - eta * lambda;
    for (double& v : w) v *= shrink;
    b *= shrink;
    if (margin < 1.0) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) w[f] += eta * y * x[f];
      b += eta * y;
    }

    const double norm = std::sqrt(kernels::dot(w, w) + b * b);
    if (norm > radius) {
      const double scale = radius / norm;
      for (double& v : w) v *= scale;
      b *= scale;
    }
  }
  return {w, b};
}

double svm_decision(const SvmState& state, std::span<const double> x) {
  return kernels::dot(state.weights, x) + state.bias;
}

}  // namespace ransomnet
