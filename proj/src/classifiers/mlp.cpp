// One hidden layer, sigmoid everywhere, mean binary cross-entropy, full-batch
// gradient descent.

#include <cmath>

#include "ransomnet/kernels.hpp"
#include "ransomnet/learners.hpp"

namespace ransomnet {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct Activations {
  std::vector<double> hidden;
  double output_logit = 0.0;
};

void forward(const MlpState& s, std::span<const double> x, Activations& act) {
  act.hidden.resize(s.hidden);
  for (std::uint32_t j = 0; j < s.hidden; ++j) {
    const std::span<const double> row(s.w1.data() + std::size_t{j} * s.inputs, s.inputs);
    act.hidden[j] = sigmoid(kernels::dot(row, x) + s.b1[j]);
  }
  act.output_logit = kernels::dot(s.w2, act.hidden) + s.b2;
}

double target(Label label) { return label == Label::Ransomware ? 1.0 : 0.0; }

}  // namespace

MlpState mlp_init(std::uint32_t inputs, std::uint32_t hidden, double init_range, std::uint64_t seed) {
  Rng rng(seed);
  MlpState s;
  s.inputs = inputs;
  s.hidden = hidden;
  s.w1.resize(std::size_t{inputs} * hidden);
  s.b1.resize(hidden);
  s.w2.resize(hidden);
  for (double& w : s.w1) w = rng.uniform(-init_range, init_range);
  for (double& b : s.b1) b = rng.uniform(-init_range, init_range);
  for (double& w : s.w2) w = rng.uniform(-init_range, init_range);
  s.b2 = rng.uniform(-init_range, init_range);
  return s;
}

double mlp_forward(const MlpState& state, std::span<const double> x) {
  Activations act;
  forward(state, x, act);
  return sigmoid(act.output_logit);
}

double mlp_loss(const MlpState& state, std::span<const double> rows, std::span<const Label> labels) {
  Activations act;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    forward(state, rows.subspan(i * state.inputs, state.inputs), act);
    // -[y log s(z) + (1 - y) log(1 - s(z))] = softplus(z) - y z
    total += softplus(act.output_logit) - target(labels[i]) * act.output_logit;
  }
  return total / static_cast<double>(labels.size());
}

MlpState mlp_gradient(const MlpState& state, std::span<const double> rows, std::span<const Label> labels) {
  MlpState grad;
  grad.inputs = state.inputs;
  grad.hidden = state.hidden;
  grad.w1.assign(state.w1.size(), 0.0);
  grad.b1.assign(state.b1.size(), 0.0);
  grad.w2.assign(state.w2.size(), 0.0);
  grad.b2 = 0.0;

  Activations act;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto x = rows.subspan(i * state.inputs, state.inputs);
    forward(state, x, act);
    const double delta_out = sigmoid(act.output_logit) - target(labels[i]);
    grad.b2 += delta_out;
    for (std::uint32_t j = 0; j < state.hidden; ++j) {
      const double h = act.hidden[j];
      grad.w2[j] += delta_out * h;
      const double delta_hidden = delta_out * state.w2[j] * h * (1.0 - h);
      grad.b1[j] += delta_hidden;
      double* g = grad.w1.data() + std::size_t{j} * state.inputs;
      for (std::uint32_t f = 0; f < state.inputs; ++f) g[f] += delta_hidden * x[f];
    }
  }

  const double inv_n = 1.0 / static_cast<double>(labels.size());
  for (double& g : grad.w1) g *= inv_n;
  for (double& g : grad.b1) g *= inv_n;
  for (double& g : grad.w2) g *= inv_n;
  grad.b2 *= inv_n;
  return grad;
}

MlpState train_mlp(const TrainingMatrix& data, const MlpOptions& options, std::uint64_t seed) {
  MlpState state = mlp_init(static_cast<std::uint32_t>(kFeatureCount), options.hidden, options.init_range, seed);
  const double lr = options.learning_rate;
  for (std::uint32_t epoch = 0; epoch < options.epochs; ++epoch) {
    const MlpState grad = mlp_gradient(state, data.rows, data.labels);
    for (std::size_t i = 0; i < state.w1.size(); ++i) state.w1[i] -= lr * grad.w1[i];
    for (std::size_t i = 0; i < state.b1.size(); ++i) state.b1[i] -= lr * grad.b1[i];
    for (std::size_t i = 0; i < state.w2.size(); ++i) state.w2[i] -= lr * grad.w2[i];
    state.b2 -= lr * grad.b2;
  }
  return state;
}

}  // namespace ransomnet
