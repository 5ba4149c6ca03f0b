#pragma once

// The six classifier families, their learned state, and model files.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ransomnet/features.hpp"

namespace ransomnet {

enum class ClassifierKind : std::uint8_t {
  KNearestNeighbor = 0,
  MultilayerPerceptron = 1,
  DecisionTreeJ48 = 2,
  RandomForest = 3,
  SupportVectorMachine = 4,
  BayesNetwork = 5,
};

inline constexpr std::array<ClassifierKind, 6> kAllClassifierKinds = {
    ClassifierKind::KNearestNeighbor,     ClassifierKind::MultilayerPerceptron,
    ClassifierKind::DecisionTreeJ48,      ClassifierKind::RandomForest,
    ClassifierKind::SupportVectorMachine, ClassifierKind::BayesNetwork,
};

std::string_view to_string(ClassifierKind kind);
std::string_view short_name(ClassifierKind kind);  // knn, mlp, j48, rf, svm, bayes
std::optional<ClassifierKind> parse_classifier_kind(std::string_view text);

// KNN, MLP and SVM train on min-max scaled features; the rest on raw values.
constexpr bool uses_scaler(ClassifierKind kind) {
  return kind == ClassifierKind::KNearestNeighbor || kind == ClassifierKind::MultilayerPerceptron ||
         kind == ClassifierKind::SupportVectorMachine;
}

struct KnnOptions {
  std::uint32_t k = 5;
};

struct MlpOptions {
  std::uint32_t hidden = 16;
  double learning_rate = 0.1;
  std::uint32_t epochs = 500;
  double init_range = 0.5;  // weights drawn from [-init_range, init_range]
};

struct TreeOptions {
  std::uint32_t min_leaf = 2;
};

struct ForestOptions {
  std::uint32_t trees = 100;
  bool bootstrap = true;
  std::uint32_t features_per_split = 0;  // 0 selects ceil(sqrt(13)) = 4
  std::uint32_t threads = 0;             // 0 = hardware concurrency; never affects the result
};

struct SvmOptions {
  double c = 1.0;
  std::uint64_t iterations = 100000;
};

struct BayesOptions {
  double var_smoothing = 1e-9;
};

struct Hyperparams {
  std::uint64_t seed = 42;
  bool zero_address_features = false;
  KnnOptions knn;
  MlpOptions mlp;
  TreeOptions tree;
  ForestOptions forest;
  SvmOptions svm;
  BayesOptions bayes;

  // Throws InvalidHyperparams when a field used by `kind` is out of range.
  void validate(ClassifierKind kind) const;
};

// ---- learned state -------------------------------------------------------

struct KnnState {
  std::vector<double> rows;  // scaled training vectors, row-major, 13 per row
  std::vector<Label> labels;

  bool operator==(const KnnState&) const = default;
};

struct MlpState {
  std::uint32_t inputs = 0;
  std::uint32_t hidden = 0;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;

  bool operator==(const MlpState&) const = default;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // value <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t positives = 0;  // training samples reaching the node
  std::uint32_t negatives = 0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct TreeState {
  std::vector<TreeNode> nodes;  // nodes[0] is the root; children follow parents

  bool operator==(const TreeState&) const = default;
};

struct ForestState {
  std::vector<TreeState> trees;
  std::vector<std::uint16_t> feature_masks;  // per tree: features offered at any split

  bool operator==(const ForestState&) const = default;
};

struct SvmState {
  FeatureVector weights{};
  double bias = 0.0;

  bool operator==(const SvmState&) const = default;
};

struct BayesState {
  // Index 0 = Benign, 1 = Ransomware.
  std::array<double, 2> log_prior{};
  std::array<FeatureVector, 2> mean{};
  std::array<FeatureVector, 2> variance{};

  bool operator==(const BayesState&) const = default;
};

using ModelParameters = std::variant<KnnState, MlpState, TreeState, ForestState, SvmState, BayesState>;

struct Prediction {
  Label label = Label::Benign;
  double score = 0.0;  // confidence for Ransomware

  bool operator==(const Prediction&) const = default;
};

// The one decision rule: Ransomware iff score >= 0.5.
Prediction prediction_from_score(double score);

struct TrainedModel {
  ClassifierKind kind = ClassifierKind::KNearestNeighbor;
  Hyperparams hyperparams;
  ModelParameters parameters;
  std::optional<ScalingParams> scaler;
  double training_time = 0.0;  // seconds; not stored in model files
  std::uint64_t train_fingerprint = 0;
};

TrainedModel train(ClassifierKind kind, const Hyperparams& hyperparams, const Dataset& dataset);

Prediction predict(const TrainedModel& model, std::span<const double> features);

// ---- model files -----------------------------------------------------------

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string save_model(const TrainedModel& model);
TrainedModel load_model(std::string_view bytes);

void save_model_file(const TrainedModel& model, const std::string& path);
TrainedModel load_model_file(const std::string& path);

// FNV-1a of the serialized model.
std::uint64_t model_fingerprint(const TrainedModel& model);

}  // namespace ransomnet
