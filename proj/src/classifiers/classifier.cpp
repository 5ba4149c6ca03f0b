#include <chrono>
#include <cmath>

#include "ransomnet/classifiers.hpp"
#include "ransomnet/learners.hpp"

namespace ransomnet {

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::KNearestNeighbor: return "KNearestNeighbor";
    case ClassifierKind::MultilayerPerceptron: return "MultilayerPerceptron";
    case ClassifierKind::DecisionTreeJ48: return "DecisionTreeJ48";
    case ClassifierKind::RandomForest: return "RandomForest";
    case ClassifierKind::SupportVectorMachine: return "SupportVectorMachine";
    case ClassifierKind::BayesNetwork: return "BayesNetwork";
  }
  return "Unknown";
}

std::string_view short_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::KNearestNeighbor: return "knn";
    case ClassifierKind::MultilayerPerceptron: return "mlp";
    case ClassifierKind::DecisionTreeJ48: return "j48";
    case ClassifierKind::RandomForest: return "rf";
    case ClassifierKind::SupportVectorMachine: return "svm";
    case ClassifierKind::BayesNetwork: return "bayes";
  }
  return "unknown";
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view text) {
  for (ClassifierKind kind : kAllClassifierKinds) {
    if (text == short_name(kind) || text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

void Hyperparams::validate(ClassifierKind kind) const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidHyperparams, what); };
  switch (kind) {
    case ClassifierKind::KNearestNeighbor:
      if (knn.k < 1) fail("k must be >= 1");
      break;
    case ClassifierKind::MultilayerPerceptron:
      if (mlp.hidden < 1) fail("hidden units must be >= 1");
      if (!(mlp.learning_rate > 0.0) || !std::isfinite(mlp.learning_rate)) fail("learning rate must be > 0");
      if (mlp.epochs < 1) fail("epochs must be >= 1");
      if (!(mlp.init_range > 0.0) || !std::isfinite(mlp.init_range)) fail("init range must be > 0");
      break;
    case ClassifierKind::DecisionTreeJ48:
      if (tree.min_leaf < 1) fail("min_leaf must be >= 1");
      break;
    case ClassifierKind::RandomForest:
      if (tree.min_leaf < 1) fail("min_leaf must be >= 1");
      if (forest.trees < 1) fail("trees must be >= 1");
      if (forest.features_per_split > kFeatureCount) fail("features per split must be <= 13");
      break;
    case ClassifierKind::SupportVectorMachine:
      if (!(svm.c > 0.0) || !std::isfinite(svm.c)) fail("C must be > 0");
      if (svm.iterations < 1) fail("iterations must be >= 1");
      break;
    case ClassifierKind::BayesNetwork:
      if (!(bayes.var_smoothing >= 0.0) || !std::isfinite(bayes.var_smoothing)) {
        fail("variance smoothing must be >= 0");
      }
      break;
  }
}

Prediction prediction_from_score(double score) {
  return {score >= 0.5 ? Label::Ransomware : Label::Benign, score};
}

namespace {

FeatureVector preprocess(const TrainedModel& model, std::span<const double> features) {
  FeatureVector x{};
  std::copy(features.begin(), features.end(), x.begin());
  if (model.hyperparams.zero_address_features) x = without_addresses(x);
  if (model.scaler) x = apply_scaler(*model.scaler, x);
  return x;
}

}  // namespace

TrainedModel train(ClassifierKind kind, const Hyperparams& hyperparams, const Dataset& dataset) {
  hyperparams.validate(kind);
  if (dataset.count(Label::Ransomware) == 0 || dataset.count(Label::Benign) == 0) {
    throw Error(ErrorCode::SingleClassDataset, "training needs at least one sample of each class");
  }
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    for (double v : dataset.samples[i].features) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "training sample has a non-finite feature", i);
    }
  }

  TrainedModel model;
  model.kind = kind;
  model.hyperparams = hyperparams;
  model.train_fingerprint = dataset_fingerprint(dataset);

  Dataset prepared = dataset;
  if (hyperparams.zero_address_features) {
    for (LabeledSample& sample : prepared.samples) sample.features = without_addresses(sample.features);
  }
  if (uses_scaler(kind)) model.scaler = fit_scaler(prepared);

  TrainingMatrix data;
  data.rows.reserve(prepared.size() * kFeatureCount);
  data.labels.reserve(prepared.size());
  for (const LabeledSample& sample : prepared.samples) {
    const FeatureVector x = model.scaler ? apply_scaler(*model.scaler, sample.features) : sample.features;
    data.rows.insert(data.rows.end(), x.begin(), x.end());
    data.labels.push_back(sample.label);
  }

  const auto started = std::chrono::steady_clock::now();
  switch (kind) {
    case ClassifierKind::KNearestNeighbor:
      model.parameters = train_knn(data);
      break;
    case ClassifierKind::MultilayerPerceptron:
      model.parameters = train_mlp(data, hyperparams.mlp, hyperparams.seed);
      break;
    case ClassifierKind::DecisionTreeJ48: {
      std::vector<std::size_t> all(data.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      model.parameters = build_tree(data, all, {hyperparams.tree.min_leaf, kFeatureCount}, nullptr);
      break;
    }
    case ClassifierKind::RandomForest:
      model.parameters = train_forest(data, hyperparams.tree, hyperparams.forest, hyperparams.seed);
      break;
    case ClassifierKind::SupportVectorMachine:
      model.parameters = train_svm(data, hyperparams.svm, hyperparams.seed);
      break;
    case ClassifierKind::BayesNetwork:
      model.parameters = train_bayes(data, hyperparams.bayes);
      break;
  }
  model.training_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return model;
}

Prediction predict(const TrainedModel& model, std::span<const double> features) {
  if (features.size() != kFeatureCount) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(kFeatureCount) + " features, got " + std::to_string(features.size()));
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!std::isfinite(features[i])) throw Error(ErrorCode::NonFiniteFeature, "feature is not finite", i);
  }
  const FeatureVector x = preprocess(model, features);

  const double score = std::visit(
      [&](const auto& state) -> double {
        using State = std::decay_t<decltype(state)>;
        if constexpr (std::is_same_v<State, KnnState>) {
          return knn_score(state, model.hyperparams.knn.k, x);
        } else if constexpr (std::is_same_v<State, MlpState>) {
          return mlp_forward(state, x);
        } else if constexpr (std::is_same_v<State, TreeState>) {
          return tree_score(state, x);
        } else if constexpr (std::is_same_v<State, ForestState>) {
          return forest_score(state, x);
        } else if constexpr (std::is_same_v<State, SvmState>) {
          return 1.0 / (1.0 + std::exp(-svm_decision(state, x)));
        } else {
          return bayes_score(state, x);
        }
      },
      model.parameters);
  return prediction_from_score(score);
}

}  // namespace ransomnet
