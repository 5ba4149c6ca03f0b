#pragma once

// Detection metrics, stratified splits, evaluation and timing runs.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ransomnet/classifiers.hpp"

namespace ransomnet {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Ransomware is the positive class.
ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths);

// nullopt marks a metric whose denominator is zero.
using Metric = std::optional<double>;

struct Metrics {
  Metric tpr;
  Metric fpr;
  Metric precision;
  Metric recall;
  Metric f_measure;
  Metric accuracy;

  bool operator==(const Metrics&) const = default;
};

Metrics metrics(const ConfusionCounts& counts);

struct MetricsReport {
  ClassifierKind classifier = ClassifierKind::KNearestNeighbor;
  Metrics metrics;
  double training_time = 0.0;  // seconds
  ConfusionCounts counts;      // pooled over folds for k-fold summaries

  bool operator==(const MetricsReport&) const = default;
};

struct SplitSpec {
  enum class Mode { Holdout, KFold };

  Mode mode = Mode::Holdout;
  double ratio = 0.8;  // train fraction, holdout only
  std::uint32_t k = 10;
  std::uint64_t seed = 42;

  static SplitSpec holdout(double ratio, std::uint64_t seed = 42) { return {Mode::Holdout, ratio, 10, seed}; }
  static SplitSpec kfold(std::uint32_t k, std::uint64_t seed = 42) { return {Mode::KFold, 0.8, k, seed}; }
};

struct Partition {
  std::vector<std::size_t> train;  // ascending dataset indices
  std::vector<std::size_t> test;
};

// Stratified: one partition for holdout, k for k-fold (test = fold i).
// Throws TooFewSamples when a part would miss a class.
std::vector<Partition> split(const Dataset& dataset, const SplitSpec& spec);

Dataset subset(const Dataset& dataset, std::span<const std::size_t> indices);

MetricsReport evaluate_model(const TrainedModel& model, const Dataset& dataset, std::span<const std::size_t> test);

struct Evaluation {
  MetricsReport summary;               // holdout: the single run; k-fold: unweighted fold mean
  std::vector<MetricsReport> folds;    // one per partition
  std::vector<std::uint64_t> train_fingerprints;  // model.train_fingerprint per partition
};

Evaluation evaluate(ClassifierKind kind, const Hyperparams& hyperparams, const Dataset& dataset,
                    const SplitSpec& spec);

// Unweighted mean; a metric undefined in any report is undefined in the mean.
MetricsReport mean_report(std::span<const MetricsReport> reports);

struct TimingRow {
  ClassifierKind classifier = ClassifierKind::KNearestNeighbor;
  double training_time = 0.0;
};

// Fits every kind on the train part of the first partition of `spec`.
std::vector<TimingRow> benchmark(std::span<const ClassifierKind> kinds, const Hyperparams& hyperparams,
                                 const Dataset& dataset, const SplitSpec& spec);

// Report rendering. CSV columns: classifier, TPR(%), FPR(%), Precision,
// Recall, F-measure, Accuracy score, training_time_s. Every metric is a
// percentage with 2 decimals; undefined metrics print as n/a.
std::string render_report_csv(std::span<const MetricsReport> reports);
// JSON keeps unrounded fractions (null when undefined).
std::string render_report_json(std::span<const MetricsReport> reports, std::uint64_t seed);
std::vector<MetricsReport> parse_report_json(std::string_view json);
std::string render_timing_csv(std::span<const TimingRow> rows);

inline constexpr std::string_view kReportCsvHeader =
    "classifier,TPR(%),FPR(%),Precision,Recall,F-measure,Accuracy score,training_time_s";
inline constexpr std::string_view kTimingCsvHeader = "classifier,training_time_s";

}  // namespace ransomnet
