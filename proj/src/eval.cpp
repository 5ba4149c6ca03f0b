#include "ransomnet/eval.hpp"

#include <algorithm>
#include <cmath>

#include "ransomnet/rng.hpp"

namespace ransomnet {

ConfusionCounts confusion(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size()) {
    throw Error(ErrorCode::LengthMismatch, "predictions and truths differ in length");
  }
  if (predictions.empty()) throw Error(ErrorCode::EmptyInput, "no predictions to score");
  ConfusionCounts counts;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool predicted = predictions[i] == Label::Ransomware;
    const bool actual = truths[i] == Label::Ransomware;
    if (predicted && actual) ++counts.tp;
    else if (predicted) ++counts.fp;
    else if (actual) ++counts.fn;
    else ++counts.tn;
  }
  return counts;
}

namespace {

Metric ratio(std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace

Metrics metrics(const ConfusionCounts& c) {
  Metrics m;
  m.tpr = ratio(c.tp, c.tp + c.fn);
  m.fpr = ratio(c.fp, c.fp + c.tn);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = m.tpr;
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f_measure = 2.0 * (*m.recall * *m.precision) / (*m.recall + *m.precision);
  }
  m.accuracy = ratio(c.tp + c.tn, c.total());
  return m;
}

std::vector<Partition> split(const Dataset& dataset, const SplitSpec& spec) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    by_class[static_cast<std::size_t>(dataset.samples[i].label)].push_back(i);
  }
  Rng rng(spec.seed);
  for (auto& members : by_class) rng.shuffle(members.begin(), members.end());

  std::vector<Partition> partitions;
  if (spec.mode == SplitSpec::Mode::Holdout) {
    if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) {
      throw Error(ErrorCode::InvalidHyperparams, "holdout ratio must lie strictly between 0 and 1");
    }
    Partition p;
    for (const auto& members : by_class) {
      if (members.size() < 2) throw Error(ErrorCode::TooFewSamples, "holdout needs at least 2 samples per class");
      auto train_count = static_cast<std::size_t>(std::llround(spec.ratio * static_cast<double>(members.size())));
      train_count = std::clamp<std::size_t>(train_count, 1, members.size() - 1);
      p.train.insert(p.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(train_count));
      p.test.insert(p.test.end(), members.begin() + static_cast<std::ptrdiff_t>(train_count), members.end());
    }
    std::sort(p.train.begin(), p.train.end());
    std::sort(p.test.begin(), p.test.end());
    partitions.push_back(std::move(p));
    return partitions;
  }

  if (spec.k < 2) throw Error(ErrorCode::InvalidHyperparams, "k-fold needs k >= 2");
  for (const auto& members : by_class) {
    if (members.size() < spec.k) {
      throw Error(ErrorCode::TooFewSamples, "every fold needs at least one sample of each class");
    }
  }
  // Deal class by class round-robin, continuing the fold counter across
  // classes so fold sizes differ by at most one.
  std::vector<std::vector<std::size_t>> folds(spec.k);
  std::size_t position = 0;
  for (const auto& members : by_class) {
    for (std::size_t index : members) folds[position++ % spec.k].push_back(index);
  }
  for (std::size_t f = 0; f < spec.k; ++f) {
    Partition p;
    p.test = folds[f];
    for (std::size_t g = 0; g < spec.k; ++g) {
      if (g != f) p.train.insert(p.train.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(p.train.begin(), p.train.end());
    std::sort(p.test.begin(), p.test.end());
    partitions.push_back(std::move(p));
  }
  return partitions;
}

Dataset subset(const Dataset& dataset, std::span<const std::size_t> indices) {
  Dataset out;
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) out.samples.push_back(dataset.samples.at(i));
  return out;
}

MetricsReport evaluate_model(const TrainedModel& model, const Dataset& dataset, std::span<const std::size_t> test) {
  std::vector<Label> predicted;
  std::vector<Label> truths;
  predicted.reserve(test.size());
  truths.reserve(test.size());
  for (std::size_t i : test) {
    const LabeledSample& sample = dataset.samples.at(i);
    predicted.push_back(predict(model, sample.features).label);
    truths.push_back(sample.label);
  }
  MetricsReport report;
  report.classifier = model.kind;
  report.counts = confusion(predicted, truths);
  report.metrics = metrics(report.counts);
  report.training_time = model.training_time;
  return report;
}

MetricsReport mean_report(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no reports to average");
  MetricsReport mean;
  mean.classifier = reports.front().classifier;
  auto average = [&](Metric Metrics::*field) -> Metric {
    double total = 0.0;
    for (const MetricsReport& r : reports) {
      const Metric& m = r.metrics.*field;
      if (!m) return std::nullopt;
      total += *m;
    }
    return total / static_cast<double>(reports.size());
  };
  mean.metrics.tpr = average(&Metrics::tpr);
  mean.metrics.fpr = average(&Metrics::fpr);
  mean.metrics.precision = average(&Metrics::precision);
  mean.metrics.recall = average(&Metrics::recall);
  mean.metrics.f_measure = average(&Metrics::f_measure);
  mean.metrics.accuracy = average(&Metrics::accuracy);
  double time = 0.0;
  for (const MetricsReport& r : reports) {
    time += r.training_time;
    mean.counts.tp += r.counts.tp;
    mean.counts.fp += r.counts.fp;
    mean.counts.tn += r.counts.tn;
    mean.counts.fn += r.counts.fn;
  }
  mean.training_time = time / static_cast<double>(reports.size());
  return mean;
}

Evaluation evaluate(ClassifierKind kind, const Hyperparams& hyperparams, const Dataset& dataset,
                    const SplitSpec& spec) {
  Evaluation result;
  for (const Partition& p : split(dataset, spec)) {
    const TrainedModel model = train(kind, hyperparams, subset(dataset, p.train));
    result.folds.push_back(evaluate_model(model, dataset, p.test));
    result.train_fingerprints.push_back(model.train_fingerprint);
  }
  result.summary = result.folds.size() == 1 ? result.folds.front() : mean_report(result.folds);
  return result;
}

std::vector<TimingRow> benchmark(std::span<const ClassifierKind> kinds, const Hyperparams& hyperparams,
                                 const Dataset& dataset, const SplitSpec& spec) {
  if (kinds.empty()) throw Error(ErrorCode::EmptyInput, "no classifier kinds to benchmark");
  const Dataset train_part = subset(dataset, split(dataset, spec).front().train);
  std::vector<TimingRow> rows;
  for (ClassifierKind kind : kinds) rows.push_back({kind, train(kind, hyperparams, train_part).training_time});
  return rows;
}

}  // namespace ransomnet
