#include <doctest.h>

#include <algorithm>
#include <set>

#include "ransomnet/eval.hpp"
#include "support/test_support.hpp"

using namespace ransomnet;

namespace {

constexpr Label R = Label::Ransomware;
constexpr Label B = Label::Benign;

Dataset labelled(std::size_t positives, std::size_t negatives) {
  Dataset d;
  for (std::size_t i = 0; i < positives + negatives; ++i) {
    LabeledSample s;
    s.features[0] = static_cast<double>(i);
    s.label = i < positives ? R : B;
    d.samples.push_back(s);
  }
  return d;
}

}  // namespace

TEST_CASE("confusion counts") {
  std::vector<Label> truth = {R, R, R, B, B};
  CHECK(confusion(truth, truth) == ConfusionCounts{3, 0, 2, 0});
  std::vector<Label> all_r(4, R), all_b(4, B);
  CHECK(confusion(all_r, all_b) == ConfusionCounts{0, 4, 0, 0});
  CHECK_THROWS_AS(confusion(all_r, truth), Error);
  CHECK_THROWS_AS(confusion(std::span<const Label>{}, std::span<const Label>{}), Error);

  Rng rng(8);
  std::vector<Label> p, t;
  for (int i = 0; i < 200; ++i) {
    p.push_back(rng.below(2) ? R : B);
    t.push_back(rng.below(2) ? R : B);
  }
  ConfusionCounts tally;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == R && t[i] == R) ++tally.tp;
    if (p[i] == R && t[i] == B) ++tally.fp;
    if (p[i] == B && t[i] == B) ++tally.tn;
    if (p[i] == B && t[i] == R) ++tally.fn;
  }
  CHECK(confusion(p, t) == tally);
}

TEST_CASE("metrics for the published mlp row") {
  auto m = metrics({973, 18, 982, 27});
  CHECK(*m.tpr == doctest::Approx(0.9730).epsilon(1e-12));
  CHECK(*m.fpr == doctest::Approx(0.0180).epsilon(1e-12));
  CHECK(*m.recall == *m.tpr);
  CHECK(*m.f_measure == doctest::Approx(2 * *m.precision * *m.recall / (*m.precision + *m.recall)));
}

TEST_CASE("undefined metrics") {
  auto m = metrics({0, 0, 10, 0});
  CHECK(m.accuracy == 1.0);
  CHECK_FALSE(m.tpr);
  CHECK_FALSE(m.precision);
  CHECK_FALSE(m.f_measure);
  CHECK(m.fpr == 0.0);
  auto zero = metrics({0, 3, 0, 2});
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK_FALSE(zero.f_measure);
}

TEST_CASE("holdout split is stratified") {
  auto d = labelled(5, 5);
  auto parts = split(d, SplitSpec::holdout(0.8, 42));
  REQUIRE(parts.size() == 1);
  CHECK(parts[0].train.size() == 8);
  CHECK(parts[0].test.size() == 2);
  CHECK(subset(d, parts[0].test).count(R) == 1);
  CHECK(subset(d, parts[0].train).count(R) == 4);
  auto again = split(d, SplitSpec::holdout(0.8, 42));
  CHECK(again[0].train == parts[0].train);
  CHECK_THROWS_AS(split(labelled(1, 5), SplitSpec::holdout(0.8)), Error);
  CHECK_THROWS_AS(split(d, SplitSpec::holdout(1.0)), Error);
}

TEST_CASE("kfold partitions the corpus sized set") {
  auto d = labelled(396, 420);
  auto folds = split(d, SplitSpec::kfold(5, 42));
  REQUIRE(folds.size() == 5);
  std::multiset<std::size_t> sizes;
  std::vector<int> seen(d.size(), 0);
  for (const auto& f : folds) {
    sizes.insert(f.test.size());
    CHECK(f.train.size() + f.test.size() == d.size());
    for (auto i : f.test) ++seen[i];
    CHECK(subset(d, f.test).count(R) >= 1);
    CHECK(subset(d, f.test).count(B) >= 1);
    CHECK(std::is_sorted(f.test.begin(), f.test.end()));
  }
  CHECK(sizes == std::multiset<std::size_t>{163, 163, 163, 163, 164});
  CHECK(std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; }));
  CHECK_THROWS_AS(split(d, SplitSpec::kfold(1)), Error);
  CHECK_THROWS_AS(split(labelled(3, 20), SplitSpec::kfold(4)), Error);
}

TEST_CASE("separable data scores perfectly") {
  auto d = testsupport::gaussian_clusters(60, 60, 14, 8.0);
  for (auto kind : kAllClassifierKinds) {
    CAPTURE(to_string(kind));
    auto e = evaluate(kind, testsupport::fast_hyperparams(), d, SplitSpec::holdout(0.8));
    CHECK(e.summary.metrics.accuracy == 1.0);
    CHECK(e.summary.counts.total() == 24);
  }
}

TEST_CASE("random labels score near the majority rate") {
  double total_gap = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto d = testsupport::gaussian_clusters(100, 100, seed, 0.0);
    Rng rng(seed * 31);
    for (auto& s : d.samples) s.label = rng.below(2) ? R : B;
    auto e = evaluate(ClassifierKind::BayesNetwork, testsupport::fast_hyperparams(seed), d, SplitSpec::holdout(0.8, seed));
    const double majority = std::max(d.count(R), d.count(B)) / static_cast<double>(d.size());
    total_gap += std::abs(*e.summary.metrics.accuracy - majority);
  }
  CHECK(total_gap / 10 < 0.10);
}

TEST_CASE("kfold mean is the mean of folds") {
  auto d = testsupport::gaussian_clusters(30, 30, 15, 1.0);
  auto e = evaluate(ClassifierKind::KNearestNeighbor, Hyperparams{}, d, SplitSpec::kfold(3));
  REQUIRE(e.folds.size() == 3);
  double sum = 0;
  for (const auto& f : e.folds) sum += *f.metrics.accuracy;
  CHECK(*e.summary.metrics.accuracy == sum / 3);
  CHECK(e.summary.counts.total() == 60);
  CHECK(e.train_fingerprints.size() == 3);
}

TEST_CASE("benchmark rows") {
  auto d = testsupport::gaussian_clusters(30, 30, 16);
  std::vector<ClassifierKind> one = {ClassifierKind::BayesNetwork};
  auto rows = benchmark(one, Hyperparams{}, d, SplitSpec::holdout(0.8));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].training_time > 0);
}

TEST_CASE("report rendering") {
  MetricsReport r;
  r.classifier = ClassifierKind::MultilayerPerceptron;
  r.counts = {973, 18, 982, 27};
  r.metrics = metrics(r.counts);
  r.training_time = 1.5;
  MetricsReport u;
  u.classifier = ClassifierKind::BayesNetwork;
  u.counts = {0, 0, 10, 0};
  u.metrics = metrics(u.counts);
  std::vector<MetricsReport> reports = {r, u};
  const std::string csv = render_report_csv(reports);
  CHECK(csv.starts_with(std::string(kReportCsvHeader) + "\nMultilayerPerceptron,97.30,1.80,"));
  CHECK(csv.find("\nBayesNetwork,n/a,0.00,n/a,n/a,n/a,100.00,") != std::string::npos);

  auto back = parse_report_json(render_report_json(reports, 42));
  CHECK(back == reports);

  std::vector<TimingRow> rows = {{ClassifierKind::KNearestNeighbor, 0.09}};
  CHECK(render_timing_csv(rows) == std::string(kTimingCsvHeader) + "\nKNearestNeighbor,0.090000\n");
}
