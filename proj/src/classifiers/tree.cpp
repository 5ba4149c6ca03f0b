// C4.5-style induction: binary thresholds at midpoints between adjacent
// distinct values, threshold chosen per feature by information gain, and the
// feature chosen by gain ratio among candidates whose gain is at least the
// average candidate gain. No pruning.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "ransomnet/learners.hpp"

namespace ransomnet {

namespace {

constexpr double kMinGain = 1e-12;

double entropy(double pos, double neg) {
  const double n = pos + neg;
  double h = 0.0;
  if (pos > 0) h -= (pos / n) * std::log2(pos / n);
  if (neg > 0) h -= (neg / n) * std::log2(neg / n);
  return h;
}

double split_information(double left, double right) { return entropy(left, right); }

struct Candidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  double split_info = 0.0;
  bool valid = false;

  double gain_ratio() const { return split_info > 0.0 ? gain / split_info : 0.0; }
};

class Builder {
public:
  Builder(const TrainingMatrix& data, const TreeBuildOptions& options, Rng* rng, std::uint16_t* offered)
      : data_(data), options_(options), rng_(rng), offered_(offered) {}

  TreeState run(std::vector<std::size_t> indices) {
    grow(std::move(indices));
    return std::move(tree_);
  }

private:
  double value(std::size_t row, std::size_t feature) const { return data_.rows[row * kFeatureCount + feature]; }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> features(kFeatureCount);
    std::iota(features.begin(), features.end(), std::size_t{0});
    const std::size_t wanted = std::min<std::size_t>(options_.features_per_split, kFeatureCount);
    if (wanted < kFeatureCount && rng_ != nullptr) {
      // Partial Fisher-Yates, then restore ascending order for stable ties.
      for (std::size_t i = 0; i < wanted; ++i) std::swap(features[i], features[i + rng_->below(kFeatureCount - i)]);
      features.resize(wanted);
      std::sort(features.begin(), features.end());
    }
    if (offered_ != nullptr) {
      for (std::size_t f : features) *offered_ |= static_cast<std::uint16_t>(1u << f);
    }
    return features;
  }

  // Best threshold for one feature by information gain. `forced` instead
  // picks the most balanced boundary (used when no split gains anything).
  Candidate best_threshold(std::span<const std::size_t> indices, std::size_t feature, double parent_entropy,
                           std::uint32_t pos, std::uint32_t neg, bool forced) const {
    std::vector<std::size_t> sorted(indices.begin(), indices.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](std::size_t a, std::size_t b) { return value(a, feature) < value(b, feature); });
    const double n = static_cast<double>(sorted.size());
    Candidate best;
    best.feature = feature;
    double best_score = -1.0;
    double left_pos = 0.0;
    double left_neg = 0.0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      (data_.labels[sorted[i]] == Label::Ransomware ? left_pos : left_neg) += 1.0;
      const double lo = value(sorted[i], feature);
      const double hi = value(sorted[i + 1], feature);
      if (!(lo < hi)) continue;
      const double left = left_pos + left_neg;
      const double right = n - left;
      const double right_pos = pos - left_pos;
      const double right_neg = neg - left_neg;
      const double gain =
          parent_entropy - (left / n) * entropy(left_pos, left_neg) - (right / n) * entropy(right_pos, right_neg);
      const double split_info = split_information(left, right);
      const double score = forced ? split_info : gain;
      if (score > best_score) {
        best_score = score;
        double mid = lo + (hi - lo) / 2.0;
        if (!(mid < hi)) mid = lo;
        best.threshold = mid;
        best.gain = gain;
        best.split_info = split_info;
        best.valid = true;
      }
    }
    return best;
  }

  std::int32_t grow(std::vector<std::size_t> indices) {
    const auto node_index = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    TreeNode node;
    for (std::size_t i : indices) (data_.labels[i] == Label::Ransomware ? node.positives : node.negatives) += 1;

    const bool pure = node.positives == 0 || node.negatives == 0;
    if (pure || indices.size() < options_.min_leaf) {
      tree_.nodes[static_cast<std::size_t>(node_index)] = node;
      return node_index;
    }

    const double parent_entropy = entropy(node.positives, node.negatives);
    const auto features = candidate_features();
    std::vector<Candidate> candidates;
    for (std::size_t f : features) {
      Candidate c = best_threshold(indices, f, parent_entropy, node.positives, node.negatives, false);
      if (c.valid) candidates.push_back(c);
    }

    std::optional<Candidate> chosen;
    double total_gain = 0.0;
    std::size_t gaining = 0;
    for (const Candidate& c : candidates) {
      if (c.gain > kMinGain) {
        total_gain += c.gain;
        ++gaining;
      }
    }
    if (gaining > 0) {
      const double average_gain = total_gain / static_cast<double>(gaining);
      for (const Candidate& c : candidates) {
        if (c.gain <= kMinGain || c.gain < average_gain - kMinGain) continue;
        if (!chosen || c.gain_ratio() > chosen->gain_ratio()) chosen = c;
      }
    } else {
      // Impure node where no single threshold separates anything (XOR-like
      // layouts). Split anyway so conflict-free data is always fit exactly.
      for (std::size_t f : features) {
        Candidate c = best_threshold(indices, f, parent_entropy, node.positives, node.negatives, true);
        if (c.valid) {
          chosen = c;
          break;
        }
      }
    }

    if (!chosen) {
      tree_.nodes[static_cast<std::size_t>(node_index)] = node;
      return node_index;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : indices) (value(i, chosen->feature) <= chosen->threshold ? left : right).push_back(i);
    indices.clear();
    indices.shrink_to_fit();

    node.feature = static_cast<std::int32_t>(chosen->feature);
    node.threshold = chosen->threshold;
    node.left = grow(std::move(left));
    node.right = grow(std::move(right));
    tree_.nodes[static_cast<std::size_t>(node_index)] = node;
    return node_index;
  }

  const TrainingMatrix& data_;
  TreeBuildOptions options_;
  Rng* rng_;
  std::uint16_t* offered_;
  TreeState tree_;
};

}  // namespace

TreeState build_tree(const TrainingMatrix& data, std::span<const std::size_t> indices,
                     const TreeBuildOptions& options, Rng* rng, std::uint16_t* offered_features) {
  Builder builder(data, options, rng, offered_features);
  return builder.run(std::vector<std::size_t>(indices.begin(), indices.end()));
}

double tree_score(const TreeState& tree, std::span<const double> x) {
  if (tree.nodes.empty()) return 0.0;
  std::size_t at = 0;
  while (!tree.nodes[at].is_leaf()) {
    const TreeNode& node = tree.nodes[at];
    at = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
  }
  const TreeNode& leaf = tree.nodes[at];
  const std::uint32_t total = leaf.positives + leaf.negatives;
  return total == 0 ? 0.0 : static_cast<double>(leaf.positives) / static_cast<double>(total);
}

}  // namespace ransomnet
