#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clinrel/learners/dataset.hpp"

namespace clinrel::learn {

struct C45Params {
  /// Minimum cases in at least two branches of a split; nodes with fewer
  /// than twice this many cases become leaves.
  std::size_t min_cases = 2;
  double confidence = 0.25;
  bool prune = true;
  /// Attributes whose values are category codes rather than magnitudes.
  std::set<std::uint32_t> discrete_attributes;
};

/// Entropy in bits of a class-count vector.
double info(const std::vector<double>& class_counts);

struct SplitStats {
  double gain = 0.0;
  double split_info = 0.0;
  /// gain / split_info; absent when split_info is zero.
  std::optional<double> ratio;
};

/// Gain, split information and gain ratio of a partition given as class
/// counts per branch. Empty branches contribute nothing.
SplitStats split_stats(const std::vector<std::vector<double>>& branch_class_counts);

/// Discrete attribute: one branch per distinct value.
SplitStats c45_gain_ratio(const std::vector<int>& labels, std::size_t n_classes, const std::vector<double>& values);

struct ThresholdSplit {
  double threshold = 0.0;  // midpoint between adjacent distinct values
  SplitStats stats;
};

/// Continuous attribute: the midpoint cut with the highest gain, with at
/// least `min_cases` on both sides. Absent when no cut qualifies.
std::optional<ThresholdSplit> c45_best_threshold(const std::vector<int>& labels, std::size_t n_classes,
                                                 const std::vector<double>& values, std::size_t min_cases = 1);

/// Upper confidence bound on errors at a leaf, as extra errors beyond `errors`.
double pessimistic_extra_errors(double cases, double errors, double confidence);

struct TreeNode {
  bool leaf = true;
  int label = 0;
  double cases = 0.0;
  std::vector<double> class_counts;  // training distribution reaching the node
  /// Decision nodes only.
  std::uint32_t attribute = 0;
  bool continuous = true;
  double threshold = 0.0;              // continuous: child 0 is value <= threshold
  std::vector<double> branch_values;   // discrete: child i takes branch_values[i]
  std::vector<std::size_t> children;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::vector<std::string> classes)
      : nodes_(std::move(nodes)), classes_(std::move(classes)) {}

  /// Leaf reached by x.
  const TreeNode& leaf_for(const SparseVector& x) const;
  int classify(const SparseVector& x) const { return leaf_for(x).label; }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;
  /// Indented text rendering, stable across runs.
  std::string describe() const;

 private:
  std::vector<TreeNode> nodes_;  // node 0 is the root
  std::vector<std::string> classes_;
};

/// Top-down induction with gain-ratio selection restricted to attributes of
/// at least mean positive gain, followed by pessimistic-error pruning.
/// Throws EmptyTrainingSet on an empty set.
DecisionTree c45_build(const TrainingSet& t, const C45Params& params = {});

}  // namespace clinrel::learn
