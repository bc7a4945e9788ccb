#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clinrel/sparse.hpp"

namespace clinrel::learn {

/// Multi-class training data. Class ids index `classes`, which is sorted so
/// that a smaller id is the lexicographically smaller label.
struct TrainingSet {
  std::vector<SparseVector> rows;
  std::vector<int> labels;
  std::vector<std::string> classes;

  std::size_t size() const { return rows.size(); }

  /// Builds class ids from string labels.
  static TrainingSet from_labels(std::vector<SparseVector> rows, const std::vector<std::string>& labels);
};

/// Two-class data with y in {+1, -1}. Rows are borrowed.
struct BinaryProblem {
  std::span<const SparseVector> rows;
  std::vector<int> y;

  std::size_t size() const { return rows.size(); }
  std::size_t positives() const;
};

/// Labels used when a binary problem runs through a multi-class learner;
/// "neg" < "pos", so ties resolve to the negative class.
inline const std::vector<std::string>& binary_class_names() {
  static const std::vector<std::string> names = {"neg", "pos"};
  return names;
}

/// Binary problem as a two-class training set (class 1 = positive).
TrainingSet as_training_set(const BinaryProblem& p);

class EmptyTrainingSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace clinrel::learn
