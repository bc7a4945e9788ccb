#include "clinrel/learners/dataset.hpp"

#include <algorithm>
#include <set>

namespace clinrel::learn {

TrainingSet TrainingSet::from_labels(std::vector<SparseVector> rows, const std::vector<std::string>& labels) {
  if (rows.size() != labels.size()) throw std::invalid_argument("rows and labels differ in length");
  std::set<std::string> names(labels.begin(), labels.end());
  TrainingSet t;
  t.classes.assign(names.begin(), names.end());
  t.rows = std::move(rows);
  t.labels.reserve(labels.size());
  for (const auto& l : labels) {
    auto it = std::lower_bound(t.classes.begin(), t.classes.end(), l);
    t.labels.push_back(static_cast<int>(it - t.classes.begin()));
  }
  return t;
}

std::size_t BinaryProblem::positives() const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

TrainingSet as_training_set(const BinaryProblem& p) {
  TrainingSet t;
  t.classes = binary_class_names();
  t.rows.assign(p.rows.begin(), p.rows.end());
  t.labels.reserve(p.y.size());
  for (int y : p.y) t.labels.push_back(y > 0 ? 1 : 0);
  return t;
}

}  // namespace clinrel::learn
