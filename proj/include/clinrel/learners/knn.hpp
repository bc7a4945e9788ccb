#pragma once

#include <memory>
#include <string>
#include <vector>

#include "clinrel/learners/dataset.hpp"

namespace clinrel::learn {

struct KnnParams {
  std::size_t k = 2;
};

/// Stored instances; many binary views may share one row set.
struct KnnModel {
  std::shared_ptr<const std::vector<SparseVector>> rows;
  std::size_t k = 2;

  std::size_t size() const { return rows ? rows->size() : 0; }
};

struct Neighbor {
  std::size_t index;
  double distance;  // Euclidean
};

/// Throws EmptyTrainingSet on no rows and std::invalid_argument on k = 0.
KnnModel knn_train(std::shared_ptr<const std::vector<SparseVector>> rows, const KnnParams& params = {});

/// The k nearest instances plus every instance tied with the k-th distance,
/// ordered by (distance, index).
std::vector<Neighbor> knn_neighbors(const KnnModel& model, const SparseVector& x);

/// Per-class votes over the given neighbors. When any neighbor has distance
/// zero only those neighbors vote, one vote each; otherwise each votes 1/d^2.
std::vector<double> knn_votes(const std::vector<Neighbor>& neighbors, const std::vector<int>& labels,
                              std::size_t n_classes);

/// Highest vote; ties go to the smaller class id.
int knn_classify(const KnnModel& model, const std::vector<int>& labels, std::size_t n_classes,
                 const SparseVector& x);

}  // namespace clinrel::learn
