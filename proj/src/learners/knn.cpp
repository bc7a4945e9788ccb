#include "clinrel/learners/knn.hpp"

#include <algorithm>
#include <cmath>

namespace clinrel::learn {

KnnModel knn_train(std::shared_ptr<const std::vector<SparseVector>> rows, const KnnParams& params) {
  if (params.k == 0) throw std::invalid_argument("k must be at least 1");
  if (!rows || rows->empty()) throw EmptyTrainingSet("KNN needs at least one stored instance");
  KnnModel m;
  m.k = params.k;
  m.rows = std::move(rows);
  return m;
}

std::vector<Neighbor> knn_neighbors(const KnnModel& model, const SparseVector& x) {
  if (model.size() == 0) throw EmptyTrainingSet("KNN model holds no instances");
  std::vector<Neighbor> all;
  all.reserve(model.size());
  for (std::size_t i = 0; i < model.size(); ++i)
    all.push_back({i, std::sqrt(squared_distance((*model.rows)[i], x))});
  auto by_distance = [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  };
  const std::size_t k = std::min(model.k, all.size());
  std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k - 1), all.end(), by_distance);
  const double kth = all[k - 1].distance;
  std::vector<Neighbor> out;
  for (const auto& n : all)
    if (n.distance <= kth) out.push_back(n);
  std::sort(out.begin(), out.end(), by_distance);
  return out;
}

std::vector<double> knn_votes(const std::vector<Neighbor>& neighbors, const std::vector<int>& labels,
                              std::size_t n_classes) {
  std::vector<double> votes(n_classes, 0.0);
  const bool exact = std::any_of(neighbors.begin(), neighbors.end(), [](const Neighbor& n) { return n.distance == 0.0; });
  for (const auto& n : neighbors) {
    const auto c = static_cast<std::size_t>(labels[n.index]);
    if (exact) {
      if (n.distance == 0.0) votes[c] += 1.0;
    } else {
      votes[c] += 1.0 / (n.distance * n.distance);
    }
  }
  return votes;
}

int knn_classify(const KnnModel& model, const std::vector<int>& labels, std::size_t n_classes,
                 const SparseVector& x) {
  const auto votes = knn_votes(knn_neighbors(model, x), labels, n_classes);
  int best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c)
    if (votes[c] > votes[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  return best;
}

}  // namespace clinrel::learn
