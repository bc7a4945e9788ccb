#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinrel/learners/c45.hpp"
#include "clinrel/learners/dataset.hpp"
#include "clinrel/learners/knn.hpp"
#include "clinrel/learners/naive_bayes.hpp"
#include "clinrel/learners/paum.hpp"
#include "clinrel/learners/svm.hpp"

namespace clinrel::learn {

enum class Algorithm { NaiveBayes, C45, Knn, Paum, Svm };

inline constexpr std::string_view kNullLabel = "Null";

const std::vector<Algorithm>& all_algorithms();
/// Short names: nb, c45, knn, paum, svm.
std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);
/// Report labels: "Naive Bayes Weka", "C4.5Weka", "KNN Weka", "PAUM", "SVM UM".
std::string_view display_name(Algorithm a);

struct Hyperparameters {
  C45Params c45;
  KnnParams knn;
  PaumParams paum;
  SmoParams svm;
  double tau = 0.8;  // uneven-margin ratio applied to the SVM decision

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// One class against the rest.
struct BinaryModel {
  /// Set when training saw only one side; the score is then this constant.
  std::optional<double> constant_score;
  std::optional<NaiveBayesModel> nb;
  std::optional<DecisionTree> tree;
  std::optional<LinearModel> linear;
  std::vector<int> knn_labels;      // 1 for positive, per stored row
  std::vector<std::uint32_t> sv;    // indices into OvaModel::pool
  std::vector<double> coef;         // alpha_i y_i, parallel to sv
  double b = 0.0;
};

struct OvaModel {
  Algorithm algorithm = Algorithm::Svm;
  Hyperparameters hp;
  std::vector<std::string> classes;  // non-Null labels, sorted
  std::vector<BinaryModel> models;   // parallel to classes
  /// KNN: every stored training row. SVM: the union of support vectors.
  std::shared_ptr<const std::vector<SparseVector>> pool;

  /// Raw per-class scores; for SVM the standard (tau = 1) decision values.
  std::vector<double> standard_scores(const SparseVector& x) const;
  /// Per-class scores used for the decision; SVM applies hp.tau.
  std::vector<double> scores(const SparseVector& x) const;
};

/// Class with the greatest positive score, Null when none is positive.
/// Equal scores resolve to the lexicographically smaller label.
std::string ova_decide(const std::vector<std::string>& classes, const std::vector<double>& scores);

/// Trains one model per non-Null label of `t`. A label with no positive
/// instances gets a constant negative score and a warning.
OvaModel ova_train(const TrainingSet& t, Algorithm algorithm, const Hyperparameters& hp);

std::string ova_classify(const OvaModel& model, const SparseVector& x);

}  // namespace clinrel::learn
