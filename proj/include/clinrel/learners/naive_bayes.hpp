#pragma once

#include <string>
#include <vector>

#include "clinrel/learners/dataset.hpp"

namespace clinrel::learn {

/// Bernoulli naive Bayes over binary features (a value > 0 counts as present).
/// Likelihoods use add-one smoothing over the two outcomes and are kept in
/// log space for every (class, feature) pair seen in training.
struct NaiveBayesModel {
  std::vector<std::string> classes;
  std::vector<double> log_prior;
  std::vector<std::vector<double>> log_present;  // [class][feature]
  std::vector<std::vector<double>> log_absent;   // [class][feature]
  std::vector<double> sum_log_absent;            // per class

  std::size_t dimension() const { return log_present.empty() ? 0 : log_present.front().size(); }
};

struct NbPrediction {
  int label = 0;
  std::vector<double> log_posterior;  // unnormalised: log P(C) + log P(X|C)
};

/// Throws EmptyTrainingSet when there are no instances.
NaiveBayesModel nb_train(const TrainingSet& t);

/// Features outside the trained dimension are ignored. Ties go to the
/// smaller class id.
NbPrediction nb_classify(const NaiveBayesModel& model, const SparseVector& x);

}  // namespace clinrel::learn
