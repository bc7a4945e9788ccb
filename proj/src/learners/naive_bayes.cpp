#include "clinrel/learners/naive_bayes.hpp"

#include <algorithm>
#include <cmath>

namespace clinrel::learn {

namespace {
constexpr double kTieTolerance = 1e-12;
}  // namespace

NaiveBayesModel nb_train(const TrainingSet& t) {
  if (t.size() == 0) throw EmptyTrainingSet("naive Bayes needs at least one training instance");
  const std::size_t n_classes = t.classes.size();
  std::size_t dim = 0;
  for (const auto& row : t.rows)
    if (!row.empty()) dim = std::max<std::size_t>(dim, row.back().index + 1);

  std::vector<double> class_count(n_classes, 0.0);
  std::vector<std::vector<double>> present(n_classes, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto c = static_cast<std::size_t>(t.labels[i]);
    class_count[c] += 1.0;
    for (const auto& e : t.rows[i])
      if (e.value > 0.0) present[c][e.index] += 1.0;
  }

  NaiveBayesModel m;
  m.classes = t.classes;
  m.log_prior.resize(n_classes);
  m.log_present.assign(n_classes, std::vector<double>(dim));
  m.log_absent.assign(n_classes, std::vector<double>(dim));
  m.sum_log_absent.assign(n_classes, 0.0);
  const double total = static_cast<double>(t.size());
  for (std::size_t c = 0; c < n_classes; ++c) {
    // A class with no instances keeps a -inf prior and can never win.
    m.log_prior[c] = std::log(class_count[c] / total);
    for (std::size_t f = 0; f < dim; ++f) {
      const double p = (present[c][f] + 1.0) / (class_count[c] + 2.0);
      m.log_present[c][f] = std::log(p);
      m.log_absent[c][f] = std::log1p(-p);
      m.sum_log_absent[c] += m.log_absent[c][f];
    }
  }
  return m;
}

NbPrediction nb_classify(const NaiveBayesModel& model, const SparseVector& x) {
  NbPrediction out;
  const std::size_t dim = model.dimension();
  out.log_posterior.resize(model.classes.size());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    double s = model.log_prior[c] + model.sum_log_absent[c];
    for (const auto& e : x)
      if (e.value > 0.0 && e.index < dim) s += model.log_present[c][e.index] - model.log_absent[c][e.index];
    out.log_posterior[c] = s;
  }
  // Summation order differs between classes, so exact ties can come out a
  // few ulps apart; anything within that noise is treated as a tie.
  for (std::size_t c = 1; c < out.log_posterior.size(); ++c) {
    const double best = out.log_posterior[static_cast<std::size_t>(out.label)];
    if (out.log_posterior[c] > best + kTieTolerance * std::max(1.0, std::abs(best))) out.label = static_cast<int>(c);
  }
  return out;
}

}  // namespace clinrel::learn
