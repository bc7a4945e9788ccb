#include "clinrel/learners/ova.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>

namespace clinrel::learn {

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> v = {Algorithm::NaiveBayes, Algorithm::C45, Algorithm::Knn, Algorithm::Paum,
                                           Algorithm::Svm};
  return v;
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::NaiveBayes: return "nb";
    case Algorithm::C45: return "c45";
    case Algorithm::Knn: return "knn";
    case Algorithm::Paum: return "paum";
    case Algorithm::Svm: return "svm";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : all_algorithms())
    if (to_string(a) == name) return a;
  return std::nullopt;
}

std::string_view display_name(Algorithm a) {
  switch (a) {
    case Algorithm::NaiveBayes: return "Naive Bayes Weka";
    case Algorithm::C45: return "C4.5Weka";
    case Algorithm::Knn: return "KNN Weka";
    case Algorithm::Paum: return "PAUM";
    case Algorithm::Svm: return "SVM UM";
  }
  return "?";
}

void Hyperparameters::validate() const {
  if (c45.min_cases < 1) throw std::invalid_argument("min_cases must be at least 1");
  if (!(c45.confidence > 0.0 && c45.confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  if (knn.k < 1) throw std::invalid_argument("k must be at least 1");
  if (!(paum.tau_pos >= 0.0 && paum.tau_neg >= 0.0)) throw std::invalid_argument("PAUM margins must be non-negative");
  if (!(paum.eta > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (paum.max_epochs < 1) throw std::invalid_argument("max epochs must be at least 1");
  if (!(svm.C > 0.0)) throw std::invalid_argument("C must be positive");
  if (!(svm.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(svm.cache_mb > 0.0)) throw std::invalid_argument("cache size must be positive");
  svm.kernel.validate();
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
}

std::vector<double> OvaModel::standard_scores(const SparseVector& x) const {
  std::vector<double> out(classes.size(), 0.0);
  std::vector<Neighbor> neighbors;
  std::vector<double> kernel_row;
  if (algorithm == Algorithm::Knn && pool && !pool->empty()) {
    KnnModel km{pool, hp.knn.k};
    neighbors = knn_neighbors(km, x);
  }
  if (algorithm == Algorithm::Svm) {
    kernel_row.resize(pool ? pool->size() : 0);
    for (std::size_t i = 0; i < kernel_row.size(); ++i) kernel_row[i] = kernel_eval(hp.svm.kernel, (*pool)[i], x);
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& m = models[c];
    if (m.constant_score) {
      out[c] = *m.constant_score;
      continue;
    }
    switch (algorithm) {
      case Algorithm::NaiveBayes: {
        const auto p = nb_classify(*m.nb, x);
        out[c] = p.log_posterior[1] - p.log_posterior[0];
        break;
      }
      case Algorithm::C45: {
        const auto& leaf = m.tree->leaf_for(x);
        const double n = leaf.class_counts[0] + leaf.class_counts[1];
        out[c] = n > 0.0 ? (leaf.class_counts[1] - leaf.class_counts[0]) / n : 0.0;
        break;
      }
      case Algorithm::Knn: {
        const auto v = knn_votes(neighbors, m.knn_labels, 2);
        const double w = v[0] + v[1];
        out[c] = w > 0.0 ? (v[1] - v[0]) / w : 0.0;
        break;
      }
      case Algorithm::Paum: out[c] = m.linear->decision(x); break;
      case Algorithm::Svm: {
        double f = m.b;
        for (std::size_t i = 0; i < m.sv.size(); ++i) f += m.coef[i] * kernel_row[m.sv[i]];
        out[c] = f;
        break;
      }
    }
  }
  return out;
}

std::vector<double> OvaModel::scores(const SparseVector& x) const {
  auto s = standard_scores(x);
  if (algorithm == Algorithm::Svm)
    for (std::size_t c = 0; c < s.size(); ++c)
      if (!models[c].constant_score) s[c] = uneven_margin(s[c], hp.tau);
  return s;
}

std::string ova_decide(const std::vector<std::string>& classes, const std::vector<double>& scores) {
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!(scores[c] > 0.0)) continue;
    if (!best || scores[c] > scores[*best] || (scores[c] == scores[*best] && classes[c] < classes[*best])) best = c;
  }
  return best ? classes[*best] : std::string(kNullLabel);
}

OvaModel ova_train(const TrainingSet& t, Algorithm algorithm, const Hyperparameters& hp) {
  hp.validate();
  OvaModel model;
  model.algorithm = algorithm;
  model.hp = hp;
  for (const auto& c : t.classes)
    if (c != kNullLabel) model.classes.push_back(c);
  std::sort(model.classes.begin(), model.classes.end());

  std::unique_ptr<KernelCache> cache;
  std::map<std::size_t, std::uint32_t> pool_slot;  // training row -> pool index
  if (algorithm == Algorithm::Knn) model.pool = std::make_shared<const std::vector<SparseVector>>(t.rows);
  if (algorithm == Algorithm::Svm) cache = std::make_unique<KernelCache>(t.rows, hp.svm.kernel, hp.svm.cache_mb);

  for (const auto& cls : model.classes) {
    const auto id = static_cast<int>(std::lower_bound(t.classes.begin(), t.classes.end(), cls) - t.classes.begin());
    BinaryProblem p{t.rows, {}};
    p.y.reserve(t.size());
    for (int l : t.labels) p.y.push_back(l == id ? 1 : -1);
    const std::size_t pos = p.positives();

    BinaryModel bm;
    if (pos == 0) {
      spdlog::warn("class {} has no positive training instances; using a constant negative model", cls);
      bm.constant_score = -1.0;
    } else if (pos == p.size()) {
      spdlog::warn("class {} has no negative training instances; using a constant positive model", cls);
      bm.constant_score = 1.0;
    } else {
      switch (algorithm) {
        case Algorithm::NaiveBayes: bm.nb = nb_train(as_training_set(p)); break;
        case Algorithm::C45: bm.tree = c45_build(as_training_set(p), hp.c45); break;
        case Algorithm::Knn:
          bm.knn_labels.reserve(p.size());
          for (int y : p.y) bm.knn_labels.push_back(y > 0 ? 1 : 0);
          break;
        case Algorithm::Paum: bm.linear = paum_train(p, hp.paum); break;
        case Algorithm::Svm: {
          const auto s = smo_train(p, hp.svm, cache.get());
          if (!s.converged) spdlog::warn("SMO for class {} stopped at the iteration limit", cls);
          bm.b = s.b;
          for (std::size_t i = 0; i < p.size(); ++i) {
            if (s.alpha[i] <= 0.0) continue;
            auto [it, fresh] = pool_slot.emplace(i, static_cast<std::uint32_t>(pool_slot.size()));
            bm.sv.push_back(it->second);
            bm.coef.push_back(s.alpha[i] * p.y[i]);
          }
          break;
        }
      }
    }
    model.models.push_back(std::move(bm));
  }

  if (algorithm == Algorithm::Svm) {
    auto pool = std::make_shared<std::vector<SparseVector>>(pool_slot.size());
    for (const auto& [row, slot] : pool_slot) (*pool)[slot] = t.rows[row];
    model.pool = std::move(pool);
  }
  return model;
}

std::string ova_classify(const OvaModel& model, const SparseVector& x) {
  return ova_decide(model.classes, model.scores(x));
}

}  // namespace clinrel::learn
