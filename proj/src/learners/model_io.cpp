#include "clinrel/learners/model_io.hpp"

#include <set>
#include <stdexcept>

namespace clinrel::learn {

using nlohmann::ordered_json;

namespace {

void reject_unknown(const ordered_json& j, std::initializer_list<const char*> known, const char* where) {
  if (!j.is_object()) throw std::runtime_error(std::string(where) + " must be an object");
  std::set<std::string> names(known.begin(), known.end());
  for (const auto& [key, _] : j.items())
    if (names.count(key) == 0) throw std::runtime_error("unknown field '" + key + "' in " + where);
}

ordered_json sparse_to_json(const SparseVector& v) {
  auto out = ordered_json::array();
  for (const auto& e : v) out.push_back(ordered_json::array({e.index, e.value}));
  return out;
}

SparseVector sparse_from_json(const ordered_json& j) {
  SparseVector v;
  for (const auto& e : j) v.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i].index <= v[i - 1].index) throw std::runtime_error("sparse vector indices must increase");
  return v;
}

ordered_json tree_to_json(const DecisionTree& t) {
  auto nodes = ordered_json::array();
  for (const auto& n : t.nodes()) {
    ordered_json o;
    o["leaf"] = n.leaf;
    o["label"] = n.label;
    o["cases"] = n.cases;
    o["class_counts"] = n.class_counts;
    if (!n.leaf) {
      o["attribute"] = n.attribute;
      o["continuous"] = n.continuous;
      o["threshold"] = n.threshold;
      o["branch_values"] = n.branch_values;
      o["children"] = n.children;
    }
    nodes.push_back(std::move(o));
  }
  return {{"classes", t.classes()}, {"nodes", nodes}};
}

DecisionTree tree_from_json(const ordered_json& j) {
  reject_unknown(j, {"classes", "nodes"}, "tree");
  std::vector<TreeNode> nodes;
  for (const auto& o : j.at("nodes")) {
    reject_unknown(o, {"leaf", "label", "cases", "class_counts", "attribute", "continuous", "threshold",
                       "branch_values", "children"},
                   "tree node");
    TreeNode n;
    n.leaf = o.at("leaf").get<bool>();
    n.label = o.at("label").get<int>();
    n.cases = o.at("cases").get<double>();
    n.class_counts = o.at("class_counts").get<std::vector<double>>();
    if (!n.leaf) {
      n.attribute = o.at("attribute").get<std::uint32_t>();
      n.continuous = o.at("continuous").get<bool>();
      n.threshold = o.at("threshold").get<double>();
      n.branch_values = o.at("branch_values").get<std::vector<double>>();
      n.children = o.at("children").get<std::vector<std::size_t>>();
    }
    nodes.push_back(std::move(n));
  }
  for (const auto& n : nodes)
    for (auto c : n.children)
      if (c >= nodes.size()) throw std::runtime_error("tree child index out of range");
  if (nodes.empty()) throw std::runtime_error("tree has no nodes");
  return DecisionTree(std::move(nodes), j.at("classes").get<std::vector<std::string>>());
}

ordered_json binary_to_json(const BinaryModel& m, Algorithm a) {
  ordered_json o = ordered_json::object();
  if (m.constant_score) {
    o["constant_score"] = *m.constant_score;
    return o;
  }
  switch (a) {
    case Algorithm::NaiveBayes:
      o["classes"] = m.nb->classes;
      o["log_prior"] = m.nb->log_prior;
      o["log_present"] = m.nb->log_present;
      o["log_absent"] = m.nb->log_absent;
      o["sum_log_absent"] = m.nb->sum_log_absent;
      break;
    case Algorithm::C45: o["tree"] = tree_to_json(*m.tree); break;
    case Algorithm::Knn: o["labels"] = m.knn_labels; break;
    case Algorithm::Paum:
      o["w"] = m.linear->w;
      o["b"] = m.linear->b;
      o["converged"] = m.linear->converged;
      o["epochs"] = m.linear->epochs;
      o["updates"] = m.linear->updates;
      break;
    case Algorithm::Svm:
      o["support"] = m.sv;
      o["coef"] = m.coef;
      o["b"] = m.b;
      break;
  }
  return o;
}

BinaryModel binary_from_json(const ordered_json& o, Algorithm a, std::size_t pool_size) {
  BinaryModel m;
  if (o.contains("constant_score")) {
    reject_unknown(o, {"constant_score"}, "class model");
    m.constant_score = o.at("constant_score").get<double>();
    return m;
  }
  switch (a) {
    case Algorithm::NaiveBayes: {
      reject_unknown(o, {"classes", "log_prior", "log_present", "log_absent", "sum_log_absent"}, "class model");
      NaiveBayesModel nb;
      nb.classes = o.at("classes").get<std::vector<std::string>>();
      nb.log_prior = o.at("log_prior").get<std::vector<double>>();
      nb.log_present = o.at("log_present").get<std::vector<std::vector<double>>>();
      nb.log_absent = o.at("log_absent").get<std::vector<std::vector<double>>>();
      nb.sum_log_absent = o.at("sum_log_absent").get<std::vector<double>>();
      if (nb.classes.size() != 2 || nb.log_prior.size() != 2 || nb.log_present.size() != 2 ||
          nb.log_absent.size() != 2 || nb.sum_log_absent.size() != 2)
        throw std::runtime_error("naive Bayes class model must have two classes");
      m.nb = std::move(nb);
      break;
    }
    case Algorithm::C45:
      reject_unknown(o, {"tree"}, "class model");
      m.tree = tree_from_json(o.at("tree"));
      break;
    case Algorithm::Knn:
      reject_unknown(o, {"labels"}, "class model");
      m.knn_labels = o.at("labels").get<std::vector<int>>();
      if (m.knn_labels.size() != pool_size) throw std::runtime_error("KNN labels do not match stored rows");
      break;
    case Algorithm::Paum: {
      reject_unknown(o, {"w", "b", "converged", "epochs", "updates"}, "class model");
      LinearModel lm;
      lm.w = o.at("w").get<std::vector<double>>();
      lm.b = o.at("b").get<double>();
      lm.converged = o.at("converged").get<bool>();
      lm.epochs = o.at("epochs").get<std::size_t>();
      lm.updates = o.at("updates").get<std::size_t>();
      m.linear = std::move(lm);
      break;
    }
    case Algorithm::Svm:
      reject_unknown(o, {"support", "coef", "b"}, "class model");
      m.sv = o.at("support").get<std::vector<std::uint32_t>>();
      m.coef = o.at("coef").get<std::vector<double>>();
      m.b = o.at("b").get<double>();
      if (m.sv.size() != m.coef.size()) throw std::runtime_error("support and coef differ in length");
      for (auto i : m.sv)
        if (i >= pool_size) throw std::runtime_error("support index out of range");
      break;
  }
  return m;
}

}  // namespace

ordered_json hyperparameters_to_json(const Hyperparameters& hp) {
  ordered_json j;
  j["c45"] = {{"min_cases", hp.c45.min_cases}, {"confidence", hp.c45.confidence}, {"prune", hp.c45.prune}};
  j["knn"] = {{"k", hp.knn.k}};
  j["paum"] = {{"tau_pos", hp.paum.tau_pos},
               {"tau_neg", hp.paum.tau_neg},
               {"eta", hp.paum.eta},
               {"opt_b", hp.paum.opt_b},
               {"max_epochs", hp.paum.max_epochs}};
  j["svm"] = {{"c", hp.svm.C},
              {"kernel", to_string(hp.svm.kernel.kind)},
              {"degree", hp.svm.kernel.degree},
              {"tolerance", hp.svm.tolerance},
              {"cache_mb", hp.svm.cache_mb},
              {"max_iterations", hp.svm.max_iterations},
              {"tau", hp.tau}};
  return j;
}

Hyperparameters hyperparameters_from_json(const ordered_json& j) {
  Hyperparameters hp;
  reject_unknown(j, {"c45", "knn", "paum", "svm"}, "hyperparameters");
  if (j.contains("c45")) {
    const auto& o = j["c45"];
    reject_unknown(o, {"min_cases", "confidence", "prune"}, "c45 hyperparameters");
    hp.c45.min_cases = o.value("min_cases", hp.c45.min_cases);
    hp.c45.confidence = o.value("confidence", hp.c45.confidence);
    hp.c45.prune = o.value("prune", hp.c45.prune);
  }
  if (j.contains("knn")) {
    reject_unknown(j["knn"], {"k"}, "knn hyperparameters");
    hp.knn.k = j["knn"].value("k", hp.knn.k);
  }
  if (j.contains("paum")) {
    const auto& o = j["paum"];
    reject_unknown(o, {"tau_pos", "tau_neg", "eta", "opt_b", "max_epochs"}, "paum hyperparameters");
    hp.paum.tau_pos = o.value("tau_pos", hp.paum.tau_pos);
    hp.paum.tau_neg = o.value("tau_neg", hp.paum.tau_neg);
    hp.paum.eta = o.value("eta", hp.paum.eta);
    hp.paum.opt_b = o.value("opt_b", hp.paum.opt_b);
    hp.paum.max_epochs = o.value("max_epochs", hp.paum.max_epochs);
  }
  if (j.contains("svm")) {
    const auto& o = j["svm"];
    reject_unknown(o, {"c", "kernel", "degree", "tolerance", "cache_mb", "max_iterations", "tau"}, "svm hyperparameters");
    hp.svm.C = o.value("c", hp.svm.C);
    if (o.contains("kernel")) hp.svm.kernel.kind = parse_kernel_kind(o["kernel"].get<std::string>());
    hp.svm.kernel.degree = o.value("degree", hp.svm.kernel.degree);
    hp.svm.tolerance = o.value("tolerance", hp.svm.tolerance);
    hp.svm.cache_mb = o.value("cache_mb", hp.svm.cache_mb);
    hp.svm.max_iterations = o.value("max_iterations", hp.svm.max_iterations);
    hp.tau = o.value("tau", hp.tau);
  }
  return hp;
}

ordered_json ova_to_json(const OvaModel& m) {
  ordered_json j;
  j["algorithm"] = to_string(m.algorithm);
  j["hyperparameters"] = hyperparameters_to_json(m.hp);
  j["classes"] = m.classes;
  auto pool = ordered_json::array();
  if (m.pool)
    for (const auto& v : *m.pool) pool.push_back(sparse_to_json(v));
  j["pool"] = std::move(pool);
  auto models = ordered_json::array();
  for (const auto& b : m.models) models.push_back(binary_to_json(b, m.algorithm));
  j["models"] = std::move(models);
  return j;
}

OvaModel ova_from_json(const ordered_json& j) {
  try {
    reject_unknown(j, {"algorithm", "hyperparameters", "classes", "pool", "models"}, "classifier");
    OvaModel m;
    const auto name = j.at("algorithm").get<std::string>();
    const auto a = parse_algorithm(name);
    if (!a) throw std::runtime_error("unknown algorithm '" + name + "'");
    m.algorithm = *a;
    m.hp = hyperparameters_from_json(j.at("hyperparameters"));
    m.hp.validate();
    m.classes = j.at("classes").get<std::vector<std::string>>();
    auto pool = std::make_shared<std::vector<SparseVector>>();
    for (const auto& v : j.at("pool")) pool->push_back(sparse_from_json(v));
    for (const auto& o : j.at("models")) m.models.push_back(binary_from_json(o, m.algorithm, pool->size()));
    m.pool = std::move(pool);
    if (m.models.size() != m.classes.size()) throw std::runtime_error("class and model counts differ");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("malformed model: ") + e.what());
  }
}

}  // namespace clinrel::learn
