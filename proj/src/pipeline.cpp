#include "clinrel/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "clinrel/learners/model_io.hpp"

namespace clinrel {

using nlohmann::ordered_json;

FeatureConfig default_feature_config() {
  return FeatureConfig::from_names({"tok6", "atype", "dir", "str", "pos", "inter", "event"});
}

DocumentInstances prepare_document(const Document& doc, const FeatureConfig& features, std::size_t max_crossings) {
  DocumentInstances d;
  d.doc = &doc;
  auto labeled = labeled_instances(doc, max_crossings);
  d.instances = std::move(labeled.instances);
  d.unreachable_gold = labeled.unreachable_gold;
  d.features.reserve(d.instances.size());
  for (const auto& inst : d.instances) d.features.push_back(extract(inst.pair, doc, features));
  return d;
}

std::vector<DocumentInstances> prepare_corpus(const Corpus& corpus, const FeatureConfig& features,
                                              std::size_t max_crossings) {
  std::vector<DocumentInstances> out;
  out.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) out.push_back(prepare_document(doc, features, max_crossings));
  return out;
}

SparseVector TrainedModel::vectorize(const FeatureVector& fv) const {
  auto v = index.vectorize(fv);
  return config.normalize ? normalized(v) : v;
}

TrainedModel train_model(const std::vector<const DocumentInstances*>& docs, const PipelineConfig& config) {
  TrainedModel m;
  m.config = config;
  std::vector<FeatureVector> all;
  for (const auto* d : docs) all.insert(all.end(), d->features.begin(), d->features.end());
  m.index = build_index(all);

  std::vector<SparseVector> rows;
  std::vector<std::string> labels;
  rows.reserve(all.size());
  labels.reserve(all.size());
  for (const auto* d : docs) {
    for (std::size_t i = 0; i < d->instances.size(); ++i) {
      rows.push_back(m.vectorize(d->features[i]));
      labels.emplace_back(to_string(d->instances[i].label));
    }
  }
  auto t = learn::TrainingSet::from_labels(std::move(rows), labels);
  m.classifier = learn::ova_train(t, config.algorithm, config.hp);
  return m;
}

TrainedModel train_model(const Corpus& corpus, const PipelineConfig& config) {
  const auto prepared = prepare_corpus(corpus, config.features, config.max_crossings);
  std::vector<const DocumentInstances*> docs;
  for (const auto& d : prepared) docs.push_back(&d);
  return train_model(docs, config);
}

std::vector<std::vector<double>> document_scores(const TrainedModel& model, const DocumentInstances& d) {
  std::vector<std::vector<double>> out;
  out.reserve(d.features.size());
  for (const auto& fv : d.features) out.push_back(model.classifier.standard_scores(model.vectorize(fv)));
  return out;
}

std::vector<RelationInstance> decode_relations(const TrainedModel& model, const DocumentInstances& d,
                                               const std::vector<std::vector<double>>& standard_scores,
                                               double tau) {
  const auto& clf = model.classifier;
  std::vector<RelationInstance> out;
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    auto scores = standard_scores[i];
    if (clf.algorithm == learn::Algorithm::Svm)
      for (std::size_t c = 0; c < scores.size(); ++c)
        if (!clf.models[c].constant_score) scores[c] = learn::uneven_margin(scores[c], tau);
    const auto label = learn::ova_decide(clf.classes, scores);
    if (label == learn::kNullLabel) continue;
    const auto rtype = parse_relation_type(label);
    if (!rtype) throw std::runtime_error("model predicts unknown relation type '" + label + "'");
    const auto& pair = d.instances[i].pair;
    const auto* a1 = d.doc->find_entity(pair.arg1);
    const auto* a2 = d.doc->find_entity(pair.arg2);
    if (!is_legal(*rtype, a1->etype, a2->etype)) continue;
    out.push_back({*rtype, pair.arg1, pair.arg2});
  }
  return out;
}

std::vector<RelationInstance> predict_relations(const TrainedModel& model, const DocumentInstances& d) {
  return decode_relations(model, d, document_scores(model, d), model.config.hp.tau);
}

Corpus predict_corpus(const TrainedModel& model, const Corpus& corpus) {
  Corpus out = corpus;
  for (auto& doc : out.documents) {
    const auto d = prepare_document(doc, model.config.features, model.config.max_crossings);
    auto predicted = predict_relations(model, d);
    doc.relations = std::move(predicted);
  }
  return out;
}

std::string serialize_model(const TrainedModel& model) {
  ordered_json j;
  j["format"] = "clinrel-model";
  j["version"] = kModelFormatVersion;
  j["algorithm"] = learn::to_string(model.config.algorithm);
  j["hyperparameters"] = learn::hyperparameters_to_json(model.config.hp);
  j["features"] = {{"sets", model.config.features.names()},
                   {"window", model.config.features.window},
                   {"max_crossings", model.config.max_crossings},
                   {"normalize", model.config.normalize}};
  j["feature_index"] = model.index.keys();
  j["classifier"] = learn::ova_to_json(model.classifier);
  return j.dump(1) + "\n";
}

TrainedModel parse_model(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != "clinrel-model") throw std::runtime_error("not a model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) throw std::runtime_error("unsupported model version " + std::to_string(version));
    static const std::set<std::string> known = {"format", "version", "algorithm", "hyperparameters",
                                                "features", "feature_index", "classifier"};
    for (const auto& [key, _] : j.items())
      if (known.count(key) == 0) throw std::runtime_error("unknown field '" + key + "' in model");

    TrainedModel m;
    const auto& f = j.at("features");
    m.config.features = FeatureConfig::from_names(f.at("sets").get<std::vector<std::string>>());
    m.config.features.window = f.at("window").get<std::size_t>();
    m.config.max_crossings = f.at("max_crossings").get<std::size_t>();
    m.config.normalize = f.at("normalize").get<bool>();
    m.index = FeatureIndex(j.at("feature_index").get<std::vector<std::string>>());
    m.classifier = learn::ova_from_json(j.at("classifier"));
    m.config.algorithm = m.classifier.algorithm;
    m.config.hp = m.classifier.hp;
    if (j.at("algorithm").get<std::string>() != learn::to_string(m.config.algorithm))
      throw std::runtime_error("algorithm fields disagree");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("malformed model: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_model(model);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace clinrel
