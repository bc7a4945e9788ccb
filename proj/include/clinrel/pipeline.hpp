#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "clinrel/corpus.hpp"
#include "clinrel/features.hpp"
#include "clinrel/learners/ova.hpp"
#include "clinrel/pairing.hpp"

namespace clinrel {

/// tok6 + atype + dir + str + pos + inter + event.
FeatureConfig default_feature_config();

struct PipelineConfig {
  FeatureConfig features = default_feature_config();
  std::size_t max_crossings = kDefaultMaxCrossings;
  bool normalize = true;  // unit L2 length per instance vector
  learn::Algorithm algorithm = learn::Algorithm::Svm;
  learn::Hyperparameters hp;
};

/// Candidate pairs of one document with gold labels and extracted features.
struct DocumentInstances {
  const Document* doc = nullptr;
  std::vector<LabeledInstance> instances;
  std::vector<FeatureVector> features;  // parallel to instances
  std::size_t unreachable_gold = 0;
};

DocumentInstances prepare_document(const Document& doc, const FeatureConfig& features, std::size_t max_crossings);
std::vector<DocumentInstances> prepare_corpus(const Corpus& corpus, const FeatureConfig& features,
                                              std::size_t max_crossings);

struct TrainedModel {
  PipelineConfig config;
  FeatureIndex index;
  learn::OvaModel classifier;

  SparseVector vectorize(const FeatureVector& fv) const;
};

/// Index and classifier are built from the given documents only.
TrainedModel train_model(const std::vector<const DocumentInstances*>& docs, const PipelineConfig& config);
TrainedModel train_model(const Corpus& corpus, const PipelineConfig& config);

/// Standard per-class scores for every candidate of a document.
std::vector<std::vector<double>> document_scores(const TrainedModel& model, const DocumentInstances& d);

/// Relations implied by per-candidate scores under uneven-margin `tau`
/// (SVM only; other algorithms ignore it). Predictions whose type the
/// argument types do not admit are dropped.
std::vector<RelationInstance> decode_relations(const TrainedModel& model, const DocumentInstances& d,
                                               const std::vector<std::vector<double>>& standard_scores,
                                               double tau);

std::vector<RelationInstance> predict_relations(const TrainedModel& model, const DocumentInstances& d);
/// The input corpus with every document's relations replaced by predictions.
Corpus predict_corpus(const TrainedModel& model, const Corpus& corpus);

inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const TrainedModel& model);
/// Throws std::runtime_error on malformed or unsupported input.
TrainedModel parse_model(const std::string& text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace clinrel
