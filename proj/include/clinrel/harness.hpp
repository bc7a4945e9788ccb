#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clinrel/corpus.hpp"
#include "clinrel/pipeline.hpp"

namespace clinrel::harness {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  bool empty() const { return tp + fp + fn == 0; }
  Counts& operator+=(const Counts& o);
  bool operator==(const Counts&) const = default;
};

/// Counts per non-Null relation type, indexed in all_relation_types() order.
struct MatchCounts {
  std::array<Counts, kRelationTypeCount> per_type{};

  Counts& of(RelationType t);
  const Counts& of(RelationType t) const;
  Counts total() const;
  MatchCounts& operator+=(const MatchCounts& o);
  bool operator==(const MatchCounts&) const = default;
};

/// Exact match on (type, arg1, arg2) with set semantics. Null-typed
/// relations are ignored.
MatchCounts match_relations(const std::vector<RelationInstance>& response, const std::vector<RelationInstance>& key);

struct Metrics {
  double p = 0.0;
  double r = 0.0;
  double f1 = 0.0;
};

/// Zero denominators give zero.
Metrics prf(const Counts& c);

/// Means of P, R and F1 taken independently; absent for an empty list.
std::optional<Metrics> macro_average(const std::vector<Metrics>& per_fold);

struct FoldPlan {
  std::size_t k = 10;
  std::uint64_t seed = 42;
  std::vector<std::vector<std::string>> folds;  // document ids
};

/// Shuffles document ids with the seed and deals them round-robin.
/// Throws std::invalid_argument unless 2 <= k <= document count.
FoldPlan make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed);

struct FoldResult {
  MatchCounts counts;
  std::size_t train_docs = 0;
  std::size_t test_docs = 0;
  std::size_t index_size = 0;
  /// Index keys absent from every training vector; nonzero means leakage.
  std::size_t leaked_keys = 0;
};

struct CvSummary {
  std::array<std::optional<Metrics>, kRelationTypeCount> per_type{};
  std::optional<Metrics> overall;
};

/// Per type: macro average over folds that have gold or response instances
/// of that type. Overall: counts pooled over types within each fold, then
/// averaged over folds.
CvSummary summarize(const std::vector<FoldResult>& folds);

struct CvResult {
  std::vector<FoldResult> folds;
  CvSummary summary;
  double seconds = 0.0;  // training + prediction wall clock
};

/// One result per tau; each fold is trained once and decoded at every tau.
std::vector<CvResult> cross_validate(const std::vector<DocumentInstances>& prepared, const FoldPlan& plan,
                                     const PipelineConfig& config, const std::vector<double>& taus);
CvResult run_cv(const Corpus& corpus, const PipelineConfig& config, const FoldPlan& plan);

struct ExperimentOptions {
  PipelineConfig base;
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  bool include_timing = true;
};

struct ReportColumn {
  std::string label;
  CvSummary summary;
  std::optional<double> seconds;
  /// Labelled non-Null instances per type (learning curve only).
  std::optional<std::array<std::size_t, kRelationTypeCount>> counts;
  std::string features;  // feature set names used for the column
};

struct ExperimentReport {
  std::string experiment;      // algorithms | tau | ablation | curve | evaluate
  std::string column_caption;  // e.g. "Uneven margin (τ)"; empty when none
  std::string overall_label = "Overall";
  bool overall_only = false;
  bool runtime_row = false;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::string algorithm;  // empty when columns vary the algorithm
  learn::Hyperparameters hp;
  std::vector<ReportColumn> columns;
};

inline const std::vector<double>& default_taus() {
  static const std::vector<double> v = {1.0, 0.8, 0.6, 0.4, 0.2};
  return v;
}

struct AblationStep {
  std::string label;
  std::vector<std::string> features;
};
/// Tok6+ Atype, +Dir, +Str, +POS, +Inter, +Event, Allgen, NoTok, +Dep, +Syndist.
const std::vector<AblationStep>& ablation_steps();

/// Prefix sizes 20/30/40 scaled to the corpus size.
std::vector<std::size_t> default_curve_sizes(std::size_t n_docs);

ExperimentReport experiment_algorithms(const Corpus& corpus, const ExperimentOptions& opts);
ExperimentReport experiment_tau_sweep(const Corpus& corpus, const ExperimentOptions& opts,
                                      const std::vector<double>& taus = default_taus());
ExperimentReport experiment_ablation(const Corpus& corpus, const ExperimentOptions& opts);
ExperimentReport experiment_learning_curve(const Corpus& corpus, const ExperimentOptions& opts,
                                           std::vector<std::size_t> sizes = {});

/// Scores a response corpus against a key corpus as a single column.
ExperimentReport evaluate_response(const Corpus& response, const Corpus& key, const std::string& label);

/// Tab-separated table; metrics in percent with two decimals, absent cells empty.
std::string to_table(const ExperimentReport& report);
/// Full-precision JSON; runtime fields are omitted when `include_timing` is false.
std::string to_json(const ExperimentReport& report, bool include_timing = true);

std::string format_tau(double tau);

}  // namespace clinrel::harness
