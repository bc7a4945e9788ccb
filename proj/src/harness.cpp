#include "clinrel/harness.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include "clinrel/learners/model_io.hpp"
#include "clinrel/rng.hpp"

namespace clinrel::harness {

using nlohmann::ordered_json;

namespace {

std::size_t type_slot(RelationType t) {
  const auto& all = all_relation_types();
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] == t) return i;
  throw std::invalid_argument("Null has no count slot");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

}  // namespace

Counts& Counts::operator+=(const Counts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

Counts& MatchCounts::of(RelationType t) { return per_type[type_slot(t)]; }
const Counts& MatchCounts::of(RelationType t) const { return per_type[type_slot(t)]; }

Counts MatchCounts::total() const {
  Counts c;
  for (const auto& t : per_type) c += t;
  return c;
}

MatchCounts& MatchCounts::operator+=(const MatchCounts& o) {
  for (std::size_t i = 0; i < per_type.size(); ++i) per_type[i] += o.per_type[i];
  return *this;
}

MatchCounts match_relations(const std::vector<RelationInstance>& response, const std::vector<RelationInstance>& key) {
  auto as_set = [](const std::vector<RelationInstance>& v) {
    std::set<std::tuple<RelationType, std::string, std::string>> s;
    for (const auto& r : v)
      if (r.rtype != RelationType::Null) s.emplace(r.rtype, r.arg1, r.arg2);
    return s;
  };
  const auto resp = as_set(response);
  const auto gold = as_set(key);
  MatchCounts m;
  for (const auto& r : resp) {
    if (gold.count(r)) ++m.of(std::get<0>(r)).tp;
    else ++m.of(std::get<0>(r)).fp;
  }
  for (const auto& g : gold)
    if (!resp.count(g)) ++m.of(std::get<0>(g)).fn;
  return m;
}

Metrics prf(const Counts& c) {
  Metrics m;
  if (c.tp + c.fp > 0) m.p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (m.p + m.r > 0.0) m.f1 = 2.0 * m.p * m.r / (m.p + m.r);
  return m;
}

std::optional<Metrics> macro_average(const std::vector<Metrics>& per_fold) {
  if (per_fold.empty()) return std::nullopt;
  Metrics out;
  for (const auto& m : per_fold) {
    out.p += m.p;
    out.r += m.r;
    out.f1 += m.f1;
  }
  const double n = static_cast<double>(per_fold.size());
  out.p /= n;
  out.r /= n;
  out.f1 /= n;
  return out;
}

FoldPlan make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (k > corpus.documents.size())
    throw std::invalid_argument("cannot split " + std::to_string(corpus.documents.size()) + " documents into " +
                                std::to_string(k) + " folds");
  std::vector<std::string> ids;
  for (const auto& d : corpus.documents) ids.push_back(d.id);
  Rng rng(seed);
  rng.shuffle(ids);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  for (std::size_t i = 0; i < ids.size(); ++i) plan.folds[i % k].push_back(ids[i]);
  return plan;
}

CvSummary summarize(const std::vector<FoldResult>& folds) {
  CvSummary s;
  for (std::size_t t = 0; t < kRelationTypeCount; ++t) {
    std::vector<Metrics> contributing;
    for (const auto& f : folds)
      if (!f.counts.per_type[t].empty()) contributing.push_back(prf(f.counts.per_type[t]));
    s.per_type[t] = macro_average(contributing);
  }
  std::vector<Metrics> overall;
  for (const auto& f : folds) {
    const auto total = f.counts.total();
    if (!total.empty()) overall.push_back(prf(total));
  }
  s.overall = macro_average(overall);
  return s;
}

std::vector<CvResult> cross_validate(const std::vector<DocumentInstances>& prepared, const FoldPlan& plan,
                                     const PipelineConfig& config, const std::vector<double>& taus) {
  if (taus.empty()) throw std::invalid_argument("no tau values given");
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < prepared.size(); ++i) by_id.emplace(prepared[i].doc->id, i);
  std::vector<int> fold_of(prepared.size(), -1);
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    for (const auto& id : plan.folds[f]) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw std::invalid_argument("fold plan names unknown document '" + id + "'");
      if (fold_of[it->second] != -1) throw std::invalid_argument("document '" + id + "' is in two folds");
      fold_of[it->second] = static_cast<int>(f);
    }
  }
  if (std::count(fold_of.begin(), fold_of.end(), -1) > 0) throw std::invalid_argument("fold plan misses documents");

  std::vector<CvResult> results(taus.size());
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    std::vector<const DocumentInstances*> train, test;
    for (std::size_t i = 0; i < prepared.size(); ++i)
      (fold_of[i] == static_cast<int>(f) ? test : train).push_back(&prepared[i]);
    const auto model = train_model(train, config);

    std::set<std::string, std::less<>> train_keys;
    for (const auto* d : train)
      for (const auto& fv : d->features)
        for (const auto& [key, _] : fv) train_keys.insert(key);
    std::size_t leaked = 0;
    for (const auto& key : model.index.keys())
      if (!train_keys.count(key)) ++leaked;

    std::vector<FoldResult> fold(taus.size());
    for (auto& r : fold) {
      r.train_docs = train.size();
      r.test_docs = test.size();
      r.index_size = model.index.size();
      r.leaked_keys = leaked;
    }
    for (const auto* d : test) {
      const auto scores = document_scores(model, *d);
      for (std::size_t t = 0; t < taus.size(); ++t)
        fold[t].counts += match_relations(decode_relations(model, *d, scores, taus[t]), d->doc->relations);
    }
    for (std::size_t t = 0; t < taus.size(); ++t) results[t].folds.push_back(fold[t]);
  }
  const double elapsed = seconds_since(start);
  for (auto& r : results) {
    r.summary = summarize(r.folds);
    r.seconds = elapsed;
  }
  return results;
}

CvResult run_cv(const Corpus& corpus, const PipelineConfig& config, const FoldPlan& plan) {
  const auto prepared = prepare_corpus(corpus, config.features, config.max_crossings);
  return cross_validate(prepared, plan, config, {config.hp.tau}).front();
}

const std::vector<AblationStep>& ablation_steps() {
  static const std::vector<AblationStep> steps = {
      {"Tok6+ Atype", {"tok6", "atype"}},
      {"+Dir", {"tok6", "atype", "dir"}},
      {"+Str", {"tok6", "atype", "dir", "str"}},
      {"+POS", {"tok6", "atype", "dir", "str", "pos"}},
      {"+Inter", {"tok6", "atype", "dir", "str", "pos", "inter"}},
      {"+Event", {"tok6", "atype", "dir", "str", "pos", "inter", "event"}},
      {"Allgen", {"allgen"}},
      {"NoTok", {"notok"}},
      {"+Dep", {"tok6", "atype", "dir", "str", "pos", "inter", "event", "dep"}},
      {"+Syndist", {"tok6", "atype", "dir", "str", "pos", "inter", "event", "dep", "syndist"}},
  };
  return steps;
}

std::vector<std::size_t> default_curve_sizes(std::size_t n_docs) {
  std::vector<std::size_t> out;
  for (double frac : {0.5, 0.75, 1.0}) {
    const auto n = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n_docs)));
    if (n > 0 && (out.empty() || out.back() != n)) out.push_back(n);
  }
  return out;
}

namespace {

ReportColumn column_from(const std::string& label, const CvResult& r, const FeatureConfig& features,
                         bool timing) {
  ReportColumn c;
  c.label = label;
  c.summary = r.summary;
  if (timing) c.seconds = r.seconds;
  c.features = join(features.names(), "+");
  return c;
}

ExperimentReport base_report(const std::string& name, const ExperimentOptions& opts) {
  ExperimentReport rep;
  rep.experiment = name;
  rep.folds = opts.folds;
  rep.seed = opts.seed;
  rep.algorithm = std::string(learn::to_string(opts.base.algorithm));
  rep.hp = opts.base.hp;
  return rep;
}

}  // namespace

ExperimentReport experiment_algorithms(const Corpus& corpus, const ExperimentOptions& opts) {
  auto rep = base_report("algorithms", opts);
  rep.algorithm.clear();
  rep.runtime_row = true;
  const auto plan = make_folds(corpus, opts.folds, opts.seed);
  for (auto a : learn::all_algorithms()) {
    auto cfg = opts.base;
    cfg.algorithm = a;
    // Feature extraction is part of each algorithm's measured run.
    const auto start = std::chrono::steady_clock::now();
    const auto prepared = prepare_corpus(corpus, cfg.features, cfg.max_crossings);
    auto r = cross_validate(prepared, plan, cfg, {cfg.hp.tau}).front();
    r.seconds = seconds_since(start);
    rep.columns.push_back(column_from(std::string(learn::display_name(a)), r, cfg.features, true));
  }
  return rep;
}

ExperimentReport experiment_tau_sweep(const Corpus& corpus, const ExperimentOptions& opts,
                                      const std::vector<double>& taus) {
  auto rep = base_report("tau", opts);
  rep.algorithm = "svm";
  rep.column_caption = "Uneven margin (τ)";
  rep.overall_label = "Overall Relations";
  rep.overall_only = true;
  auto cfg = opts.base;
  cfg.algorithm = learn::Algorithm::Svm;
  for (double t : taus) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  }
  const auto plan = make_folds(corpus, opts.folds, opts.seed);
  const auto prepared = prepare_corpus(corpus, cfg.features, cfg.max_crossings);
  const auto results = cross_validate(prepared, plan, cfg, taus);
  for (std::size_t i = 0; i < taus.size(); ++i)
    rep.columns.push_back(column_from(format_tau(taus[i]), results[i], cfg.features, opts.include_timing));
  return rep;
}

ExperimentReport experiment_ablation(const Corpus& corpus, const ExperimentOptions& opts) {
  auto rep = base_report("ablation", opts);
  const auto plan = make_folds(corpus, opts.folds, opts.seed);
  for (const auto& step : ablation_steps()) {
    auto cfg = opts.base;
    cfg.features = FeatureConfig::from_names(step.features);
    const auto prepared = prepare_corpus(corpus, cfg.features, cfg.max_crossings);
    const auto r = cross_validate(prepared, plan, cfg, {cfg.hp.tau}).front();
    rep.columns.push_back(column_from(step.label, r, cfg.features, opts.include_timing));
  }
  return rep;
}

ExperimentReport experiment_learning_curve(const Corpus& corpus, const ExperimentOptions& opts,
                                           std::vector<std::size_t> sizes) {
  auto rep = base_report("curve", opts);
  rep.column_caption = "Corpus size";
  if (sizes.empty()) sizes = default_curve_sizes(corpus.documents.size());
  for (auto n : sizes) {
    if (n < 2 || n > corpus.documents.size())
      throw std::invalid_argument("prefix size " + std::to_string(n) + " is outside 2.." +
                                  std::to_string(corpus.documents.size()));
    Corpus prefix;
    prefix.documents.assign(corpus.documents.begin(), corpus.documents.begin() + static_cast<std::ptrdiff_t>(n));
    const auto plan = make_folds(prefix, std::min(opts.folds, n), opts.seed);
    const auto prepared = prepare_corpus(prefix, opts.base.features, opts.base.max_crossings);
    const auto r = cross_validate(prepared, plan, opts.base, {opts.base.hp.tau}).front();
    auto col = column_from("C" + std::to_string(n), r, opts.base.features, opts.include_timing);
    std::array<std::size_t, kRelationTypeCount> counts{};
    for (const auto& d : prepared)
      for (const auto& inst : d.instances)
        if (inst.label != RelationType::Null) ++counts[type_slot(inst.label)];
    col.counts = counts;
    rep.columns.push_back(std::move(col));
  }
  return rep;
}

ExperimentReport evaluate_response(const Corpus& response, const Corpus& key, const std::string& label) {
  std::unordered_map<std::string, const Document*> resp;
  for (const auto& d : response.documents) resp.emplace(d.id, &d);
  for (const auto& d : response.documents) {
    bool known = false;
    for (const auto& k : key.documents) known = known || k.id == d.id;
    if (!known) throw std::invalid_argument("response document '" + d.id + "' is not in the key");
  }
  FoldResult f;
  for (const auto& k : key.documents) {
    auto it = resp.find(k.id);
    static const std::vector<RelationInstance> none;
    f.counts += match_relations(it == resp.end() ? none : it->second->relations, k.relations);
  }
  ExperimentReport rep;
  rep.experiment = "evaluate";
  rep.folds = 1;
  ReportColumn c;
  c.label = label;
  c.summary = summarize({f});
  rep.columns.push_back(std::move(c));
  return rep;
}

std::string format_tau(double tau) {
  std::ostringstream ss;
  const double tenths = tau * 10.0;
  if (std::abs(tenths - std::round(tenths)) < 1e-9) ss << std::fixed << std::setprecision(1) << tau;
  else ss << tau;
  return ss.str();
}

namespace {

std::string percent(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << *v * 100.0;
  return ss.str();
}

struct RowGroup {
  std::string label;
  std::vector<std::optional<Metrics>> cells;
  std::vector<std::optional<std::size_t>> counts;
};

std::vector<RowGroup> row_groups(const ExperimentReport& rep) {
  std::vector<RowGroup> groups;
  if (!rep.overall_only) {
    const auto& types = all_relation_types();
    for (std::size_t t = 0; t < types.size(); ++t) {
      RowGroup g{std::string(display_name(types[t])), {}, {}};
      for (const auto& c : rep.columns) {
        g.cells.push_back(c.summary.per_type[t]);
        g.counts.push_back(c.counts ? std::optional<std::size_t>((*c.counts)[t]) : std::nullopt);
      }
      groups.push_back(std::move(g));
    }
  }
  RowGroup overall{rep.overall_label, {}, {}};
  for (const auto& c : rep.columns) {
    overall.cells.push_back(c.summary.overall);
    std::optional<std::size_t> total;
    if (c.counts) {
      total = 0;
      for (auto n : *c.counts) *total += n;
    }
    overall.counts.push_back(total);
  }
  groups.push_back(std::move(overall));
  return groups;
}

bool has_counts(const ExperimentReport& rep) {
  return std::any_of(rep.columns.begin(), rep.columns.end(), [](const ReportColumn& c) { return c.counts.has_value(); });
}

}  // namespace

std::string to_table(const ExperimentReport& rep) {
  std::ostringstream out;
  std::vector<std::string> labels;
  for (const auto& c : rep.columns) labels.push_back(c.label);
  const std::string first = rep.overall_only ? "" : "Relationship type";
  if (!rep.column_caption.empty()) {
    out << first << '\t' << rep.column_caption << '\n';
    out << '\t' << "Metric (%)" << '\t' << join(labels, "\t") << '\n';
  } else {
    out << first << '\t' << "Metric (%)" << '\t' << join(labels, "\t") << '\n';
  }
  const bool counts = has_counts(rep);
  for (const auto& g : row_groups(rep)) {
    bool first_row = true;
    auto emit = [&](const char* metric, auto cell) {
      out << (first_row ? g.label : "") << '\t' << metric;
      for (std::size_t i = 0; i < rep.columns.size(); ++i) out << '\t' << cell(i);
      out << '\n';
      first_row = false;
    };
    if (counts)
      emit("Count", [&](std::size_t i) { return g.counts[i] ? std::to_string(*g.counts[i]) : std::string(); });
    emit("P", [&](std::size_t i) { return percent(g.cells[i] ? std::optional<double>(g.cells[i]->p) : std::nullopt); });
    emit("R", [&](std::size_t i) { return percent(g.cells[i] ? std::optional<double>(g.cells[i]->r) : std::nullopt); });
    emit("F1", [&](std::size_t i) { return percent(g.cells[i] ? std::optional<double>(g.cells[i]->f1) : std::nullopt); });
  }
  if (rep.runtime_row) {
    out << "Run Time in seconds\t";
    for (const auto& c : rep.columns) {
      out << '\t';
      if (c.seconds) out << std::fixed << std::setprecision(3) << *c.seconds;
    }
    out << '\n';
  }
  return out.str();
}

std::string to_json(const ExperimentReport& rep, bool include_timing) {
  ordered_json j;
  j["experiment"] = rep.experiment;
  j["folds"] = rep.folds;
  j["seed"] = rep.seed;
  if (!rep.algorithm.empty()) j["algorithm"] = rep.algorithm;
  if (rep.experiment != "evaluate") j["hyperparameters"] = learn::hyperparameters_to_json(rep.hp);
  if (!rep.column_caption.empty()) j["column_caption"] = rep.column_caption;
  const auto groups = row_groups(rep);
  auto columns = ordered_json::array();
  for (std::size_t i = 0; i < rep.columns.size(); ++i) {
    const auto& c = rep.columns[i];
    ordered_json col;
    col["label"] = c.label;
    if (!c.features.empty()) col["features"] = c.features;
    if (include_timing && c.seconds) col["runtime_seconds"] = *c.seconds;
    auto rows = ordered_json::array();
    for (const auto& g : groups) {
      ordered_json row;
      row["type"] = g.label;
      if (g.counts[i]) row["count"] = *g.counts[i];
      if (g.cells[i]) {
        row["P"] = g.cells[i]->p;
        row["R"] = g.cells[i]->r;
        row["F1"] = g.cells[i]->f1;
      } else {
        row["P"] = nullptr;
        row["R"] = nullptr;
        row["F1"] = nullptr;
      }
      rows.push_back(std::move(row));
    }
    col["rows"] = std::move(rows);
    columns.push_back(std::move(col));
  }
  j["columns"] = std::move(columns);
  return j.dump(2) + "\n";
}

}  // namespace clinrel::harness
