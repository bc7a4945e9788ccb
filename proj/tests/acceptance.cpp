// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "clinrel/harness.hpp"
#include "clinrel/learners/c45.hpp"
#include "clinrel/learners/knn.hpp"
#include "clinrel/learners/naive_bayes.hpp"
#include "clinrel/learners/paum.hpp"
#include "clinrel/learners/svm.hpp"
#include "clinrel/pipeline.hpp"
#include "clinrel/rng.hpp"
#include "clinrel/synthetic.hpp"
#include "support/oracles.hpp"

using namespace clinrel;
using namespace clinrel::learn;
using Clock = std::chrono::steady_clock;

namespace {

// Overall F1 of 10-fold SVM-UM cross-validation on the seed-42 corpus,
// recorded from the first verified run.
constexpr double kPinnedOverallF1 = 0.9888;

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool cond, const std::string& what) {
    if (!cond && out_.ok) {
      out_.ok = false;
      out_.detail = what;
    }
  }
  void note(const std::string& s) {
    if (out_.ok) out_.detail = s;
  }
  Outcome done() const { return out_; }

 private:
  Outcome out_;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SparseVector sv(std::initializer_list<double> dense) { return from_dense(std::vector<double>(dense)); }

const Corpus& seed42() {
  static const Corpus c = generate_synthetic(GeneratorConfig{});
  return c;
}

harness::ExperimentOptions default_options() {
  harness::ExperimentOptions o;
  o.folds = 10;
  o.seed = 42;
  return o;
}

// Experiment reports computed once and reused by later criteria.
std::map<std::string, harness::ExperimentReport>& reports() {
  static std::map<std::string, harness::ExperimentReport> r;
  return r;
}

const harness::ExperimentReport& report(const std::string& name) {
  auto& r = reports();
  if (auto it = r.find(name); it != r.end()) return it->second;
  const auto opts = default_options();
  harness::ExperimentReport rep;
  if (name == "tau")
    rep = harness::experiment_tau_sweep(seed42(), opts);
  else if (name == "ablation")
    rep = harness::experiment_ablation(seed42(), opts);
  else if (name == "curve")
    rep = harness::experiment_learning_curve(seed42(), opts);
  else
    rep = harness::experiment_algorithms(seed42(), opts);
  return r.emplace(name, std::move(rep)).first->second;
}

Outcome smo_correctness() {
  Check c;
  Rng rng(2024);
  double worst = 0.0, worst_balance = 0.0, solver_seconds = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + rng.index(19), dim = 1 + rng.index(5);
    const bool poly = trial % 2 == 1;
    std::vector<SparseVector> rows;
    std::vector<oracle::Dense> dense;
    std::vector<int> y;
    for (std::size_t i = 0; i < m; ++i) {
      rows.push_back(oracle::random_sparse(rng, dim, 0.8));
      dense.push_back(oracle::densify(rows.back(), dim));
      y.push_back(i == 0 ? 1 : i == 1 ? -1 : (rng.bernoulli(0.5) ? 1 : -1));
    }
    SmoParams params;
    params.C = 0.1 + 5 * rng.uniform();
    params.kernel = poly ? KernelSpec{KernelKind::Polynomial, 2} : KernelSpec{KernelKind::Linear, 1};
    params.tolerance = 1e-10;
    BinaryProblem p{rows, y};
    const auto t0 = Clock::now();
    auto s = smo_train(p, params);
    auto model = make_kernel_svm(p, s, params.kernel);
    solver_seconds += seconds_since(t0);
    c.expect(s.converged, "SMO did not converge on problem " + std::to_string(trial));
    double balance = 0;
    for (std::size_t i = 0; i < m; ++i) balance += s.alpha[i] * y[i];
    worst_balance = std::max(worst_balance, std::abs(balance));
    auto ref = oracle::dual_ascent(dense, y, params.C, poly, 2, 1e-8);
    for (std::size_t i = 0; i < m; ++i)
      worst = std::max(worst, std::abs(model.decision(rows[i]) - oracle::dual_decision(ref, dense, y, poly, 2, dense[i])));
  }
  c.expect(worst <= 1e-4, "decision values differ from the oracle by " + fmt("%.3g", worst));
  c.expect(worst_balance <= 1e-9, "sum alpha*y reached " + fmt("%.3g", worst_balance));
  c.expect(solver_seconds < 10.0, "SMO took " + fmt("%.2f", solver_seconds) + " s");
  c.note("max |f - oracle| " + fmt("%.2g", worst) + ", max |sum alpha y| " + fmt("%.2g", worst_balance) + ", " +
         fmt("%.3f", solver_seconds) + " s");
  return c.done();
}

Outcome uneven_margin_exactness() {
  Check c;
  std::vector<SparseVector> rows = {sv({1, 1}), sv({-1, -1})};
  BinaryProblem p{rows, {1, -1}};
  SmoParams params;
  params.C = 10;
  params.kernel = {KernelKind::Linear, 1};
  params.tolerance = 1e-10;
  auto standard = make_kernel_svm(p, smo_train(p, params), params.kernel);
  auto w = primal_weights(standard);
  c.expect(std::abs(w[0] - 0.5) < 1e-9 && std::abs(w[1] - 0.5) < 1e-9 && std::abs(standard.b) < 1e-9,
           "standard solution is not w=(0.5,0.5), b=0");
  auto um = apply_uneven_margin(standard, 0.8);
  auto wu = primal_weights(um);
  c.expect(std::abs(wu[0] - 0.45) < 1e-9 && std::abs(wu[1] - 0.45) < 1e-9 && std::abs(um.b - 0.1) < 1e-9,
           "tau=0.8 solution is not w=(0.45,0.45), b=0.1");

  Rng rng(8);
  std::vector<SparseVector> train;
  std::vector<int> y;
  for (int i = 0; i < 30; ++i) {
    train.push_back(oracle::random_sparse(rng, 4, 0.8));
    y.push_back(i % 3 == 0 ? 1 : -1);
  }
  BinaryProblem q{train, y};
  SmoParams poly;
  auto model = make_kernel_svm(q, smo_train(q, poly), poly.kernel);
  auto same = apply_uneven_margin(model, 1.0);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    auto x = oracle::random_sparse(rng, 4, 0.7);
    worst = std::max(worst, std::abs(same.decision(x) - model.decision(x)));
    worst = std::max(worst, std::abs(uneven_margin(model.decision(x), 1.0) - model.decision(x)));
  }
  c.expect(worst <= 1e-12, "tau=1.0 differs from the standard model by " + fmt("%.3g", worst));
  c.note("w'=(" + fmt("%.4f", wu[0]) + "," + fmt("%.4f", wu[1]) + "), b'=" + fmt("%.4f", um.b) +
         ", tau=1 max diff " + fmt("%.2g", worst));
  return c.done();
}

Outcome tau_monotonicity() {
  Check c;
  Rng rng(99);
  std::vector<SparseVector> rows;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    const double a = 2 * rng.uniform() - 1, b = 2 * rng.uniform() - 1;
    rows.push_back(from_dense({a, b}));
    y.push_back(a * a + b > 0.3 ? 1 : -1);
  }
  BinaryProblem p{rows, y};
  SmoParams params;
  auto standard = make_kernel_svm(p, smo_train(p, params), params.kernel);
  const std::vector<double> taus = {1.0, 0.8, 0.6, 0.4, 0.2};
  std::vector<std::vector<bool>> positive(taus.size());
  for (std::size_t t = 0; t < taus.size(); ++t) {
    auto m = apply_uneven_margin(standard, taus[t]);
    for (int gx = 0; gx < 20; ++gx)
      for (int gy = 0; gy < 10; ++gy) positive[t].push_back(m.decision(from_dense({-1 + gx * 0.1, -1 + gy * 0.2})) > 0);
  }
  std::size_t counts[5] = {};
  for (std::size_t t = 0; t < taus.size(); ++t)
    for (std::size_t i = 0; i < positive[t].size(); ++i) {
      counts[t] += positive[t][i];
      if (t > 0) c.expect(!positive[t - 1][i] || positive[t][i], "positive sets are not nested on the grid");
    }

  const auto& rep = report("tau");
  const auto& first = rep.columns.front().summary.overall;
  const auto& last = rep.columns.back().summary.overall;
  c.expect(first && last, "end-to-end sweep produced no overall metrics");
  if (first && last) {
    c.expect(last->r >= first->r, "recall at tau=0.2 (" + fmt("%.4f", last->r) + ") below recall at tau=1.0 (" +
                                      fmt("%.4f", first->r) + ")");
    c.note("grid positives " + std::to_string(counts[0]) + "->" + std::to_string(counts[4]) + "/200; CV recall " +
           fmt("%.4f", first->r) + " -> " + fmt("%.4f", last->r));
  }
  return c.done();
}

Outcome paum_checks() {
  Check c;
  Rng rng(4);
  PaumParams params;
  params.max_epochs = 10000;
  std::size_t max_epochs_used = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 2 + rng.index(9);
    std::vector<double> w(dim);
    for (auto& x : w) x = 2 * rng.uniform() - 1;
    std::vector<SparseVector> rows;
    std::vector<int> y;
    while (rows.size() < 10 + rng.index(41)) {
      std::vector<double> x(dim);
      for (auto& v : x) v = 2 * rng.uniform() - 1;
      double s = 0;
      for (std::size_t i = 0; i < dim; ++i) s += w[i] * x[i];
      if (std::abs(s) < 0.3) continue;
      rows.push_back(from_dense(x));
      y.push_back(s > 0 ? 1 : -1);
    }
    BinaryProblem p{rows, y};
    auto m = paum_train(p, params);
    c.expect(m.converged && m.epochs <= params.max_epochs, "PAUM hit the epoch cap on problem " + std::to_string(trial));
    max_epochs_used = std::max(max_epochs_used, m.epochs);
    for (std::size_t i = 0; i < rows.size(); ++i)
      c.expect(y[i] * m.decision(rows[i]) > (y[i] > 0 ? params.tau_pos : params.tau_neg),
               "margin violated on problem " + std::to_string(trial));
  }
  std::vector<SparseVector> rows = {sv({1}), sv({-1})};
  BinaryProblem p{rows, {1, -1}};
  auto m = paum_train(p, {1.0, 1.0, 1.0, 0.0, 100});
  c.expect(m.w.size() == 1 && m.w[0] == 2.0 && m.b == 0.0, "hand trace did not return w=2, b=0");
  c.note("100 separable problems, at most " + std::to_string(max_epochs_used) + " epochs; hand trace w=2, b=0");
  return c.done();
}

Outcome c45_checks() {
  Check c;
  Rng rng(12);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(20), classes = 2 + rng.index(3), values = 1 + rng.index(4);
    std::vector<int> labels(n), branch(n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(rng.index(classes));
      branch[i] = static_cast<int>(rng.index(values));
      v[i] = branch[i];
    }
    auto got = c45_gain_ratio(labels, classes, v);
    auto want = oracle::partition_measures(labels, branch);
    worst = std::max({worst, std::abs(got.gain - want.gain), std::abs(got.split_info - want.split_info)});
    if (want.split_info > 1e-12) {
      c.expect(got.ratio.has_value(), "missing gain ratio");
      if (got.ratio) worst = std::max(worst, std::abs(*got.ratio - want.gain / want.split_info));
    }
  }
  c.expect(worst <= 1e-9, "split measures differ by " + fmt("%.3g", worst));

  std::size_t trees = 0;
  for (int trial = 0; trial < 20; ++trial) {
    // Labels are a function of the features, so the data is consistent.
    std::vector<SparseVector> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 40; ++i) {
      std::vector<double> x(4);
      for (auto& v : x) v = static_cast<double>(rng.index(4));
      labels.push_back(x[0] + x[1] * x[2] > 4 ? "a" : (x[3] > 1 ? "b" : "c"));
      rows.push_back(from_dense(x));
    }
    auto t = TrainingSet::from_labels(rows, labels);
    auto tree = c45_build(t, {1, 0.25, false, {}});
    for (std::size_t i = 0; i < t.size(); ++i)
      c.expect(tree.classify(t.rows[i]) == t.labels[i], "unpruned tree misclassifies a training case");
    ++trees;
  }
  c.note("max split-measure error " + fmt("%.2g", worst) + "; " + std::to_string(trees) +
         " unpruned trees fit their training data");
  return c.done();
}

Outcome knn_nb_checks() {
  Check c;
  Rng rng(77);
  std::size_t knn_agree = 0, nb_agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.index(15), dim = 1 + rng.index(4), k = 1 + rng.index(m + 2);
    std::vector<SparseVector> rows;
    std::vector<oracle::Dense> dense;
    std::vector<std::string> names;
    std::vector<int> ids;
    for (std::size_t i = 0; i < m; ++i) {
      SparseVector v;
      for (std::size_t d = 0; d < dim; ++d)
        if (rng.bernoulli(0.7)) v.push_back({static_cast<std::uint32_t>(d), static_cast<double>(rng.index(3))});
      v = make_sparse(v);
      rows.push_back(v);
      dense.push_back(oracle::densify(v, dim));
      ids.push_back(static_cast<int>(rng.index(3)));
      names.push_back(std::string(1, static_cast<char>('a' + ids.back())));
    }
    auto q = oracle::random_sparse(rng, dim, 0.6);
    auto model = knn_train(std::make_shared<const std::vector<SparseVector>>(rows), {k});
    const int got = knn_classify(model, ids, 3, q);
    knn_agree += std::string(1, static_cast<char>('a' + got)) == oracle::knn_label(dense, names, oracle::densify(q, dim), k);
  }
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng.index(20), dim = 1 + rng.index(6);
    std::vector<oracle::Dense> x;
    std::vector<SparseVector> rows;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < m; ++i) {
      oracle::Dense row(dim);
      for (auto& v : row) v = rng.bernoulli(0.4) ? 1.0 : 0.0;
      x.push_back(row);
      rows.push_back(from_dense(row));
      labels.push_back(std::string(1, static_cast<char>('a' + rng.index(3))));
    }
    // Make sure every feature column is seen so both sides use the same dimension.
    x[0].assign(dim, 1.0);
    rows[0] = from_dense(x[0]);
    auto t = TrainingSet::from_labels(rows, labels);
    auto model = nb_train(t);
    oracle::Dense q(dim);
    for (auto& v : q) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const auto got = t.classes[static_cast<std::size_t>(nb_classify(model, from_dense(q)).label)];
    nb_agree += got == oracle::nb_label(x, labels, q);
  }
  c.expect(knn_agree == 100, "KNN agreed on " + std::to_string(knn_agree) + "/100");
  c.expect(nb_agree == 100, "naive Bayes agreed on " + std::to_string(nb_agree) + "/100");
  c.note("KNN " + std::to_string(knn_agree) + "/100, naive Bayes " + std::to_string(nb_agree) + "/100");
  return c.done();
}

Outcome metrics_checks() {
  Check c;
  auto m = harness::prf({3, 1, 2});
  c.expect(m.p == 0.75 && m.r == 0.6 && std::abs(m.f1 - 2 * 0.75 * 0.6 / 1.35) < 1e-15, "prf(3,1,2) is wrong");
  auto z = harness::prf({0, 0, 0});
  c.expect(z.p == 0 && z.r == 0 && z.f1 == 0, "prf of zero counts is not zero");
  c.expect(!harness::macro_average({}), "macro average of nothing is not absent");
  auto a = harness::prf({1, 0, 1});
  auto b = harness::prf({1, 1, 0});
  auto mean = *harness::macro_average({a, b});
  const double f1_of_means = 2 * mean.p * mean.r / (mean.p + mean.r);
  c.expect(mean.p == 0.75 && mean.r == 0.75, "macro P/R are not 0.75");
  c.expect(std::abs(mean.f1 - 2.0 / 3.0) < 1e-15, "mean F1 is not 0.6667");
  c.expect(std::abs(f1_of_means - 0.75) < 1e-15, "F1 of means is not 0.75");
  c.note("prf(3,1,2)=(0.75,0.6," + fmt("%.4f", m.f1) + "); mean F1 " + fmt("%.4f", mean.f1) + " vs F1 of means " +
         fmt("%.4f", f1_of_means));
  return c.done();
}

Outcome pipeline_end_to_end() {
  Check c;
  const auto t0 = Clock::now();
  PipelineConfig cfg;
  auto result = harness::run_cv(seed42(), cfg, harness::make_folds(seed42(), 10, 42));
  const double elapsed = seconds_since(t0);
  c.expect(result.summary.overall.has_value(), "no overall metrics");
  const double f1 = result.summary.overall ? result.summary.overall->f1 : 0.0;
  c.expect(elapsed < 300.0, "took " + fmt("%.1f", elapsed) + " s");
  c.expect(f1 >= 0.85, "overall F1 " + fmt("%.4f", f1) + " below 0.85");
  c.expect(std::abs(f1 - kPinnedOverallF1) <= 0.02,
           "overall F1 " + fmt("%.4f", f1) + " outside pinned " + fmt("%.4f", kPinnedOverallF1) + " +- 0.02");
  for (const auto& f : result.folds) c.expect(f.leaked_keys == 0, "test features leaked into a training index");
  c.note("overall F1 " + fmt("%.4f", f1) + " (pinned " + fmt("%.4f", kPinnedOverallF1) + "), " + fmt("%.1f", elapsed) +
         " s");
  return c.done();
}

Outcome learning_curve() {
  Check c;
  const auto& rep = report("curve");
  c.expect(rep.columns.size() == 3, "expected three corpus sizes");
  std::string trace;
  double prev = -1;
  for (const auto& col : rep.columns) {
    const double f1 = col.summary.overall ? col.summary.overall->f1 : 0.0;
    if (prev >= 0) c.expect(f1 >= prev - 0.05, col.label + " drops F1 by more than 0.05");
    prev = f1;
    trace += (trace.empty() ? "" : ", ") + col.label + " " + fmt("%.4f", f1);
  }
  c.expect(rep.columns.size() == 3 && rep.columns[0].label == "C20" && rep.columns[2].label == "C40",
           "sizes are not 20/30/40");
  c.note(trace);
  return c.done();
}

Outcome ablation() {
  Check c;
  const auto& rep = report("ablation");
  const std::vector<std::string> expected = {"Tok6+ Atype", "+Dir",   "+Str",  "+POS", "+Inter",
                                             "+Event",      "Allgen", "NoTok", "+Dep", "+Syndist"};
  std::vector<std::string> labels;
  for (const auto& col : rep.columns) labels.push_back(col.label);
  c.expect(labels == expected, "column sequence differs");
  if (labels == expected) {
    const double before = rep.columns[3].summary.overall->f1;
    const double after = rep.columns[4].summary.overall->f1;
    c.expect(before != after, "inter left overall F1 unchanged");
    c.note("+POS " + fmt("%.4f", before) + " -> +Inter " + fmt("%.4f", after) + "; 10 columns in order");
  }
  return c.done();
}

Outcome determinism() {
  Check c;
  const auto opts = default_options();
  std::vector<std::string> rerun;
  auto same = [&](const std::string& name, const harness::ExperimentReport& again) {
    const bool eq = harness::to_json(report(name), false) == harness::to_json(again, false) &&
                    serialize_corpus(seed42()) == serialize_corpus(generate_synthetic(GeneratorConfig{}));
    c.expect(eq, name + " report differs between runs");
    rerun.push_back(name);
  };
  same("tau", harness::experiment_tau_sweep(seed42(), opts));
  same("ablation", harness::experiment_ablation(seed42(), opts));
  same("curve", harness::experiment_learning_curve(seed42(), opts));
  same("algorithms", harness::experiment_algorithms(seed42(), opts));
  std::string joined;
  for (const auto& n : rerun) joined += (joined.empty() ? "" : ", ") + n;
  c.note("byte-identical JSON on rerun: " + joined);
  return c.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"SMO matches the dual oracle", smo_correctness},
      {"uneven-margin transform is exact", uneven_margin_exactness},
      {"positive sets grow as tau falls", tau_monotonicity},
      {"PAUM margins and hand trace", paum_checks},
      {"C4.5 split measures and training fit", c45_checks},
      {"KNN and naive Bayes agree with brute force", knn_nb_checks},
      {"metric examples", metrics_checks},
      {"end-to-end SVM-UM cross-validation", pipeline_end_to_end},
      {"learning curve is non-decreasing within 0.05", learning_curve},
      {"ablation columns and inter effect", ablation},
      {"reruns give identical reports", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.ok;
    std::printf("%s criterion %zu: %s (%s) [%.1f s]\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
