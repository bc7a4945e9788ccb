#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "clinrel/corpus.hpp"
#include "clinrel/harness.hpp"
#include "clinrel/pipeline.hpp"
#include "clinrel/synthetic.hpp"

namespace fs = std::filesystem;
using namespace clinrel;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

// Wraps failures reading or writing files so they map to the data exit code.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LearnerFlags {
  std::string algorithm = "svm";
  std::vector<std::string> features;
  std::size_t max_crossings = kDefaultMaxCrossings;
  bool no_normalize = false;
  learn::Hyperparameters hp;
  std::string kernel = "polynomial";
};

void add_learner_flags(CLI::App* cmd, LearnerFlags& f, bool with_algorithm) {
  if (with_algorithm)
    cmd->add_option("--algorithm", f.algorithm, "nb, c45, knn, paum or svm")
        ->check(CLI::IsMember({"nb", "c45", "knn", "paum", "svm"}))
        ->capture_default_str();
  cmd->add_option("--features", f.features, "feature sets, e.g. tok6 atype dir (comma separated)")->delimiter(',');
  cmd->add_option("--max-crossings", f.max_crossings, "sentence boundaries a pair may cross")->capture_default_str();
  cmd->add_flag("--no-normalize", f.no_normalize, "keep raw feature magnitudes");
  cmd->add_option("--tau", f.hp.tau, "SVM uneven margin")->capture_default_str();
  cmd->add_option("--c", f.hp.svm.C, "SVM cost")->capture_default_str();
  cmd->add_option("--kernel", f.kernel, "linear or polynomial")
      ->check(CLI::IsMember({"linear", "polynomial", "poly"}))
      ->capture_default_str();
  cmd->add_option("--degree", f.hp.svm.kernel.degree, "polynomial degree")->capture_default_str();
  cmd->add_option("--tolerance", f.hp.svm.tolerance, "SMO stopping tolerance")->capture_default_str();
  cmd->add_option("--cache-mb", f.hp.svm.cache_mb, "kernel cache size")->capture_default_str();
  cmd->add_option("--tau-pos", f.hp.paum.tau_pos, "PAUM positive margin")->capture_default_str();
  cmd->add_option("--tau-neg", f.hp.paum.tau_neg, "PAUM negative margin")->capture_default_str();
  cmd->add_option("--eta", f.hp.paum.eta, "PAUM learning rate")->capture_default_str();
  cmd->add_option("--opt-b", f.hp.paum.opt_b, "PAUM bias offset")->capture_default_str();
  cmd->add_option("--max-epochs", f.hp.paum.max_epochs, "PAUM epoch cap")->capture_default_str();
  cmd->add_option("--k", f.hp.knn.k, "KNN neighbours")->capture_default_str();
  cmd->add_option("--min-cases", f.hp.c45.min_cases, "C4.5 minimum cases")->capture_default_str();
  cmd->add_option("--confidence", f.hp.c45.confidence, "C4.5 pruning confidence")->capture_default_str();
  cmd->add_flag("--no-prune", [&f](std::int64_t) { f.hp.c45.prune = false; }, "skip C4.5 pruning");
}

PipelineConfig to_config(const LearnerFlags& f) {
  PipelineConfig cfg;
  cfg.algorithm = *learn::parse_algorithm(f.algorithm);
  if (!f.features.empty()) cfg.features = FeatureConfig::from_names(f.features);
  cfg.max_crossings = f.max_crossings;
  cfg.normalize = !f.no_normalize;
  cfg.hp = f.hp;
  cfg.hp.svm.kernel.kind = learn::parse_kernel_kind(f.kernel);
  cfg.hp.validate();
  return cfg;
}

Corpus read_corpus(const std::string& path) {
  try {
    return load_corpus(path);
  } catch (const std::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

void emit_report(const harness::ExperimentReport& rep, const std::string& out_dir, const std::string& stem,
                 bool timing) {
  const auto table = harness::to_table(rep);
  std::cout << table;
  if (!out_dir.empty()) {
    write_text(fs::path(out_dir) / (stem + ".tsv"), table);
    write_text(fs::path(out_dir) / (stem + ".json"), harness::to_json(rep, timing));
  }
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_pattern("%l: %v");
  CLI::App app{"Clinical relation extraction: corpus generation, training, prediction and evaluation"};
  app.require_subcommand(1);

  GeneratorConfig gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a seeded synthetic annotated corpus");
  generate->add_option("--out", gen_out, "output corpus file")->required();
  generate->add_option("--docs", gen.n_docs, "number of documents")->capture_default_str();
  generate->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  generate->add_option("--min-sentences", gen.min_sentences)->capture_default_str();
  generate->add_option("--max-sentences", gen.max_sentences)->capture_default_str();
  generate->add_option("--miss-rate", gen.annotation_miss_rate, "share of planted relations left unannotated")
      ->capture_default_str();

  LearnerFlags train_flags;
  std::string train_corpus, train_out;
  auto* train = app.add_subcommand("train", "train a model on a corpus");
  train->add_option("--corpus", train_corpus)->required();
  train->add_option("--out", train_out, "model file")->required();
  add_learner_flags(train, train_flags, true);

  std::string predict_model, predict_corpus_path, predict_out;
  auto* predict = app.add_subcommand("predict", "replace a corpus's relations by model predictions");
  predict->add_option("--model", predict_model)->required();
  predict->add_option("--corpus", predict_corpus_path)->required();
  predict->add_option("--out", predict_out)->required();

  std::string eval_key, eval_response, eval_model, eval_out_dir;
  auto* evaluate = app.add_subcommand("evaluate", "score predicted relations against a key corpus");
  evaluate->add_option("--key", eval_key, "gold corpus")->required();
  auto* resp_opt = evaluate->add_option("--response", eval_response, "corpus of predicted relations");
  auto* model_opt = evaluate->add_option("--model", eval_model, "model to predict with");
  resp_opt->excludes(model_opt);
  evaluate->add_option("--out-dir", eval_out_dir, "directory for evaluate.tsv and evaluate.json");

  LearnerFlags exp_flags;
  std::string exp_corpus, exp_out_dir;
  std::size_t exp_folds = 10;
  std::uint64_t exp_seed = 42;
  bool exp_no_timing = false;
  std::vector<double> exp_values;
  std::vector<std::size_t> exp_sizes;
  auto* experiment = app.add_subcommand("experiment", "cross-validated experiments");
  experiment->require_subcommand(1);
  auto add_common = [&](CLI::App* cmd, bool with_algorithm) {
    cmd->add_option("--corpus", exp_corpus)->required();
    cmd->add_option("--folds", exp_folds)->capture_default_str();
    cmd->add_option("--seed", exp_seed, "fold shuffling seed")->capture_default_str();
    cmd->add_option("--out-dir", exp_out_dir, "directory for <experiment>.tsv and <experiment>.json");
    cmd->add_flag("--no-timing", exp_no_timing, "leave runtime fields out of the JSON report");
    add_learner_flags(cmd, exp_flags, with_algorithm);
  };
  auto* exp_alg = experiment->add_subcommand("algorithms", "all five learners");
  add_common(exp_alg, false);
  auto* exp_tau = experiment->add_subcommand("tau", "SVM over uneven-margin values");
  add_common(exp_tau, false);
  exp_tau->add_option("--values", exp_values, "tau values (comma separated)")->delimiter(',');
  auto* exp_abl = experiment->add_subcommand("ablation", "additive feature-set sequence");
  add_common(exp_abl, true);
  auto* exp_curve = experiment->add_subcommand("curve", "document-prefix learning curve");
  add_common(exp_curve, true);
  exp_curve->add_option("--sizes", exp_sizes, "prefix sizes (comma separated)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*generate) {
      write_text(gen_out, serialize_corpus(generate_synthetic(gen)));
    } else if (*train) {
      const auto cfg = to_config(train_flags);
      const auto corpus = read_corpus(train_corpus);
      const auto model = train_model(corpus, cfg);
      write_text(train_out, serialize_model(model));
    } else if (*predict) {
      TrainedModel model;
      try {
        model = load_model(predict_model);
      } catch (const std::exception& e) {
        throw DataError(e.what());
      }
      write_text(predict_out, serialize_corpus(predict_corpus(model, read_corpus(predict_corpus_path))));
    } else if (*evaluate) {
      const auto key = read_corpus(eval_key);
      Corpus response;
      std::string label = "response";
      if (!eval_model.empty()) {
        TrainedModel model;
        try {
          model = load_model(eval_model);
        } catch (const std::exception& e) {
          throw DataError(e.what());
        }
        response = predict_corpus(model, key);
        label = std::string(learn::display_name(model.config.algorithm));
      } else if (!eval_response.empty()) {
        response = read_corpus(eval_response);
      } else {
        throw std::invalid_argument("evaluate needs --response or --model");
      }
      emit_report(harness::evaluate_response(response, key, label), eval_out_dir, "evaluate", true);
    } else if (*experiment) {
      harness::ExperimentOptions opts;
      opts.base = to_config(exp_flags);
      opts.folds = exp_folds;
      opts.seed = exp_seed;
      opts.include_timing = !exp_no_timing;
      const auto corpus = read_corpus(exp_corpus);
      if (*exp_alg) {
        emit_report(harness::experiment_algorithms(corpus, opts), exp_out_dir, "algorithms", opts.include_timing);
      } else if (*exp_tau) {
        const auto values = exp_values.empty() ? harness::default_taus() : exp_values;
        emit_report(harness::experiment_tau_sweep(corpus, opts, values), exp_out_dir, "tau", opts.include_timing);
      } else if (*exp_abl) {
        emit_report(harness::experiment_ablation(corpus, opts), exp_out_dir, "ablation", opts.include_timing);
      } else if (*exp_curve) {
        emit_report(harness::experiment_learning_curve(corpus, opts, exp_sizes), exp_out_dir, "curve",
                    opts.include_timing);
      }
    }
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
