#include <doctest.h>

#include <filesystem>

#include "clinrel/pipeline.hpp"
#include "clinrel/synthetic.hpp"

using namespace clinrel;

namespace {

const Corpus& corpus() {
  static const Corpus c = generate_synthetic({8, 4, 7, 19, 0.0});
  return c;
}

}  // namespace

TEST_CASE("default configuration") {
  PipelineConfig cfg;
  CHECK(cfg.algorithm == learn::Algorithm::Svm);
  CHECK(cfg.max_crossings == 1);
  CHECK(cfg.features.names() == std::vector<std::string>{"tok6", "atype", "dir", "str", "pos", "inter", "event"});
  CHECK(cfg.hp.tau == 0.8);
  CHECK(cfg.hp.svm.C == 0.7);
  CHECK(cfg.hp.svm.kernel.degree == 2);
}

TEST_CASE("save and load preserve decision values for every learner") {
  for (auto a : learn::all_algorithms()) {
    CAPTURE(learn::to_string(a));
    PipelineConfig cfg;
    cfg.algorithm = a;
    cfg.features = FeatureConfig::from_names({"tok3", "atype", "dir", "str", "inter", "dep", "syndist"});
    auto model = train_model(corpus(), cfg);
    const auto path = std::filesystem::temp_directory_path() / "clinrel_pipeline_model.json";
    save_model(model, path);
    auto back = load_model(path);
    std::filesystem::remove(path);
    CHECK(serialize_model(back) == serialize_model(model));
    CHECK(back.config.features == cfg.features);
    for (const auto& d : prepare_corpus(corpus(), cfg.features, cfg.max_crossings)) {
      auto s1 = document_scores(model, d);
      auto s2 = document_scores(back, d);
      REQUIRE(s1.size() == s2.size());
      for (std::size_t i = 0; i < s1.size(); ++i)
        for (std::size_t j = 0; j < s1[i].size(); ++j) CHECK(std::abs(s1[i][j] - s2[i][j]) <= 1e-12);
      CHECK(predict_relations(model, d) == predict_relations(back, d));
    }
  }
}

TEST_CASE("predictions form a valid corpus with legal relations") {
  auto model = train_model(corpus(), PipelineConfig{});
  auto predicted = predict_corpus(model, corpus());
  CHECK_NOTHROW(validate(predicted));
  REQUIRE(predicted.documents.size() == corpus().documents.size());
  for (std::size_t i = 0; i < predicted.documents.size(); ++i) {
    const auto& p = predicted.documents[i];
    const auto& g = corpus().documents[i];
    CHECK(p.id == g.id);
    CHECK(p.entities == g.entities);
    CHECK(p.tokens == g.tokens);
  }
  // Training data is separable enough to be recovered almost entirely.
  std::size_t hit = 0, gold = 0;
  for (std::size_t i = 0; i < predicted.documents.size(); ++i)
    for (const auto& r : corpus().documents[i].relations) {
      ++gold;
      const auto& rel = predicted.documents[i].relations;
      hit += std::find(rel.begin(), rel.end(), r) != rel.end();
    }
  CHECK(hit >= gold * 9 / 10);
}

TEST_CASE("lower tau only adds SVM predictions") {
  auto model = train_model(corpus(), PipelineConfig{});
  for (const auto& d : prepare_corpus(corpus(), model.config.features, 1)) {
    auto s = document_scores(model, d);
    auto strict = decode_relations(model, d, s, 1.0);
    auto loose = decode_relations(model, d, s, 0.2);
    for (const auto& r : strict) CHECK(std::find(loose.begin(), loose.end(), r) != loose.end());
  }
}

TEST_CASE("training on an empty corpus yields a model that predicts nothing") {
  Corpus empty;
  auto model = train_model(empty, PipelineConfig{});
  CHECK(predict_corpus(model, corpus()).documents.front().relations.empty());
}

TEST_CASE("malformed models are rejected") {
  auto model = train_model(corpus(), PipelineConfig{});
  auto text = serialize_model(model);
  CHECK_THROWS_AS(parse_model("not json"), std::runtime_error);
  CHECK_THROWS_AS(parse_model("{}"), std::runtime_error);
  auto bad_version = text;
  bad_version.replace(bad_version.find("\"version\": 1"), 12, "\"version\": 9");
  CHECK_THROWS_AS(parse_model(bad_version), std::runtime_error);
  auto bad_format = text;
  bad_format.replace(bad_format.find("clinrel-model"), 13, "other-model!!");
  CHECK_THROWS_AS(parse_model(bad_format), std::runtime_error);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), std::runtime_error);
}
