#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "clinrel/corpus.hpp"
#include "clinrel/synthetic.hpp"
#include "support/docs.hpp"

using namespace clinrel;
using E = EntityType;
using R = RelationType;

TEST_CASE("nine entity types, events are investigations and interventions") {
  CHECK(all_entity_types().size() == 9);
  for (auto t : all_entity_types()) CHECK(is_event(t) == (t == E::Investigation || t == E::Intervention));
  CHECK(all_relation_types().size() == kRelationTypeCount);
  CHECK(to_string(R::Null) == "Null");
  CHECK(display_name(R::SubLocationModifies) == "Sub-location_modifies");
  CHECK(parse_relation_type("HasTarget") == R::HasTarget);
  CHECK_FALSE(parse_entity_type("Disease"));
}

TEST_CASE("relation compatibility follows the schema") {
  CHECK(compatible_relation_types(E::Investigation, E::Locus) == std::vector<R>{R::HasTarget});
  CHECK(compatible_relation_types(E::Condition, E::Condition).empty());
  CHECK(compatible_relation_types(E::Investigation, E::Condition) == std::vector<R>{R::HasFinding, R::HasIndication});
  CHECK(compatible_relation_types(E::Investigation, E::Result) == std::vector<R>{R::HasFinding});
  CHECK(compatible_relation_types(E::LateralitySignal, E::Intervention) == std::vector<R>{R::LateralityModifies});
  CHECK(compatible_relation_types(E::Locus, E::Investigation).empty());
  CHECK(is_legal(R::HasLocation, E::Condition, E::Locus));
  CHECK_FALSE(is_legal(R::HasLocation, E::Locus, E::Condition));
  CHECK_FALSE(is_legal(R::Null, E::Condition, E::Locus));
}

namespace {

const char* kTwoDocs =
    R"({"id":"d1","text":"A chest X-ray was normal.","tokens":[],"sentences":[],"entities":[{"id":"T1","type":"Locus","first_token":1,"last_token":1},{"id":"T2","type":"Investigation","first_token":2,"last_token":2},{"id":"T3","type":"Result","first_token":4,"last_token":4}],"relations":[{"type":"HasTarget","arg1":"T2","arg2":"T1"},{"type":"HasFinding","arg1":"T2","arg2":"T3"}],"deps":[]})"
    "\n"
    R"({"id":"d2","text":"No sign of cancer.","tokens":[],"sentences":[],"entities":[],"relations":[],"deps":[]})"
    "\n";

std::string replaced(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST_CASE("parsing a well-formed two-document file") {
  auto c = parse_corpus(kTwoDocs);
  REQUIRE(c.documents.size() == 2);
  const auto& d = c.documents[0];
  CHECK(d.tokens.size() == 6);
  CHECK(d.tokens[2].surface == "X-ray");
  CHECK(d.sentences.size() == 1);
  CHECK(d.relations.size() == 2);
  CHECK(d.find_entity("T2")->etype == E::Investigation);
  CHECK(d.find_entity("T9") == nullptr);
}

TEST_CASE("empty input gives an empty corpus") {
  CHECK(parse_corpus("").documents.empty());
  CHECK(parse_corpus("\n\n").documents.empty());
}

TEST_CASE("schema violations are rejected") {
  CHECK_THROWS_AS(parse_corpus(replaced(kTwoDocs, R"("arg2":"T1")", R"("arg2":"T7")")), SchemaError);
  CHECK_THROWS_AS(parse_corpus(replaced(kTwoDocs, R"("type":"HasTarget")", R"("type":"HasLocation")")), SchemaError);
  CHECK_THROWS_AS(parse_corpus(replaced(kTwoDocs, R"("deps":[]})", R"("deps":[],"extra":1})")), ParseError);
  CHECK_THROWS_AS(parse_corpus(replaced(kTwoDocs, R"("type":"Locus")", R"("type":"Organ")")), ParseError);

  CHECK_THROWS_AS(parse_corpus("{not json}\n"), ParseError);

  std::string dup = std::string(kTwoDocs) + R"({"id":"d1","text":"","tokens":[],"sentences":[],"entities":[],"relations":[],"deps":[]})";
  CHECK_THROWS_AS(parse_corpus(dup), SchemaError);
}

TEST_CASE("document invariants") {
  auto d = testdoc::make("d", "A chest X-ray was normal.", {{"T1", E::Locus, 1, 1}, {"T2", E::Investigation, 2, 2}});
  CHECK_NOTHROW(validate(d));

  auto self = d;
  self.entities.push_back({"T3", E::Condition, 4, 4});
  self.relations.push_back({R::HasLocation, "T3", "T3"});
  CHECK_THROWS_AS(validate(self), SchemaError);

  auto two_heads = d;
  two_heads.deps = {{1, 0, "a"}, {2, 0, "b"}};
  CHECK_THROWS_AS(validate(two_heads), SchemaError);

  auto loop = d;
  loop.deps = {{1, 1, "a"}};
  CHECK_THROWS_AS(validate(loop), SchemaError);

  auto gap = d;
  gap.sentences = {{0, 2}, {4, 5}};
  CHECK_THROWS_AS(validate(gap), SchemaError);

  auto bad_surface = d;
  bad_surface.tokens[1].surface = "chess";
  CHECK_THROWS_AS(validate(bad_surface), SchemaError);

  auto overlap = d;
  overlap.tokens[1].end = overlap.tokens[2].start + 1;
  CHECK_THROWS_AS(validate(overlap), SchemaError);

  auto dup_id = d;
  dup_id.entities.push_back({"T1", E::Condition, 4, 4});
  CHECK_THROWS_AS(validate(dup_id), SchemaError);
}

TEST_CASE("serialisation round-trips and is byte stable") {
  auto c = generate_synthetic({6, 3, 5, 9, 0.0});
  const auto text = serialize_corpus(c);
  auto back = parse_corpus(text);
  CHECK(back == c);
  CHECK(serialize_corpus(back) == text);
  CHECK(text.find(R"("deps":[])") == std::string::npos);

  Corpus empty_deps;
  empty_deps.documents.push_back(testdoc::make("x", "Pain.", {}));
  CHECK(serialize_corpus(empty_deps).find(R"("deps":[])") != std::string::npos);
}

TEST_CASE("non-ASCII text keeps code-point offsets through a file round trip") {
  Corpus c;
  c.documents.push_back(testdoc::make("u", "Sjögren syndrome with naïve café-au-lait spots.", {{"T1", E::Condition, 0, 1}}));
  const auto& toks = c.documents[0].tokens;
  CHECK(toks[0].surface == "Sjögren");
  CHECK(toks[0].end == 7);
  CHECK(toks[1].start == 8);
  CHECK(codepoint_length("Sjögren") == 7);
  CHECK(codepoint_substr("naïve café", 6, 10) == "café");

  const auto path = std::filesystem::temp_directory_path() / "clinrel_unicode_roundtrip.jsonl";
  save_corpus(c, path);
  auto back = load_corpus(path);
  std::filesystem::remove(path);
  CHECK(back == c);
}

TEST_CASE("missing files are reported") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/dir/corpus.jsonl"), std::runtime_error);
}

TEST_CASE("gold annotations are not overwritten when present") {
  std::string custom = kTwoDocs;
  auto c = parse_corpus(custom);
  auto d = c.documents[0];
  d.tokens[1].pos = "XX";
  d.tokens[1].root = "thorax";
  Corpus again{{d}};
  auto back = parse_corpus(serialize_corpus(again));
  CHECK(back.documents[0].tokens[1].pos == "XX");
  CHECK(back.documents[0].tokens[1].root == "thorax");
}
