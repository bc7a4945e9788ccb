#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clinrel {

enum class EntityType {
  Investigation,
  Intervention,
  Condition,
  Locus,
  DrugOrDevice,
  Result,
  NegationSignal,
  LateralitySignal,
  SubLocationSignal,
};

inline constexpr std::size_t kEntityTypeCount = 9;

/// Relation labels. Null marks a candidate pair that takes part in no relation.
enum class RelationType {
  HasTarget,
  HasFinding,
  HasIndication,
  HasLocation,
  NegationModifies,
  LateralityModifies,
  SubLocationModifies,
  Null,
};

inline constexpr std::size_t kRelationTypeCount = 7;  // excluding Null

const std::vector<EntityType>& all_entity_types();
/// Non-Null relation types in declaration order.
const std::vector<RelationType>& all_relation_types();

bool is_event(EntityType t);

std::string_view to_string(EntityType t);
std::string_view to_string(RelationType t);
std::optional<EntityType> parse_entity_type(std::string_view s);
std::optional<RelationType> parse_relation_type(std::string_view s);

/// Label used in report tables ("Has_finding", "Sub-location_modifies", ...).
std::string_view display_name(RelationType t);

/// Non-Null relation types whose argument columns admit (arg1, arg2), in
/// declaration order. Role-ordered: (Locus, Investigation) admits nothing.
std::vector<RelationType> compatible_relation_types(EntityType arg1, EntityType arg2);
bool is_legal(RelationType r, EntityType arg1, EntityType arg2);

struct Token {
  std::size_t start = 0;  // code points
  std::size_t end = 0;    // exclusive
  std::string surface;
  std::string pos;
  std::string root;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::size_t first_token = 0;
  std::size_t last_token = 0;  // inclusive

  bool operator==(const Sentence&) const = default;
};

struct EntityMention {
  std::string id;
  EntityType etype = EntityType::Condition;
  std::size_t first_token = 0;
  std::size_t last_token = 0;  // inclusive

  std::size_t head() const { return last_token; }
  bool operator==(const EntityMention&) const = default;
};

struct RelationInstance {
  RelationType rtype = RelationType::Null;
  std::string arg1;
  std::string arg2;

  bool operator==(const RelationInstance&) const = default;
  auto operator<=>(const RelationInstance&) const = default;
};

struct DependencyEdge {
  std::size_t head = 0;
  std::size_t dependent = 0;
  std::string label;

  bool operator==(const DependencyEdge&) const = default;
};

struct Document {
  std::string id;
  std::string text;
  std::vector<Token> tokens;
  std::vector<Sentence> sentences;
  std::vector<EntityMention> entities;
  std::vector<RelationInstance> relations;
  std::vector<DependencyEdge> deps;

  const EntityMention* find_entity(std::string_view mention_id) const;
  /// Sentence index containing the token; tokens must be covered by sentences.
  std::size_t sentence_of(std::size_t token) const;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;

  bool operator==(const Corpus&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string doc_id, std::size_t line, const std::string& what);
  const std::string& doc_id() const { return doc_id_; }
  std::size_t line() const { return line_; }

 private:
  std::string doc_id_;
  std::size_t line_;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws SchemaError naming the first violated invariant.
void validate(const Document& doc);
void validate(const Corpus& corpus);

struct LoadOptions {
  /// Fill missing tokens, sentences, POS tags and roots with the rule-based
  /// preprocessor. Existing annotations are never overwritten.
  bool fill_missing_annotations = true;
};

/// One JSON record per line; blank lines are skipped.
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& opts = {});
Corpus parse_corpus(std::string_view content, const LoadOptions& opts = {});
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& corpus);

/// Number of Unicode code points in a UTF-8 string.
std::size_t codepoint_length(std::string_view utf8);
/// Substring by code-point offsets [start, end).
std::string codepoint_substr(std::string_view utf8, std::size_t start, std::size_t end);

}  // namespace clinrel
