#include "clinrel/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "clinrel/preprocess.hpp"

namespace clinrel {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::string_view, kEntityTypeCount> kEntityNames = {
    "Investigation", "Intervention",  "Condition",        "Locus",           "DrugOrDevice",
    "Result",        "NegationSignal", "LateralitySignal", "SubLocationSignal",
};

constexpr std::array<std::string_view, kRelationTypeCount + 1> kRelationNames = {
    "HasTarget",        "HasFinding",         "HasIndication",       "HasLocation",
    "NegationModifies", "LateralityModifies", "SubLocationModifies", "Null",
};

constexpr std::array<std::string_view, kRelationTypeCount + 1> kDisplayNames = {
    "Has_target",        "Has_finding",         "Has_indication",        "Has_location",
    "Negation_modifies", "Laterality_modifies", "Sub-location_modifies", "Null",
};

struct Signature {
  RelationType rtype;
  std::vector<EntityType> first;
  std::vector<EntityType> second;
};

const std::vector<Signature>& schema() {
  using E = EntityType;
  using R = RelationType;
  static const std::vector<Signature> s = {
      {R::HasTarget, {E::Investigation, E::Intervention}, {E::Locus}},
      {R::HasFinding, {E::Investigation}, {E::Condition, E::Result}},
      {R::HasIndication, {E::DrugOrDevice, E::Intervention, E::Investigation}, {E::Condition}},
      {R::HasLocation, {E::Condition}, {E::Locus}},
      {R::NegationModifies, {E::NegationSignal}, {E::Condition}},
      {R::LateralityModifies, {E::LateralitySignal}, {E::Locus, E::Intervention}},
      {R::SubLocationModifies, {E::SubLocationSignal}, {E::Locus}},
  };
  return s;
}

bool contains(const std::vector<EntityType>& v, EntityType t) {
  return std::find(v.begin(), v.end(), t) != v.end();
}

// Decodes one code point starting at byte i; returns its byte length.
std::size_t utf8_width(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // invalid lead byte counts as one unit
}

// --- JSON <-> document -----------------------------------------------------

[[noreturn]] void fail(const std::string& doc_id, std::size_t line, const std::string& what) {
  throw ParseError(doc_id, line, what);
}

void check_fields(const ordered_json& obj, std::initializer_list<std::string_view> allowed,
                  const std::string& where, const std::string& doc_id, std::size_t line) {
  if (!obj.is_object()) fail(doc_id, line, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(doc_id, line, "unknown field '" + key + "' in " + where);
  }
  for (auto name : allowed) {
    if (!obj.contains(std::string(name)))
      fail(doc_id, line, "missing field '" + std::string(name) + "' in " + where);
  }
}

template <typename T>
T get_field(const ordered_json& obj, const char* name, const std::string& doc_id, std::size_t line) {
  try {
    return obj.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(doc_id, line, std::string("bad value for '") + name + "': " + e.what());
  }
}

const ordered_json& get_array(const ordered_json& obj, const char* name, const std::string& doc_id,
                              std::size_t line) {
  const auto& a = obj.at(name);
  if (!a.is_array()) fail(doc_id, line, std::string("field '") + name + "' must be a list");
  return a;
}

Document document_from_json(const ordered_json& j, std::size_t line) {
  std::string doc_id = "?";
  if (j.is_object() && j.contains("id") && j["id"].is_string()) doc_id = j["id"].get<std::string>();
  check_fields(j, {"id", "text", "tokens", "sentences", "entities", "relations", "deps"}, "document",
               doc_id, line);

  Document d;
  d.id = get_field<std::string>(j, "id", doc_id, line);
  d.text = get_field<std::string>(j, "text", doc_id, line);

  for (const auto& t : get_array(j, "tokens", doc_id, line)) {
    check_fields(t, {"start", "end", "surface", "pos", "root"}, "token", doc_id, line);
    d.tokens.push_back({get_field<std::size_t>(t, "start", doc_id, line),
                        get_field<std::size_t>(t, "end", doc_id, line),
                        get_field<std::string>(t, "surface", doc_id, line),
                        get_field<std::string>(t, "pos", doc_id, line),
                        get_field<std::string>(t, "root", doc_id, line)});
  }
  for (const auto& s : get_array(j, "sentences", doc_id, line)) {
    check_fields(s, {"first_token", "last_token"}, "sentence", doc_id, line);
    d.sentences.push_back({get_field<std::size_t>(s, "first_token", doc_id, line),
                           get_field<std::size_t>(s, "last_token", doc_id, line)});
  }
  for (const auto& e : get_array(j, "entities", doc_id, line)) {
    check_fields(e, {"id", "type", "first_token", "last_token"}, "entity", doc_id, line);
    auto type_name = get_field<std::string>(e, "type", doc_id, line);
    auto etype = parse_entity_type(type_name);
    if (!etype) fail(doc_id, line, "unknown entity type '" + type_name + "'");
    d.entities.push_back({get_field<std::string>(e, "id", doc_id, line), *etype,
                          get_field<std::size_t>(e, "first_token", doc_id, line),
                          get_field<std::size_t>(e, "last_token", doc_id, line)});
  }
  for (const auto& r : get_array(j, "relations", doc_id, line)) {
    check_fields(r, {"type", "arg1", "arg2"}, "relation", doc_id, line);
    auto type_name = get_field<std::string>(r, "type", doc_id, line);
    auto rtype = parse_relation_type(type_name);
    if (!rtype || *rtype == RelationType::Null)
      fail(doc_id, line, "unknown relation type '" + type_name + "'");
    d.relations.push_back({*rtype, get_field<std::string>(r, "arg1", doc_id, line),
                           get_field<std::string>(r, "arg2", doc_id, line)});
  }
  for (const auto& e : get_array(j, "deps", doc_id, line)) {
    check_fields(e, {"head", "dependent", "label"}, "dependency", doc_id, line);
    d.deps.push_back({get_field<std::size_t>(e, "head", doc_id, line),
                      get_field<std::size_t>(e, "dependent", doc_id, line),
                      get_field<std::string>(e, "label", doc_id, line)});
  }
  return d;
}

ordered_json document_to_json(const Document& d) {
  ordered_json j;
  j["id"] = d.id;
  j["text"] = d.text;
  auto tokens = ordered_json::array();
  for (const auto& t : d.tokens) {
    tokens.push_back(
        {{"start", t.start}, {"end", t.end}, {"surface", t.surface}, {"pos", t.pos}, {"root", t.root}});
  }
  j["tokens"] = std::move(tokens);
  auto sentences = ordered_json::array();
  for (const auto& s : d.sentences)
    sentences.push_back({{"first_token", s.first_token}, {"last_token", s.last_token}});
  j["sentences"] = std::move(sentences);
  auto entities = ordered_json::array();
  for (const auto& e : d.entities) {
    entities.push_back({{"id", e.id},
                        {"type", std::string(to_string(e.etype))},
                        {"first_token", e.first_token},
                        {"last_token", e.last_token}});
  }
  j["entities"] = std::move(entities);
  auto relations = ordered_json::array();
  for (const auto& r : d.relations)
    relations.push_back({{"type", std::string(to_string(r.rtype))}, {"arg1", r.arg1}, {"arg2", r.arg2}});
  j["relations"] = std::move(relations);
  auto deps = ordered_json::array();
  for (const auto& e : d.deps)
    deps.push_back({{"head", e.head}, {"dependent", e.dependent}, {"label", e.label}});
  j["deps"] = std::move(deps);
  return j;
}

}  // namespace

const std::vector<EntityType>& all_entity_types() {
  static const std::vector<EntityType> v = [] {
    std::vector<EntityType> out;
    for (std::size_t i = 0; i < kEntityTypeCount; ++i) out.push_back(static_cast<EntityType>(i));
    return out;
  }();
  return v;
}

const std::vector<RelationType>& all_relation_types() {
  static const std::vector<RelationType> v = [] {
    std::vector<RelationType> out;
    for (std::size_t i = 0; i < kRelationTypeCount; ++i) out.push_back(static_cast<RelationType>(i));
    return out;
  }();
  return v;
}

bool is_event(EntityType t) { return t == EntityType::Investigation || t == EntityType::Intervention; }

std::string_view to_string(EntityType t) { return kEntityNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(RelationType t) { return kRelationNames[static_cast<std::size_t>(t)]; }
std::string_view display_name(RelationType t) { return kDisplayNames[static_cast<std::size_t>(t)]; }

std::optional<EntityType> parse_entity_type(std::string_view s) {
  for (std::size_t i = 0; i < kEntityNames.size(); ++i)
    if (kEntityNames[i] == s) return static_cast<EntityType>(i);
  return std::nullopt;
}

std::optional<RelationType> parse_relation_type(std::string_view s) {
  for (std::size_t i = 0; i < kRelationNames.size(); ++i)
    if (kRelationNames[i] == s) return static_cast<RelationType>(i);
  return std::nullopt;
}

std::vector<RelationType> compatible_relation_types(EntityType arg1, EntityType arg2) {
  std::vector<RelationType> out;
  for (const auto& sig : schema())
    if (contains(sig.first, arg1) && contains(sig.second, arg2)) out.push_back(sig.rtype);
  return out;
}

bool is_legal(RelationType r, EntityType arg1, EntityType arg2) {
  for (const auto& sig : schema())
    if (sig.rtype == r) return contains(sig.first, arg1) && contains(sig.second, arg2);
  return false;
}

const EntityMention* Document::find_entity(std::string_view mention_id) const {
  for (const auto& e : entities)
    if (e.id == mention_id) return &e;
  return nullptr;
}

std::size_t Document::sentence_of(std::size_t token) const {
  auto it = std::upper_bound(sentences.begin(), sentences.end(), token,
                             [](std::size_t t, const Sentence& s) { return t < s.first_token; });
  if (it == sentences.begin()) return 0;
  return static_cast<std::size_t>(std::distance(sentences.begin(), it)) - 1;
}

ParseError::ParseError(std::string doc_id, std::size_t line, const std::string& what)
    : std::runtime_error("document '" + doc_id + "', line " + std::to_string(line) + ": " + what),
      doc_id_(std::move(doc_id)),
      line_(line) {}

std::size_t codepoint_length(std::string_view utf8) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < utf8.size(); i += utf8_width(static_cast<unsigned char>(utf8[i]))) ++n;
  return n;
}

std::string codepoint_substr(std::string_view utf8, std::size_t start, std::size_t end) {
  std::size_t cp = 0;
  std::size_t i = 0;
  std::size_t begin_byte = utf8.size();
  std::size_t end_byte = utf8.size();
  for (; i <= utf8.size(); ++cp) {
    if (cp == start) begin_byte = i;
    if (cp == end) {
      end_byte = i;
      break;
    }
    if (i == utf8.size()) break;
    i += utf8_width(static_cast<unsigned char>(utf8[i]));
  }
  if (begin_byte > end_byte) return {};
  return std::string(utf8.substr(begin_byte, end_byte - begin_byte));
}

void validate(const Document& d) {
  auto violation = [&](const std::string& what) {
    throw SchemaError("document '" + d.id + "': " + what);
  };
  const std::size_t text_len = codepoint_length(d.text);
  for (std::size_t i = 0; i < d.tokens.size(); ++i) {
    const auto& t = d.tokens[i];
    if (t.start >= t.end) violation("token " + std::to_string(i) + " has start >= end");
    if (t.end > text_len) violation("token " + std::to_string(i) + " extends past the text");
    if (i > 0 && t.start < d.tokens[i - 1].end)
      violation("token " + std::to_string(i) + " overlaps or precedes its predecessor");
    if (codepoint_substr(d.text, t.start, t.end) != t.surface)
      violation("token " + std::to_string(i) + " surface does not match text");
  }
  std::size_t expected = 0;
  for (std::size_t i = 0; i < d.sentences.size(); ++i) {
    const auto& s = d.sentences[i];
    if (s.first_token > s.last_token) violation("sentence " + std::to_string(i) + " has first > last");
    if (s.first_token != expected) violation("sentences do not partition the tokens");
    expected = s.last_token + 1;
  }
  if (expected != d.tokens.size()) violation("sentences do not partition the tokens");

  std::unordered_set<std::string> ids;
  for (const auto& e : d.entities) {
    if (!ids.insert(e.id).second) violation("duplicate entity id '" + e.id + "'");
    if (e.first_token > e.last_token || e.last_token >= d.tokens.size())
      violation("entity '" + e.id + "' has an invalid token span");
  }
  for (const auto& r : d.relations) {
    const auto* a1 = d.find_entity(r.arg1);
    const auto* a2 = d.find_entity(r.arg2);
    if (a1 == nullptr || a2 == nullptr)
      violation("relation references unknown mention '" + (a1 ? r.arg2 : r.arg1) + "'");
    if (r.arg1 == r.arg2) violation("relation has identical arguments '" + r.arg1 + "'");
    if (!is_legal(r.rtype, a1->etype, a2->etype))
      violation("relation " + std::string(to_string(r.rtype)) + "(" + r.arg1 + ", " + r.arg2 +
                ") has illegal argument types");
  }
  std::vector<bool> has_head(d.tokens.size(), false);
  for (const auto& e : d.deps) {
    if (e.head >= d.tokens.size() || e.dependent >= d.tokens.size())
      violation("dependency edge references a missing token");
    if (e.head == e.dependent) violation("dependency edge with head == dependent");
    if (has_head[e.dependent])
      violation("token " + std::to_string(e.dependent) + " has more than one head");
    has_head[e.dependent] = true;
  }
}

void validate(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& d : corpus.documents) {
    if (!ids.insert(d.id).second) throw SchemaError("duplicate document id '" + d.id + "'");
    validate(d);
  }
}

Corpus parse_corpus(std::string_view content, const LoadOptions& opts) {
  Corpus corpus;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    auto line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("?", line_no, e.what());
    }
    auto doc = document_from_json(j, line_no);
    if (opts.fill_missing_annotations) preprocess::annotate_missing(doc);
    corpus.documents.push_back(std::move(doc));
  }
  validate(corpus);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), opts);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents) {
    out += document_to_json(d).dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write corpus file " + path.string());
  out << serialize_corpus(corpus);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace clinrel
