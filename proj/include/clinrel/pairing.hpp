#pragma once

#include <string>
#include <vector>

#include "clinrel/corpus.hpp"

namespace clinrel {

/// Candidate (arg1, arg2) in schema role order.
struct EntityPair {
  std::string doc_id;
  std::string arg1;
  std::string arg2;
  std::size_t sentence_crossings = 0;

  bool operator==(const EntityPair&) const = default;
};

struct LabeledInstance {
  EntityPair pair;
  RelationType label = RelationType::Null;
};

struct LabelingResult {
  std::vector<LabeledInstance> instances;
  /// Gold relations with no generated candidate (outside the sentence window).
  std::size_t unreachable_gold = 0;
};

inline constexpr std::size_t kDefaultMaxCrossings = 1;

/// Emits (m1, m2) for every ordered pair of distinct mentions whose types
/// admit at least one relation and which lie within `max_crossings` sentence
/// boundaries of each other. Sorted by arg1 first token, then arg2 first token.
std::vector<EntityPair> generate_pairs(const Document& doc, std::size_t max_crossings = kDefaultMaxCrossings);

LabelingResult label_pairs(const std::vector<EntityPair>& pairs, const std::vector<RelationInstance>& gold);

/// generate_pairs + label_pairs over one document.
LabelingResult labeled_instances(const Document& doc, std::size_t max_crossings = kDefaultMaxCrossings);

}  // namespace clinrel
