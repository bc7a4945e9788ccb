#include "clinrel/pairing.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace clinrel {

std::vector<EntityPair> generate_pairs(const Document& doc, std::size_t max_crossings) {
  struct Ranked {
    std::size_t key1;
    std::size_t key2;
    EntityPair pair;
  };
  std::vector<Ranked> ranked;
  for (const auto& m1 : doc.entities) {
    for (const auto& m2 : doc.entities) {
      if (&m1 == &m2) continue;
      if (compatible_relation_types(m1.etype, m2.etype).empty()) continue;
      const auto s1 = doc.sentence_of(m1.first_token);
      const auto s2 = doc.sentence_of(m2.first_token);
      const auto crossings = s1 > s2 ? s1 - s2 : s2 - s1;
      if (crossings > max_crossings) continue;
      ranked.push_back({m1.first_token, m2.first_token, {doc.id, m1.id, m2.id, crossings}});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    return std::tie(a.key1, a.key2) < std::tie(b.key1, b.key2);
  });
  std::vector<EntityPair> out;
  out.reserve(ranked.size());
  for (auto& r : ranked) out.push_back(std::move(r.pair));
  return out;
}

LabelingResult label_pairs(const std::vector<EntityPair>& pairs, const std::vector<RelationInstance>& gold) {
  // First gold type per argument pair wins; any further gold relation on the
  // same arguments cannot be represented and counts as unreachable.
  std::map<std::pair<std::string, std::string>, RelationType> by_args;
  std::size_t duplicates = 0;
  for (const auto& g : gold) {
    if (!by_args.emplace(std::make_pair(g.arg1, g.arg2), g.rtype).second) ++duplicates;
  }

  LabelingResult result;
  result.instances.reserve(pairs.size());
  std::size_t reached = 0;
  for (const auto& p : pairs) {
    RelationType label = RelationType::Null;
    if (auto it = by_args.find({p.arg1, p.arg2}); it != by_args.end()) {
      label = it->second;
      ++reached;
    }
    result.instances.push_back({p, label});
  }
  result.unreachable_gold = by_args.size() - reached + duplicates;
  return result;
}

LabelingResult labeled_instances(const Document& doc, std::size_t max_crossings) {
  return label_pairs(generate_pairs(doc, max_crossings), doc.relations);
}

}  // namespace clinrel
