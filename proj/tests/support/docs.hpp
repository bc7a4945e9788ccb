#pragma once

#include <string>
#include <vector>

#include "clinrel/corpus.hpp"
#include "clinrel/preprocess.hpp"

namespace testdoc {

struct Mention {
  std::string id;
  clinrel::EntityType type;
  std::size_t first;
  std::size_t last;
};

// Tokens, sentences, POS and roots come from the preprocessor; mentions are
// given as token ranges.
inline clinrel::Document make(const std::string& id, const std::string& text, const std::vector<Mention>& mentions,
                              const std::vector<clinrel::RelationInstance>& relations = {}) {
  clinrel::Document d;
  d.id = id;
  d.text = text;
  clinrel::preprocess::annotate_missing(d);
  for (const auto& m : mentions) d.entities.push_back({m.id, m.type, m.first, m.last});
  d.relations = relations;
  return d;
}

// Chain dependencies within each sentence: token t depends on t + 1.
inline void chain_deps(clinrel::Document& d) {
  for (const auto& s : d.sentences)
    for (std::size_t t = s.first_token; t < s.last_token; ++t) d.deps.push_back({t + 1, t, "dep"});
}

}  // namespace testdoc
