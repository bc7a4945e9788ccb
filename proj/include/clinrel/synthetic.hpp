#pragma once

#include <cstdint>

#include "clinrel/corpus.hpp"

namespace clinrel {

/// Seeded generator of annotated narratives built from sentence templates.
/// Every template plants trigger words for the relations it carries, and
/// some templates carry a third mention between two unrelated arguments.
struct GeneratorConfig {
  std::size_t n_docs = 40;
  std::size_t min_sentences = 8;
  std::size_t max_sentences = 14;
  std::uint64_t seed = 42;
  /// Probability that a planted relation is left out of the gold standard.
  double annotation_miss_rate = 0.03;
};

Corpus generate_synthetic(const GeneratorConfig& cfg);

}  // namespace clinrel
