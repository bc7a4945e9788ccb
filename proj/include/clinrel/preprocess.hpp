#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clinrel/corpus.hpp"

namespace clinrel::preprocess {

struct TokenSpan {
  std::size_t start = 0;  // code points
  std::size_t end = 0;
  std::string surface;

  bool operator==(const TokenSpan&) const = default;
};

struct PosTag {
  std::string full;
  std::string generalized;
};

/// Letter/digit runs are tokens; letter runs joined by '-' stay together
/// ("X-ray", "superior-vena-caval"); any other non-space symbol is a
/// single-character token.
std::vector<TokenSpan> tokenize(std::string_view text);

/// Sentence boundary after '.', '!' or '?' unless the preceding token is a
/// single uppercase letter or a listed abbreviation.
std::vector<Sentence> split_sentences(const std::vector<std::string>& surfaces,
                                      const std::set<std::string>& abbreviations);
std::vector<Sentence> split_sentences(const std::vector<std::string>& surfaces);

const std::set<std::string>& default_abbreviations();

/// Lexicon lookup with suffix-rule fallback.
class Tagger {
 public:
  Tagger();  // built-in lexicon
  explicit Tagger(std::unordered_map<std::string, std::string> lexicon);

  std::string tag(std::string_view surface) const;
  std::vector<std::string> tag_all(const std::vector<std::string>& surfaces) const;

  const std::unordered_map<std::string, std::string>& lexicon() const { return lexicon_; }

 private:
  std::unordered_map<std::string, std::string> lexicon_;
};

std::vector<PosTag> pos_tag(const std::vector<std::string>& surfaces, const Tagger& tagger = Tagger{});

std::string lemmatize(std::string_view surface, std::string_view pos);

std::string generalize_pos(std::string_view full);

/// One abbreviation per line; '#' starts a comment.
std::set<std::string> load_abbreviations(const std::filesystem::path& path);
/// "word<TAB>TAG" (or whitespace separated) per line.
std::unordered_map<std::string, std::string> load_lexicon(const std::filesystem::path& path);

/// Fills tokens, sentences, POS and roots that are missing from a document.
/// Gold annotations that are present are left untouched.
void annotate_missing(Document& doc, const Tagger& tagger = Tagger{},
                      const std::set<std::string>& abbreviations = default_abbreviations());

}  // namespace clinrel::preprocess
