#include "clinrel/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace clinrel::preprocess {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t byte_offset;
  std::size_t byte_length;
};

std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  std::size_t i = 0;
  while (i < s.size()) {
    auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = lead;
    if (lead >= 0xF0 && lead < 0xF8) {
      len = 4;
      cp = lead & 0x07;
    } else if (lead >= 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if (lead >= 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    }
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0x00A0 || (c >= 0x2000 && c <= 0x200B) || c == 0x2028 || c == 0x2029 || c == 0x3000;
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_letter(char32_t c) {
  if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
  if (c < 0x80) return false;
  // Latin-1 punctuation and the general punctuation block are symbols.
  if (c <= 0xBF || c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x206F) return false;
  return !is_space(c);
}

bool is_alnum(char32_t c) { return is_letter(c) || is_digit(c); }

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& ch : out)
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool has_vowel(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_vowel(c) || c == 'y'; });
}

// "scann" -> "scan", "stopp" -> "stop"; l, s and z doublings are kept ("fill", "miss").
std::string undouble(std::string stem) {
  auto n = stem.size();
  if (n >= 4 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]) && stem[n - 1] != 'l' &&
      stem[n - 1] != 's' && stem[n - 1] != 'z')
    stem.pop_back();
  return stem;
}

const std::unordered_map<std::string, std::string>& irregular_roots() {
  static const std::unordered_map<std::string, std::string> m = {
      {"was", "be"},           {"were", "be"},         {"is", "be"},           {"are", "be"},
      {"been", "be"},          {"am", "be"},           {"has", "have"},        {"had", "have"},
      {"underwent", "undergo"}, {"undergone", "undergo"}, {"given", "give"},    {"gave", "give"},
      {"shown", "show"},       {"done", "do"},         {"did", "do"},          {"took", "take"},
      {"taken", "take"},       {"found", "find"},      {"began", "begin"},     {"begun", "begin"},
      {"noted", "note"},       {"removed", "remove"},  {"arranged", "arrange"}, {"diagnosed", "diagnose"},
      {"scheduled", "schedule"}, {"used", "use"},      {"continued", "continue"}, {"increased", "increase"},
      {"metastases", "metastasis"}, {"diagnoses", "diagnosis"}, {"women", "woman"}, {"men", "man"},
      {"feet", "foot"},        {"teeth", "tooth"},     {"suffered", "suffer"}, {"discussed", "discuss"},
  };
  return m;
}

// One reduction step; returns the input unchanged at a fixpoint.
std::string reduce_once(const std::string& w, std::string_view pos) {
  const auto& irregular = irregular_roots();
  if (auto it = irregular.find(w); it != irregular.end()) return it->second;

  const bool plural_or_3sg = pos == "NNS" || pos == "VBZ" || pos == "NNPS";
  const bool past = pos == "VBD" || pos == "VBN";
  const bool gerund = pos == "VBG";

  if (plural_or_3sg) {
    if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "sses")) return w.substr(0, w.size() - 2);
    if ((ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes")) && w.size() > 4)
      return w.substr(0, w.size() - 2);
    if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") &&
        w.size() >= 4)
      return w.substr(0, w.size() - 1);
  }
  if (past) {
    if (ends_with(w, "ied") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "ed") && w.size() >= 5) {
      auto stem = w.substr(0, w.size() - 2);
      if (has_vowel(stem)) return undouble(stem);
    }
  }
  if (gerund && ends_with(w, "ing") && w.size() >= 6) {
    auto stem = w.substr(0, w.size() - 3);
    if (has_vowel(stem)) return undouble(stem);
  }
  return w;
}

std::unordered_map<std::string, std::string> builtin_lexicon() {
  std::unordered_map<std::string, std::string> m;
  auto add = [&](std::initializer_list<const char*> words, const char* tag) {
    for (const char* w : words) m.emplace(w, tag);
  };
  add({"a", "an", "the", "this", "that", "these", "those", "no", "any", "some", "each", "every"}, "DT");
  add({"of", "in", "on", "at", "for", "with", "from", "by", "after", "before", "outside", "inside",
       "within", "during", "since", "into", "over", "under", "about", "without", "than", "as"},
      "IN");
  add({"to"}, "TO");
  add({"he", "she", "it", "they", "we", "i", "you", "him", "them"}, "PRP");
  add({"her", "his", "its", "their", "our", "my"}, "PRP$");
  add({"and", "or", "but", "nor"}, "CC");
  add({"was", "were", "had", "showed", "revealed", "underwent", "started", "suffered", "demonstrated",
       "confirmed", "received", "gave", "found", "began", "took"},
      "VBD");
  add({"is", "has", "shows", "suffers", "reveals", "demonstrates", "confirms", "remains"}, "VBZ");
  add({"are", "have", "show"}, "VBP");
  add({"be", "treat", "remove", "investigate", "assess", "exclude", "control", "relieve", "manage",
       "evaluate", "check"},
      "VB");
  add({"been", "given", "noted", "performed", "requested", "arranged", "booked", "discussed",
       "diagnosed", "reviewed", "scheduled", "shown", "done", "planned", "seen", "taken"},
      "VBN");
  add({"normal", "abnormal", "clear", "stable", "negative", "benign", "malignant", "bilateral",
       "upper", "lower", "superior", "inferior", "unremarkable", "satisfactory", "left", "right",
       "posterior", "anterior", "inner", "outer", "further", "recent", "new", "small", "large", "last",
       "next", "previous", "routine"},
      "JJ");
  add({"recently", "also", "not", "unfortunately", "subsequently", "previously", "again", "then",
       "now", "later", "still"},
      "RB");
  add({"there"}, "EX");
  add({"which", "that"}, "WDT");
  add({"who"}, "WP");
  add({"will", "would", "may", "might", "can", "could", "should"}, "MD");
  add({"week", "month", "year", "clinic", "family", "patient", "dose", "sign", "signs", "evidence",
       "absence", "pain", "cancer"},
      "NN");
  m["signs"] = "NNS";
  return m;
}

std::string punct_tag(char32_t c) {
  switch (c) {
    case U'.':
    case U'!':
    case U'?':
      return ".";
    case U',':
      return ",";
    case U':':
    case U';':
      return ":";
    case U'(':
    case U'[':
      return "-LRB-";
    case U')':
    case U']':
      return "-RRB-";
    case U'"':
    case U'\'':
      return "''";
    case U'%':
      return "NN";
    default:
      return "SYM";
  }
}

}  // namespace

std::vector<TokenSpan> tokenize(std::string_view text) {
  const auto cps = decode(text);
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  auto emit = [&](std::size_t from, std::size_t to) {
    auto byte_begin = cps[from].byte_offset;
    auto byte_end = cps[to - 1].byte_offset + cps[to - 1].byte_length;
    out.push_back({from, to, std::string(text.substr(byte_begin, byte_end - byte_begin))});
  };
  while (i < cps.size()) {
    const char32_t c = cps[i].value;
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (!is_alnum(c)) {
      emit(i, i + 1);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && is_alnum(cps[j].value)) ++j;
    // Join letter runs across single hyphens.
    while (j + 1 < cps.size() && cps[j].value == U'-' && is_letter(cps[j - 1].value) &&
           is_letter(cps[j + 1].value)) {
      j += 1;
      while (j < cps.size() && is_alnum(cps[j].value)) ++j;
    }
    emit(i, j);
    i = j;
  }
  return out;
}

const std::set<std::string>& default_abbreviations() {
  static const std::set<std::string> s = {"dr", "mr", "mrs", "ms", "prof", "vs", "etc", "approx",
                                          "st", "fig", "e.g", "i.e", "cf", "mg", "ml"};
  return s;
}

std::vector<Sentence> split_sentences(const std::vector<std::string>& surfaces,
                                      const std::set<std::string>& abbreviations) {
  std::vector<Sentence> out;
  if (surfaces.empty()) return out;
  std::size_t first = 0;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const auto& s = surfaces[i];
    if (s != "." && s != "!" && s != "?") continue;
    if (i > first && s == ".") {
      const auto& prev = surfaces[i - 1];
      const bool single_upper = prev.size() == 1 && prev[0] >= 'A' && prev[0] <= 'Z';
      if (single_upper || abbreviations.count(to_lower_ascii(prev)) > 0) continue;
    }
    out.push_back({first, i});
    first = i + 1;
  }
  if (first < surfaces.size()) out.push_back({first, surfaces.size() - 1});
  return out;
}

std::vector<Sentence> split_sentences(const std::vector<std::string>& surfaces) {
  return split_sentences(surfaces, default_abbreviations());
}

Tagger::Tagger() : lexicon_(builtin_lexicon()) {}

Tagger::Tagger(std::unordered_map<std::string, std::string> lexicon) : lexicon_(std::move(lexicon)) {}

std::string Tagger::tag(std::string_view surface) const {
  if (surface.empty()) return "NN";
  const auto cps = decode(surface);
  if (std::all_of(cps.begin(), cps.end(), [](const CodePoint& c) { return is_digit(c.value); }))
    return "CD";
  if (cps.size() == 1 && !is_alnum(cps[0].value)) return punct_tag(cps[0].value);

  const auto lower = to_lower_ascii(surface);
  if (auto it = lexicon_.find(lower); it != lexicon_.end()) return it->second;

  if (std::any_of(cps.begin(), cps.end(), [](const CodePoint& c) { return is_digit(c.value); }) &&
      std::all_of(cps.begin(), cps.end(),
                  [](const CodePoint& c) { return is_digit(c.value) || c.value == U'.' || c.value == U','; }))
    return "CD";
  if (ends_with(lower, "ing") && lower.size() > 4) return "VBG";
  if (ends_with(lower, "ed") && lower.size() > 3) return "VBD";
  if (ends_with(lower, "ly") && lower.size() > 3) return "RB";
  if (ends_with(lower, "s") && !ends_with(lower, "ss") && !ends_with(lower, "us") &&
      !ends_with(lower, "is") && lower.size() > 3)
    return "NNS";
  return "NN";
}

std::vector<std::string> Tagger::tag_all(const std::vector<std::string>& surfaces) const {
  std::vector<std::string> out;
  out.reserve(surfaces.size());
  for (const auto& s : surfaces) out.push_back(tag(s));
  return out;
}

std::vector<PosTag> pos_tag(const std::vector<std::string>& surfaces, const Tagger& tagger) {
  std::vector<PosTag> out;
  out.reserve(surfaces.size());
  for (const auto& s : surfaces) {
    auto full = tagger.tag(s);
    auto gen = generalize_pos(full);
    out.push_back({std::move(full), std::move(gen)});
  }
  return out;
}

std::string lemmatize(std::string_view surface, std::string_view pos) {
  std::string w = to_lower_ascii(surface);
  // Each step shortens the word or maps it through the irregular table, whose
  // values are never keys, so the loop reaches a fixpoint quickly.
  for (int guard = 0; guard < 16; ++guard) {
    auto next = reduce_once(w, pos);
    if (next == w) break;
    w = std::move(next);
  }
  return w;
}

std::string generalize_pos(std::string_view full) {
  const auto cps = decode(full);
  if (cps.size() <= 2) return std::string(full);
  return std::string(full.substr(0, cps[2].byte_offset));
}

std::set<std::string> load_abbreviations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open abbreviation list " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string word;
    if (ss >> word) {
      if (!word.empty() && word.back() == '.') word.pop_back();
      out.insert(to_lower_ascii(word));
    }
  }
  return out;
}

std::unordered_map<std::string, std::string> load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tag lexicon " + path.string());
  std::unordered_map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string word;
    std::string tag;
    if (!(ss >> word)) continue;
    if (!(ss >> tag))
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": missing tag");
    out[to_lower_ascii(word)] = tag;
  }
  return out;
}

void annotate_missing(Document& doc, const Tagger& tagger, const std::set<std::string>& abbreviations) {
  if (doc.tokens.empty() && !doc.text.empty()) {
    for (auto& span : tokenize(doc.text)) doc.tokens.push_back({span.start, span.end, span.surface, "", ""});
  }
  for (auto& t : doc.tokens) {
    if (t.pos.empty()) t.pos = tagger.tag(t.surface);
    if (t.root.empty()) t.root = lemmatize(t.surface, t.pos);
  }
  if (doc.sentences.empty() && !doc.tokens.empty()) {
    std::vector<std::string> surfaces;
    surfaces.reserve(doc.tokens.size());
    for (const auto& t : doc.tokens) surfaces.push_back(t.surface);
    doc.sentences = split_sentences(surfaces, abbreviations);
  }
}

}  // namespace clinrel::preprocess
