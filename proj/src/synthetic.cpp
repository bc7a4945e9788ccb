#include "clinrel/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "clinrel/preprocess.hpp"
#include "clinrel/rng.hpp"

namespace clinrel {

namespace {

using E = EntityType;
using R = RelationType;

struct PlantedRelation {
  R rtype;
  const char* arg1;
  const char* arg2;
};

struct Template {
  const char* pattern;  // "{slot}" placeholders; slot prefix selects the lexicon
  std::vector<PlantedRelation> relations;
  unsigned weight = 2;
};

const std::map<std::string, E>& slot_types() {
  static const std::map<std::string, E> m = {
      {"inv", E::Investigation}, {"itv", E::Intervention},   {"cond", E::Condition},
      {"loc", E::Locus},         {"drug", E::DrugOrDevice},  {"res", E::Result},
      {"neg", E::NegationSignal}, {"lat", E::LateralitySignal}, {"sub", E::SubLocationSignal},
  };
  return m;
}

const std::vector<std::string>& lexicon(E type) {
  static const std::map<E, std::vector<std::string>> m = {
      {E::Investigation,
       {"X-ray", "CT scan", "ultrasound", "MRI", "biopsy", "mammogram", "bone scan", "Ultrasound scanning",
        "endoscopy", "PET scan", "cystoscopy", "blood test"}},
      {E::Intervention,
       {"mastectomy", "mastectomies", "lumpectomy", "resection", "radiotherapy", "surgery", "excision",
        "chemotherapy", "nephrectomy", "stenting"}},
      {E::Condition,
       {"cancer", "tumour", "tumors", "hydronephrosis", "cyst", "metastases", "obstruction", "carcinoma",
        "lesion", "effusion", "nodule", "Sjögren syndrome", "lymphoma", "abscess"}},
      {E::Locus,
       {"chest", "bowel", "breast", "lung", "thyroid", "prostate", "abdomen", "liver", "groin", "brain",
        "kidney", "pelvis", "axilla", "bladder"}},
      {E::DrugOrDevice,
       {"tamoxifen", "cisplatin", "morphine", "paracetamol", "letrozole", "herceptin", "doxorubicin",
        "a stent", "dexamethasone"}},
      {E::Result, {"normal", "unremarkable", "clear", "abnormal", "stable", "satisfactory", "inconclusive"}},
      {E::NegationSignal, {"no sign", "no signs", "no evidence", "no-evidence", "absence"}},
      {E::LateralitySignal, {"left", "right", "bilateral"}},
      {E::SubLocationSignal, {"upper", "lower", "outside", "superior-vena-caval", "inner", "posterior"}},
  };
  return m.at(type);
}

const std::vector<Template>& templates() {
  static const std::vector<Template> t = {
      {"A {loc} {inv} was {res}.", {{R::HasTarget, "inv", "loc"}, {R::HasFinding, "inv", "res"}}},
      {"This patient has had a {loc} {inv}.", {{R::HasTarget, "inv", "loc"}}},
      {"This patient has had a {inv} which shows {cond}.", {{R::HasFinding, "inv", "cond"}}},
      {"The {inv} of the {loc} revealed {cond}.",
       {{R::HasTarget, "inv", "loc"}, {R::HasFinding, "inv", "cond"}}},
      {"{drug} was given to treat the {cond}.", {{R::HasIndication, "drug", "cond"}}},
      {"She was started on {drug} for her {cond}.", {{R::HasIndication, "drug", "cond"}}},
      {"He underwent {itv} to remove the {cond}.", {{R::HasIndication, "itv", "cond"}}},
      {"A {inv} was requested to investigate the {cond}.", {{R::HasIndication, "inv", "cond"}}},
      {"There was {neg} of the {cond}.", {{R::NegationModifies, "neg", "cond"}}},
      {"There was {neg} of {cond} in the {sub} {loc}.",
       {{R::NegationModifies, "neg", "cond"}, {R::HasLocation, "cond", "loc"},
        {R::SubLocationModifies, "sub", "loc"}}},
      {"She has a {cond} on her {lat} {loc}.",
       {{R::HasLocation, "cond", "loc"}, {R::LateralityModifies, "lat", "loc"}}},
      {"This patient has had a {loc} {cond}.", {{R::HasLocation, "cond", "loc"}}},
      {"She had {lat} {itv}.", {{R::LateralityModifies, "lat", "itv"}}},
      {"Pain was noted in the {sub} {loc}.", {{R::SubLocationModifies, "sub", "loc"}}},
      {"He suffers from {sub} {loc} {cond}.",
       {{R::SubLocationModifies, "sub", "loc"}, {R::HasLocation, "cond", "loc"}}},
      {"The {cond} in the {loc} was treated with {drug}.",
       {{R::HasLocation, "cond", "loc"}, {R::HasIndication, "drug", "cond"}}},
      {"A {inv} was performed. It showed {cond}.", {{R::HasFinding, "inv", "cond"}}},
      {"Her {lat} {loc} was {res} on {inv}.",
       {{R::LateralityModifies, "lat", "loc"}, {R::HasTarget, "inv", "loc"}, {R::HasFinding, "inv", "res"}}},
      {"{itv} of the {loc} was performed for {cond}.",
       {{R::HasTarget, "itv", "loc"}, {R::HasIndication, "itv", "cond"}}},
      {"The {cond} was first seen on a {inv} last year.", {{R::HasFinding, "inv", "cond"}}},
      {"{neg} of {cond} was seen, but the {cond2} remains.", {{R::NegationModifies, "neg", "cond"}}},
      {"The {loc} {cond} was treated with {itv} while {drug} was continued.",
       {{R::HasLocation, "cond", "loc"}, {R::HasIndication, "itv", "cond"}}},
      // Distractors: co-occurring mentions without a relation.
      {"The {inv} was booked after the {cond} was discussed with the family.", {}},
      {"Her {drug} dose was reviewed in clinic.", {}, 1},
      {"A {inv} and a {inv2} were arranged.", {}},
      {"The {cond} and the {cond2} were discussed before the {inv}.", {}},
      {"Follow-up was arranged with the oncology team.", {}, 1},
  };
  return t;
}

const std::vector<std::string>& openers() {
  static const std::vector<std::string> v = {"Recently, ", "Unfortunately, ", "In March, ",
                                             "On review, ", "Subsequently, "};
  return v;
}

struct FilledSlot {
  std::string name;
  E etype;
  std::size_t start;  // code points into the document text
  std::size_t end;
};

struct Builder {
  std::string text;
  std::size_t length = 0;  // code points
  std::vector<FilledSlot> slots;

  void append(const std::string& s) {
    text += s;
    length += codepoint_length(s);
  }
};

void capitalize_first(std::string& s) {
  if (!s.empty() && std::islower(static_cast<unsigned char>(s[0])))
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
}

// Expands one template at the end of the builder; returns its slots.
std::vector<FilledSlot> instantiate(const Template& tpl, Builder& b, Rng& rng) {
  std::vector<FilledSlot> filled;
  std::string pattern = tpl.pattern;
  std::string prefix;
  if (rng.bernoulli(0.25) && pattern[0] != '{' ) {
    prefix = openers()[rng.index(openers().size())];
    pattern[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(pattern[0])));
  }
  if (!b.text.empty()) b.append(" ");
  b.append(prefix);
  bool at_start = prefix.empty();

  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] != '{') {
      auto next = pattern.find('{', i);
      if (next == std::string::npos) next = pattern.size();
      b.append(pattern.substr(i, next - i));
      at_start = false;
      i = next;
      continue;
    }
    const auto close = pattern.find('}', i);
    const std::string name = pattern.substr(i + 1, close - i - 1);
    std::string kind = name;
    while (!kind.empty() && std::isdigit(static_cast<unsigned char>(kind.back()))) kind.pop_back();
    const E etype = slot_types().at(kind);
    const auto& words = lexicon(etype);
    std::string phrase = words[rng.index(words.size())];
    if (at_start) capitalize_first(phrase);
    const std::size_t start = b.length;
    b.append(phrase);
    filled.push_back({name, etype, start, b.length});
    at_start = false;
    i = close + 1;
  }
  return filled;
}

std::string dep_label(const std::string& pos) {
  const auto gen = preprocess::generalize_pos(pos);
  if (gen.empty() || !std::isalpha(static_cast<unsigned char>(gen[0]))) return "punct";
  std::string out;
  for (char c : gen)
    out += std::isalpha(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : c;
  return out;
}

Document make_document(std::size_t index, std::size_t n_sentences, double miss_rate, Rng& rng) {
  const auto& tpls = templates();
  std::vector<std::size_t> tpl_sentences;
  for (const auto& t : tpls) tpl_sentences.push_back(static_cast<std::size_t>(std::count(t.pattern, t.pattern + std::strlen(t.pattern), '.')));

  Builder b;
  struct Planted {
    R rtype;
    std::size_t arg1_slot;
    std::size_t arg2_slot;
  };
  std::vector<FilledSlot> slots;
  std::vector<Planted> planted;

  std::size_t produced = 0;
  while (produced < n_sentences) {
    // Only templates that fit the remaining sentence budget are drawn.
    const std::size_t room = n_sentences - produced;
    unsigned total_weight = 0;
    for (std::size_t i = 0; i < tpls.size(); ++i)
      if (tpl_sentences[i] <= room) total_weight += tpls[i].weight;
    auto pick = static_cast<unsigned>(rng.index(total_weight));
    std::size_t ti = 0;
    while (tpl_sentences[ti] > room || pick >= tpls[ti].weight) {
      if (tpl_sentences[ti] <= room) pick -= tpls[ti].weight;
      ++ti;
    }
    const auto& tpl = tpls[ti];
    const std::size_t base = slots.size();
    auto filled = instantiate(tpl, b, rng);
    for (const auto& rel : tpl.relations) {
      std::size_t a1 = 0;
      std::size_t a2 = 0;
      for (std::size_t k = 0; k < filled.size(); ++k) {
        if (filled[k].name == rel.arg1) a1 = base + k;
        if (filled[k].name == rel.arg2) a2 = base + k;
      }
      if (!rng.bernoulli(miss_rate)) planted.push_back({rel.rtype, a1, a2});
    }
    slots.insert(slots.end(), filled.begin(), filled.end());
    produced += tpl_sentences[ti];
  }

  Document doc;
  char id[32];
  std::snprintf(id, sizeof id, "doc%03zu", index);
  doc.id = id;
  doc.text = b.text;

  const preprocess::Tagger tagger;
  for (auto& span : preprocess::tokenize(doc.text)) {
    auto pos = tagger.tag(span.surface);
    auto root = preprocess::lemmatize(span.surface, pos);
    doc.tokens.push_back({span.start, span.end, std::move(span.surface), std::move(pos), std::move(root)});
  }
  std::vector<std::string> surfaces;
  for (const auto& t : doc.tokens) surfaces.push_back(t.surface);
  doc.sentences = preprocess::split_sentences(surfaces);

  std::size_t tok = 0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    while (doc.tokens[tok].start < slots[k].start) ++tok;
    std::size_t last = tok;
    while (last + 1 < doc.tokens.size() && doc.tokens[last + 1].end <= slots[k].end) ++last;
    doc.entities.push_back({"T" + std::to_string(k + 1), slots[k].etype, tok, last});
  }
  for (const auto& p : planted)
    doc.relations.push_back({p.rtype, doc.entities[p.arg1_slot].id, doc.entities[p.arg2_slot].id});

  // Projective chain: every token depends on its right neighbour within the sentence.
  for (const auto& s : doc.sentences)
    for (std::size_t t = s.first_token; t < s.last_token; ++t)
      doc.deps.push_back({t + 1, t, dep_label(doc.tokens[t].pos)});
  return doc;
}

}  // namespace

Corpus generate_synthetic(const GeneratorConfig& cfg) {
  Corpus corpus;
  Rng rng(cfg.seed);
  const std::size_t lo = std::min(cfg.min_sentences, cfg.max_sentences);
  const std::size_t hi = std::max(cfg.min_sentences, cfg.max_sentences);
  for (std::size_t d = 0; d < cfg.n_docs; ++d) {
    const std::size_t n_sentences = lo + rng.index(hi - lo + 1);
    corpus.documents.push_back(make_document(d, std::max<std::size_t>(n_sentences, 1),
                                             cfg.annotation_miss_rate, rng));
  }
  return corpus;
}

}  // namespace clinrel
