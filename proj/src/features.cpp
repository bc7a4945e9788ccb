#include "clinrel/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "clinrel/preprocess.hpp"

namespace clinrel {

namespace {

constexpr std::array<std::string_view, 12> kSetNames = {
    "tokN", "gentokN", "atype", "dir", "str", "pos", "root", "genpos", "inter", "event", "dep", "syndist",
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string format_value(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

enum class TokenForm { Surface, Pos, Root, GenPos };

std::string form_of(const Token& t, TokenForm f) {
  switch (f) {
    case TokenForm::Surface:
      return t.surface;
    case TokenForm::Pos:
      return t.pos;
    case TokenForm::Root:
      return t.root;
    case TokenForm::GenPos:
      return preprocess::generalize_pos(t.pos);
  }
  return {};
}

bool inside(std::size_t token, const EntityMention& m) { return token >= m.first_token && token <= m.last_token; }

struct PairContext {
  const Document& doc;
  const EntityMention& arg1;
  const EntityMention& arg2;
  const EntityMention& left;
  const EntityMention& right;
  std::size_t between_begin;  // first token strictly between the arguments
  std::size_t between_end;    // one past the last

  std::size_t between_count() const { return between_end - between_begin; }
};

PairContext make_context(const Document& doc, const EntityMention& a1, const EntityMention& a2) {
  const bool a1_first = std::tie(a1.first_token, a1.last_token) <= std::tie(a2.first_token, a2.last_token);
  const auto& left = a1_first ? a1 : a2;
  const auto& right = a1_first ? a2 : a1;
  std::size_t begin = left.last_token + 1;
  std::size_t end = right.first_token;
  if (end < begin) end = begin;  // overlapping mentions
  return {doc, a1, a2, left, right, begin, end};
}

void window_features(const PairContext& ctx, FeatureSet set, std::size_t n, FeatureVector& fv) {
  const bool generalised = set == FeatureSet::GenTokN;
  const auto& tokens = ctx.doc.tokens;
  auto emit = [&](int arg, long offset, std::size_t idx) {
    std::string prefix = "a" + std::to_string(arg) + ":" + (offset > 0 ? "+" : "") + std::to_string(offset) + ":";
    const auto& t = tokens[idx];
    if (generalised) {
      fv.set({set, prefix + "root=" + t.root}, 1.0);
      fv.set({set, prefix + "genpos=" + preprocess::generalize_pos(t.pos)}, 1.0);
    } else {
      fv.set({set, prefix + "str=" + t.surface}, 1.0);
      fv.set({set, prefix + "pos=" + t.pos}, 1.0);
    }
  };
  for (int arg = 1; arg <= 2; ++arg) {
    const auto& m = arg == 1 ? ctx.arg1 : ctx.arg2;
    const auto& other = arg == 1 ? ctx.arg2 : ctx.arg1;
    for (std::size_t off = 1; off <= n; ++off) {
      if (m.first_token >= off) {
        const auto idx = m.first_token - off;
        if (!inside(idx, other)) emit(arg, -static_cast<long>(off), idx);
      }
      const auto idx = m.last_token + off;
      if (idx < tokens.size() && !inside(idx, other)) emit(arg, static_cast<long>(off), idx);
    }
  }
}

void structure_features(const PairContext& ctx, FeatureSet set, TokenForm form, FeatureVector& fv) {
  const auto& tokens = ctx.doc.tokens;
  auto f = [&](std::size_t idx) { return form_of(tokens[idx], form); };
  for (std::size_t i = ctx.arg1.first_token; i <= ctx.arg1.last_token; ++i) fv.set({set, "a1=" + f(i)}, 1.0);
  for (std::size_t i = ctx.arg2.first_token; i <= ctx.arg2.last_token; ++i) fv.set({set, "a2=" + f(i)}, 1.0);
  const auto h1 = f(ctx.arg1.head());
  const auto h2 = f(ctx.arg2.head());
  fv.set({set, "hm1=" + h1}, 1.0);
  fv.set({set, "hm2=" + h2}, 1.0);
  fv.set({set, "hm12=" + h1 + "_" + h2}, 1.0);
  if (ctx.between_count() > 0) {
    fv.set({set, "bf=" + f(ctx.between_begin)}, 1.0);
    fv.set({set, "bl=" + f(ctx.between_end - 1)}, 1.0);
    for (std::size_t i = ctx.between_begin; i < ctx.between_end; ++i) fv.set({set, "bo=" + f(i)}, 1.0);
  }
  for (std::size_t k = 1; k <= 2; ++k) {
    if (ctx.left.first_token >= k) fv.set({set, "bm" + std::to_string(k) + "=" + f(ctx.left.first_token - k)}, 1.0);
    const auto after = ctx.right.last_token + k;
    if (after < tokens.size()) fv.set({set, "am" + std::to_string(k) + "=" + f(after)}, 1.0);
  }
}

std::vector<const EntityMention*> intervening(const PairContext& ctx) {
  std::vector<const EntityMention*> out;
  for (const auto& m : ctx.doc.entities) {
    if (&m == &ctx.arg1 || &m == &ctx.arg2) continue;
    if (m.first_token >= ctx.between_begin && m.last_token < ctx.between_end) out.push_back(&m);
  }
  return out;
}

}  // namespace

std::string_view to_string(FeatureSet s) { return kSetNames[static_cast<std::size_t>(s)]; }

std::optional<FeatureSet> parse_feature_set(std::string_view s) {
  for (std::size_t i = 0; i < kSetNames.size(); ++i)
    if (lower(kSetNames[i]) == lower(s)) return static_cast<FeatureSet>(i);
  return std::nullopt;
}

std::string FeatureKey::render() const {
  std::string out(to_string(set));
  if (detail.empty() || detail.front() != '=') out += ':';
  out += detail;
  return out;
}

void FeatureVector::set(const FeatureKey& key, double value) { set(key.render(), value); }

void FeatureVector::set(std::string key, double value) {
  if (value == 0.0) {
    values_.erase(key);
    return;
  }
  values_[std::move(key)] = value;
}

void FeatureVector::set_count(const FeatureKey& key, std::size_t count) {
  if (count > 0)
    set(key, static_cast<double>(count));
  else
    set(key.render() + "=0", 1.0);
}

double FeatureVector::get(std::string_view key) const {
  auto it = values_.find(key);
  return it == values_.end() ? 0.0 : it->second;
}

bool FeatureVector::contains(std::string_view key) const { return values_.find(key) != values_.end(); }

std::string FeatureVector::to_golden() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += '\t';
    out += format_value(v);
    out += '\n';
  }
  return out;
}

const std::vector<FeatureSet>& allgen_sets() {
  static const std::vector<FeatureSet> v = {FeatureSet::GenTokN, FeatureSet::Atype, FeatureSet::Dir,
                                            FeatureSet::Root,    FeatureSet::GenPos, FeatureSet::Inter,
                                            FeatureSet::Event};
  return v;
}

const std::vector<FeatureSet>& notok_sets() {
  static const std::vector<FeatureSet> v = {FeatureSet::Atype, FeatureSet::Dir,   FeatureSet::Str,
                                            FeatureSet::Pos,   FeatureSet::Inter, FeatureSet::Event};
  return v;
}

FeatureConfig FeatureConfig::from_names(const std::vector<std::string>& names) {
  FeatureConfig cfg;
  for (const auto& raw : names) {
    const auto name = lower(raw);
    if (name == "allgen") {
      cfg.enabled.insert(allgen_sets().begin(), allgen_sets().end());
      continue;
    }
    if (name == "notok") {
      cfg.enabled.insert(notok_sets().begin(), notok_sets().end());
      continue;
    }
    auto windowed = [&](std::string_view prefix, FeatureSet set) {
      if (name.rfind(prefix, 0) != 0) return false;
      auto rest = std::string_view(name).substr(prefix.size());
      if (rest == "n") {
        cfg.enabled.insert(set);
        return true;
      }
      std::size_t n = 0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
      if (rest.empty() || ec != std::errc{} || ptr != rest.data() + rest.size() || n == 0) return false;
      cfg.enabled.insert(set);
      cfg.window = n;
      return true;
    };
    if (windowed("gentok", FeatureSet::GenTokN) || windowed("tok", FeatureSet::TokN)) continue;
    auto set = parse_feature_set(name);
    if (!set) throw std::invalid_argument("unknown feature set '" + raw + "'");
    cfg.enabled.insert(*set);
  }
  return cfg;
}

std::vector<std::string> FeatureConfig::names() const {
  std::vector<std::string> out;
  for (auto s : enabled) {
    if (s == FeatureSet::TokN)
      out.push_back("tok" + std::to_string(window));
    else if (s == FeatureSet::GenTokN)
      out.push_back("gentok" + std::to_string(window));
    else
      out.emplace_back(to_string(s));
  }
  return out;
}

std::vector<std::size_t> DependencyPath::tokens() const {
  std::vector<std::size_t> out;
  if (steps.empty()) return out;
  out.push_back(steps.front().from);
  for (const auto& s : steps) out.push_back(s.to);
  return out;
}

std::string DependencyPath::render() const {
  std::string out;
  for (const auto& s : steps) {
    out += s.upward ? '<' : '>';
    out += s.label;
  }
  return out;
}

std::optional<DependencyPath> dependency_path(const Document& doc, std::size_t from_token, std::size_t to_token) {
  const std::size_t n = doc.tokens.size();
  if (from_token >= n || to_token >= n || doc.deps.empty()) return std::nullopt;

  struct Arc {
    std::size_t to;
    const std::string* label;
    bool upward;
  };
  std::vector<std::vector<Arc>> adj(n);
  for (const auto& e : doc.deps) {
    adj[e.dependent].push_back({e.head, &e.label, true});
    adj[e.head].push_back({e.dependent, &e.label, false});
  }

  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(n, kUnreached);
  std::deque<std::size_t> queue{to_token};
  dist[to_token] = 0;
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (const auto& a : adj[u]) {
      if (dist[a.to] == kUnreached) {
        dist[a.to] = dist[u] + 1;
        queue.push_back(a.to);
      }
    }
  }
  if (dist[from_token] == kUnreached) return std::nullopt;

  // Walk toward the target keeping every node reachable by the smallest label
  // sequence so far; parent links pick the smallest predecessor token.
  DependencyPath path;
  std::vector<std::size_t> frontier{from_token};
  std::vector<std::size_t> parent(n, kUnreached);
  std::vector<const Arc*> via(n, nullptr);
  for (std::size_t step = dist[from_token]; step > 0; --step) {
    const Arc* best = nullptr;
    auto key = [](const Arc* a) { return std::make_tuple(*a->label, a->upward ? 0 : 1); };
    for (auto u : frontier)
      for (const auto& a : adj[u])
        if (dist[a.to] == step - 1 && (best == nullptr || key(&a) < key(best))) best = &a;
    std::vector<std::size_t> next;
    for (auto u : frontier) {
      for (const auto& a : adj[u]) {
        if (dist[a.to] != step - 1 || key(&a) != key(best)) continue;
        if (parent[a.to] == kUnreached || u < parent[a.to]) {
          if (parent[a.to] == kUnreached) next.push_back(a.to);
          parent[a.to] = u;
          via[a.to] = &a;
        }
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }

  std::vector<DependencyStep> reversed;
  for (std::size_t v = to_token; v != from_token; v = parent[v])
    reversed.push_back({parent[v], v, *via[v]->label, via[v]->upward});
  path.steps.assign(reversed.rbegin(), reversed.rend());
  return path;
}

std::optional<DependencyPath> dependency_path(const Document& doc, const EntityMention& m1, const EntityMention& m2) {
  return dependency_path(doc, m1.head(), m2.head());
}

FeatureVector extract(const EntityPair& pair, const Document& doc, const FeatureConfig& cfg) {
  const auto* a1 = doc.find_entity(pair.arg1);
  const auto* a2 = doc.find_entity(pair.arg2);
  if (a1 == nullptr || a2 == nullptr)
    throw std::invalid_argument("entity pair (" + pair.arg1 + ", " + pair.arg2 + ") not found in document " + doc.id);
  const auto ctx = make_context(doc, *a1, *a2);
  FeatureVector fv;

  if (cfg.has(FeatureSet::TokN)) window_features(ctx, FeatureSet::TokN, cfg.window, fv);
  if (cfg.has(FeatureSet::GenTokN)) window_features(ctx, FeatureSet::GenTokN, cfg.window, fv);
  if (cfg.has(FeatureSet::Atype))
    fv.set({FeatureSet::Atype, "=" + std::string(to_string(a1->etype)) + "-" + std::string(to_string(a2->etype))}, 1.0);
  if (cfg.has(FeatureSet::Dir))
    fv.set({FeatureSet::Dir, a1->first_token < a2->first_token ? "=fwd" : "=bwd"}, 1.0);
  if (cfg.has(FeatureSet::Str)) structure_features(ctx, FeatureSet::Str, TokenForm::Surface, fv);
  if (cfg.has(FeatureSet::Pos)) structure_features(ctx, FeatureSet::Pos, TokenForm::Pos, fv);
  if (cfg.has(FeatureSet::Root)) structure_features(ctx, FeatureSet::Root, TokenForm::Root, fv);
  if (cfg.has(FeatureSet::GenPos)) structure_features(ctx, FeatureSet::GenPos, TokenForm::GenPos, fv);

  if (cfg.has(FeatureSet::Inter) || cfg.has(FeatureSet::Event)) {
    const auto between = intervening(ctx);
    if (cfg.has(FeatureSet::Inter)) {
      fv.set_count({FeatureSet::Inter, "count"}, between.size());
      std::map<EntityType, std::size_t> per_type;
      for (const auto* m : between) ++per_type[m->etype];
      for (const auto& [type, count] : per_type) {
        fv.set({FeatureSet::Inter, "n_" + std::string(to_string(type))}, static_cast<double>(count));
        fv.set({FeatureSet::Inter, "has=" + std::string(to_string(type))}, 1.0);
      }
    }
    if (cfg.has(FeatureSet::Event)) {
      std::string args;
      args += is_event(a1->etype) ? 'E' : 'N';
      args += is_event(a2->etype) ? 'E' : 'N';
      fv.set({FeatureSet::Event, "args=" + args}, 1.0);
      const bool any_event = std::any_of(between.begin(), between.end(), [](const EntityMention* m) { return is_event(m->etype); });
      const bool any_nonevent = std::any_of(between.begin(), between.end(), [](const EntityMention* m) { return !is_event(m->etype); });
      if (any_event) fv.set({FeatureSet::Event, "inter_event"}, 1.0);
      if (any_nonevent) fv.set({FeatureSet::Event, "inter_nonevent"}, 1.0);
    }
  }

  if (cfg.has(FeatureSet::Dep) || cfg.has(FeatureSet::Syndist)) {
    const auto path = dependency_path(doc, *a1, *a2);
    if (cfg.has(FeatureSet::Dep) && path && path->length() > 0) {
      fv.set({FeatureSet::Dep, "path=" + path->render()}, 1.0);
      for (auto t : path->tokens()) fv.set({FeatureSet::Dep, "root=" + doc.tokens[t].root}, 1.0);
    }
    if (cfg.has(FeatureSet::Syndist)) {
      fv.set_count({FeatureSet::Syndist, "tokens"}, ctx.between_count());
      if (path) fv.set_count({FeatureSet::Syndist, "deplinks"}, path->length());
    }
  }
  return fv;
}

FeatureIndex::FeatureIndex(std::vector<std::string> sorted_keys) : keys_(std::move(sorted_keys)) {
  columns_.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) columns_.emplace(keys_[i], static_cast<std::uint32_t>(i));
}

std::optional<std::uint32_t> FeatureIndex::column(std::string_view key) const {
  auto it = columns_.find(std::string(key));
  if (it == columns_.end()) return std::nullopt;
  return it->second;
}

SparseVector FeatureIndex::vectorize(const FeatureVector& fv) const {
  std::vector<SparseEntry> entries;
  entries.reserve(fv.size());
  for (const auto& [k, v] : fv) {
    auto it = columns_.find(k);
    if (it != columns_.end()) entries.push_back({it->second, v});
  }
  return make_sparse(std::move(entries));
}

FeatureIndex build_index(const std::vector<FeatureVector>& training) {
  std::set<std::string> keys;
  for (const auto& fv : training)
    for (const auto& [k, _] : fv) keys.insert(k);
  return FeatureIndex(std::vector<std::string>(keys.begin(), keys.end()));
}

}  // namespace clinrel
