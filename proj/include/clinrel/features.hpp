#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clinrel/corpus.hpp"
#include "clinrel/pairing.hpp"
#include "clinrel/sparse.hpp"

namespace clinrel {

enum class FeatureSet {
  TokN,
  GenTokN,
  Atype,
  Dir,
  Str,
  Pos,
  Root,
  GenPos,
  Inter,
  Event,
  Dep,
  Syndist,
};

std::string_view to_string(FeatureSet s);
std::optional<FeatureSet> parse_feature_set(std::string_view s);

/// A feature name: the owning set plus a detail string. Rendered as
/// "set:detail"; single-valued sets (atype, dir) use "set=value", which is
/// stored as a detail beginning with '='.
struct FeatureKey {
  FeatureSet set;
  std::string detail;

  std::string render() const;
};

/// Sparse map from rendered feature keys to values. Zero values are never stored.
class FeatureVector {
 public:
  void set(const FeatureKey& key, double value);
  void set(std::string key, double value);
  /// Stores a count under "key" when positive and as a "key=0" flag otherwise.
  void set_count(const FeatureKey& key, std::size_t count);

  double get(std::string_view key) const;
  bool contains(std::string_view key) const;
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  const std::map<std::string, double, std::less<>>& entries() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  /// Sorted "key<TAB>value" lines.
  std::string to_golden() const;

  bool operator==(const FeatureVector&) const = default;

 private:
  std::map<std::string, double, std::less<>> values_;
};

struct FeatureConfig {
  std::set<FeatureSet> enabled;
  std::size_t window = 6;

  /// Parses names such as "tok6", "tokN", "gentok6", "atype", "allgen",
  /// "notok" (aliases expand in place). A numeric suffix on tok/gentok sets
  /// the window.
  static FeatureConfig from_names(const std::vector<std::string>& names);
  std::vector<std::string> names() const;

  bool has(FeatureSet s) const { return enabled.count(s) > 0; }
  bool operator==(const FeatureConfig&) const = default;
};

const std::vector<FeatureSet>& allgen_sets();
const std::vector<FeatureSet>& notok_sets();

struct DependencyStep {
  std::size_t from = 0;  // token
  std::size_t to = 0;    // token
  std::string label;
  bool upward = false;   // traversed dependent -> head

  bool operator==(const DependencyStep&) const = default;
};

struct DependencyPath {
  std::vector<DependencyStep> steps;

  std::size_t length() const { return steps.size(); }
  std::vector<std::size_t> tokens() const;
  /// Labels with direction marks, e.g. "<nn>vb" ('<' = upward).
  std::string render() const;
};

/// Shortest path between the head tokens of two mentions in the undirected
/// view of the dependency graph. Among shortest paths the lexicographically
/// smallest (label, direction) sequence wins. Absent if not connected.
std::optional<DependencyPath> dependency_path(const Document& doc, const EntityMention& m1,
                                              const EntityMention& m2);
std::optional<DependencyPath> dependency_path(const Document& doc, std::size_t from_token,
                                              std::size_t to_token);

FeatureVector extract(const EntityPair& pair, const Document& doc, const FeatureConfig& cfg);

/// Dense column ids for feature keys, assigned in sorted key order.
class FeatureIndex {
 public:
  FeatureIndex() = default;
  explicit FeatureIndex(std::vector<std::string> sorted_keys);

  std::optional<std::uint32_t> column(std::string_view key) const;
  const std::string& key(std::uint32_t column) const { return keys_[column]; }
  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }

  /// Unseen keys are dropped.
  SparseVector vectorize(const FeatureVector& fv) const;

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t> columns_;
};

FeatureIndex build_index(const std::vector<FeatureVector>& training);

}  // namespace clinrel
