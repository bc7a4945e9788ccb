#include "clinrel/learners/c45.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace clinrel::learn {

namespace {

constexpr double kEpsilon = 1e-12;

struct ValueGroup {
  double value;
  std::vector<double> counts;
  double total = 0.0;
};

// Distinct values in ascending order with their class counts.
std::vector<ValueGroup> group_by_value(const std::vector<std::pair<double, int>>& pairs, std::size_t n_classes) {
  std::vector<std::pair<double, int>> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  std::vector<ValueGroup> groups;
  for (const auto& [v, c] : sorted) {
    if (groups.empty() || groups.back().value != v) groups.push_back({v, std::vector<double>(n_classes, 0.0)});
    groups.back().counts[static_cast<std::size_t>(c)] += 1.0;
    groups.back().total += 1.0;
  }
  return groups;
}

std::optional<ThresholdSplit> best_cut(const std::vector<ValueGroup>& groups, std::size_t n_classes,
                                       std::size_t min_cases) {
  const double min_side = static_cast<double>(std::max<std::size_t>(min_cases, 1));
  std::vector<double> total(n_classes, 0.0);
  for (const auto& g : groups)
    for (std::size_t c = 0; c < n_classes; ++c) total[c] += g.counts[c];
  const double n = std::accumulate(total.begin(), total.end(), 0.0);

  std::optional<ThresholdSplit> best;
  std::vector<double> left(n_classes, 0.0);
  double left_n = 0.0;
  for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
    for (std::size_t c = 0; c < n_classes; ++c) left[c] += groups[g].counts[c];
    left_n += groups[g].total;
    if (left_n < min_side || n - left_n < min_side) continue;
    std::vector<double> right(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) right[c] = total[c] - left[c];
    auto stats = split_stats({left, right});
    if (!best || stats.gain > best->stats.gain + kEpsilon)
      best = ThresholdSplit{(groups[g].value + groups[g + 1].value) / 2.0, stats};
  }
  return best;
}

double value_of(const SparseVector& x, std::uint32_t attribute) {
  auto it = std::lower_bound(x.begin(), x.end(), attribute,
                             [](const SparseEntry& e, std::uint32_t a) { return e.index < a; });
  return (it != x.end() && it->index == attribute) ? it->value : 0.0;
}

int majority(const std::vector<double>& counts) {
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  return best;
}

class Builder {
 public:
  Builder(const TrainingSet& t, const C45Params& p) : t_(t), p_(p), n_classes_(t.classes.size()) {
    // Global value domain of each discrete attribute (0 = absent included).
    for (auto a : p_.discrete_attributes) domain_[a].insert(0.0);
    for (const auto& row : t_.rows)
      for (const auto& e : row)
        if (p_.discrete_attributes.count(e.index) > 0) domain_[e.index].insert(e.value);
  }

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(t_.size());
    std::iota(all.begin(), all.end(), 0);
    form(all);
    if (p_.prune) prune(0);
    return compact();
  }

 private:
  struct Candidate {
    std::uint32_t attribute;
    bool continuous;
    double threshold;
    SplitStats stats;
  };

  std::size_t new_node(std::vector<double> counts) {
    TreeNode n;
    n.cases = std::accumulate(counts.begin(), counts.end(), 0.0);
    n.label = majority(counts);
    n.class_counts = std::move(counts);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::size_t form(const std::vector<std::size_t>& cases) {
    std::vector<double> counts(n_classes_, 0.0);
    for (auto i : cases) counts[static_cast<std::size_t>(t_.labels[i])] += 1.0;
    const std::size_t id = new_node(counts);

    const auto classes_present = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; });
    const auto min_cases = std::max<std::size_t>(p_.min_cases, 1);
    if (classes_present <= 1 || cases.size() < 2 * min_cases) return id;

    auto chosen = choose_split(cases, counts);
    if (!chosen) return id;

    // Partition, then recurse; node references are re-fetched after recursion.
    std::vector<std::vector<std::size_t>> parts;
    std::vector<double> branch_values;
    if (chosen->continuous) {
      parts.resize(2);
      for (auto i : cases) parts[value_of(t_.rows[i], chosen->attribute) <= chosen->threshold ? 0 : 1].push_back(i);
    } else {
      const auto& dom = domain_.at(chosen->attribute);
      branch_values.assign(dom.begin(), dom.end());
      parts.resize(branch_values.size());
      for (auto i : cases) {
        const double v = value_of(t_.rows[i], chosen->attribute);
        auto it = std::lower_bound(branch_values.begin(), branch_values.end(), v);
        parts[static_cast<std::size_t>(it - branch_values.begin())].push_back(i);
      }
    }

    std::vector<std::size_t> children;
    for (const auto& part : parts) {
      if (part.empty()) {
        const std::size_t leaf = new_node(counts);
        nodes_[leaf].cases = 0.0;
        children.push_back(leaf);
      } else {
        children.push_back(form(part));
      }
    }
    auto& node = nodes_[id];
    node.leaf = false;
    node.attribute = chosen->attribute;
    node.continuous = chosen->continuous;
    node.threshold = chosen->threshold;
    node.branch_values = std::move(branch_values);
    node.children = std::move(children);
    return id;
  }

  std::optional<Candidate> choose_split(const std::vector<std::size_t>& cases, const std::vector<double>& counts) {
    std::unordered_map<std::uint32_t, std::vector<std::pair<double, int>>> buckets;
    for (auto i : cases)
      for (const auto& e : t_.rows[i]) buckets[e.index].emplace_back(e.value, t_.labels[i]);
    for (const auto& [a, _] : domain_) buckets.try_emplace(a);

    std::vector<std::uint32_t> attributes;
    attributes.reserve(buckets.size());
    for (const auto& [a, _] : buckets) attributes.push_back(a);
    std::sort(attributes.begin(), attributes.end());

    const auto min_cases = std::max<std::size_t>(p_.min_cases, 1);
    std::vector<Candidate> candidates;
    for (auto a : attributes) {
      auto& pairs = buckets[a];
      // Cases without the attribute hold the value 0.
      std::vector<double> zero_counts = counts;
      for (const auto& [v, c] : pairs) zero_counts[static_cast<std::size_t>(c)] -= 1.0;
      auto groups = group_by_value(pairs, n_classes_);
      const double zeros = std::accumulate(zero_counts.begin(), zero_counts.end(), 0.0);
      if (zeros > 0.0) {
        ValueGroup z{0.0, zero_counts, zeros};
        auto it = std::lower_bound(groups.begin(), groups.end(), 0.0,
                                   [](const ValueGroup& g, double v) { return g.value < v; });
        if (it != groups.end() && it->value == 0.0) {
          for (std::size_t c = 0; c < n_classes_; ++c) it->counts[c] += zero_counts[c];
          it->total += zeros;
        } else {
          groups.insert(it, std::move(z));
        }
      }
      if (groups.size() < 2) continue;

      if (p_.discrete_attributes.count(a) > 0) {
        std::vector<std::vector<double>> branches;
        std::size_t big = 0;
        for (const auto& g : groups) {
          branches.push_back(g.counts);
          if (g.total >= static_cast<double>(min_cases)) ++big;
        }
        if (big < 2) continue;
        auto stats = split_stats(branches);
        if (stats.ratio) candidates.push_back({a, false, 0.0, stats});
      } else {
        auto cut = best_cut(groups, n_classes_, min_cases);
        if (cut && cut->stats.ratio) candidates.push_back({a, true, cut->threshold, cut->stats});
      }
    }
    if (candidates.empty()) return std::nullopt;

    double gain_sum = 0.0;
    std::size_t positive = 0;
    for (const auto& c : candidates) {
      if (c.stats.gain > kEpsilon) {
        gain_sum += c.stats.gain;
        ++positive;
      }
    }
    const double mean_gain = positive > 0 ? gain_sum / static_cast<double>(positive) : 0.0;
    const Candidate* best = nullptr;
    for (const auto& c : candidates) {
      if (c.stats.gain < mean_gain - kEpsilon) continue;
      if (best == nullptr || *c.stats.ratio > *best->stats.ratio + kEpsilon) best = &c;
    }
    if (best == nullptr) return std::nullopt;
    return *best;
  }

  double leaf_estimate(const TreeNode& n) const {
    if (n.cases <= 0.0) return 0.0;
    const double errors = n.cases - n.class_counts[static_cast<std::size_t>(n.label)];
    return errors + pessimistic_extra_errors(n.cases, errors, p_.confidence);
  }

  // Returns the estimated errors of the (possibly collapsed) subtree.
  double prune(std::size_t id) {
    if (nodes_[id].leaf) return leaf_estimate(nodes_[id]);
    double subtree = 0.0;
    const auto children = nodes_[id].children;
    for (auto c : children) subtree += prune(c);
    const double as_leaf = leaf_estimate(nodes_[id]);
    if (as_leaf <= subtree + 0.1) {
      auto& n = nodes_[id];
      n.leaf = true;
      n.children.clear();
      n.branch_values.clear();
      return as_leaf;
    }
    return subtree;
  }

  std::vector<TreeNode> compact() const {
    std::vector<TreeNode> out;
    std::function<std::size_t(std::size_t)> copy = [&](std::size_t id) {
      const std::size_t slot = out.size();
      out.push_back(nodes_[id]);
      std::vector<std::size_t> kids;
      for (auto c : nodes_[id].children) kids.push_back(copy(c));
      out[slot].children = std::move(kids);
      return slot;
    };
    copy(0);
    return out;
  }

  const TrainingSet& t_;
  const C45Params& p_;
  std::size_t n_classes_;
  std::map<std::uint32_t, std::set<double>> domain_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

double info(const std::vector<double>& class_counts) {
  const double n = std::accumulate(class_counts.begin(), class_counts.end(), 0.0);
  if (n <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : class_counts) {
    if (c <= 0.0) continue;
    const double p = c / n;
    h -= p * std::log2(p);
  }
  return h;
}

SplitStats split_stats(const std::vector<std::vector<double>>& branch_class_counts) {
  if (branch_class_counts.empty()) return {};
  const std::size_t n_classes = branch_class_counts.front().size();
  std::vector<double> total(n_classes, 0.0);
  std::vector<double> sizes;
  for (const auto& b : branch_class_counts) {
    for (std::size_t c = 0; c < n_classes; ++c) total[c] += b[c];
    sizes.push_back(std::accumulate(b.begin(), b.end(), 0.0));
  }
  const double n = std::accumulate(total.begin(), total.end(), 0.0);
  SplitStats s;
  if (n <= 0.0) return s;
  double remainder = 0.0;
  for (std::size_t i = 0; i < branch_class_counts.size(); ++i) {
    if (sizes[i] <= 0.0) continue;
    remainder += sizes[i] / n * info(branch_class_counts[i]);
  }
  s.gain = std::max(0.0, info(total) - remainder);
  s.split_info = info(sizes);
  if (s.split_info > kEpsilon) s.ratio = s.gain / s.split_info;
  return s;
}

SplitStats c45_gain_ratio(const std::vector<int>& labels, std::size_t n_classes, const std::vector<double>& values) {
  std::map<double, std::vector<double>> branches;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& b = branches[values[i]];
    if (b.empty()) b.assign(n_classes, 0.0);
    b[static_cast<std::size_t>(labels[i])] += 1.0;
  }
  std::vector<std::vector<double>> counts;
  for (auto& [_, b] : branches) counts.push_back(std::move(b));
  return split_stats(counts);
}

std::optional<ThresholdSplit> c45_best_threshold(const std::vector<int>& labels, std::size_t n_classes,
                                                 const std::vector<double>& values, std::size_t min_cases) {
  std::vector<std::pair<double, int>> pairs;
  for (std::size_t i = 0; i < labels.size(); ++i) pairs.emplace_back(values[i], labels[i]);
  auto cut = best_cut(group_by_value(pairs, n_classes), n_classes, min_cases);
  return cut;
}

double pessimistic_extra_errors(double cases, double errors, double confidence) {
  // Normal deviates for one-sided confidence levels, interpolated linearly.
  static const double kVal[] = {0, 0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.40, 1.00};
  static const double kDev[] = {4.0, 3.09, 2.58, 2.33, 1.65, 1.28, 0.84, 0.25, 0.00};
  std::size_t i = 0;
  while (kVal[i] < confidence) ++i;
  double z = kDev[i];
  if (i > 0) z = kDev[i - 1] + (kDev[i] - kDev[i - 1]) * (confidence - kVal[i - 1]) / (kVal[i] - kVal[i - 1]);
  const double coeff = z * z;

  if (errors < 1e-6) return cases * (1.0 - std::exp(std::log(confidence) / cases));
  if (errors < 0.9999) {
    const double v0 = cases * (1.0 - std::exp(std::log(confidence) / cases));
    return v0 + errors * (pessimistic_extra_errors(cases, 1.0, confidence) - v0);
  }
  if (errors + 0.5 >= cases) return 0.67 * (cases - errors);
  const double e = errors + 0.5;
  const double pr = (e + coeff / 2.0 + std::sqrt(coeff * (e * (1.0 - e / cases) + coeff / 4.0))) / (cases + coeff);
  return cases * pr - errors;
}

const TreeNode& DecisionTree::leaf_for(const SparseVector& x) const {
  std::size_t id = 0;
  while (!nodes_[id].leaf) {
    const auto& n = nodes_[id];
    const double v = value_of(x, n.attribute);
    if (n.continuous) {
      id = n.children[v <= n.threshold ? 0 : 1];
    } else {
      auto it = std::find(n.branch_values.begin(), n.branch_values.end(), v);
      if (it != n.branch_values.end()) {
        id = n.children[static_cast<std::size_t>(it - n.branch_values.begin())];
      } else {
        // Unseen category: follow the most populated branch.
        std::size_t best = 0;
        for (std::size_t c = 1; c < n.children.size(); ++c)
          if (nodes_[n.children[c]].cases > nodes_[n.children[best]].cases) best = c;
        id = n.children[best];
      }
    }
  }
  return nodes_[id];
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.leaf; }));
}

std::size_t DecisionTree::depth() const {
  std::function<std::size_t(std::size_t)> d = [&](std::size_t id) -> std::size_t {
    std::size_t best = 0;
    for (auto c : nodes_[id].children) best = std::max(best, d(c));
    return nodes_[id].leaf ? 0 : best + 1;
  };
  return nodes_.empty() ? 0 : d(0);
}

std::string DecisionTree::describe() const {
  std::ostringstream out;
  out.precision(17);
  std::function<void(std::size_t, int)> rec = [&](std::size_t id, int indent) {
    const auto& n = nodes_[id];
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (n.leaf) {
      out << pad << "leaf " << classes_[static_cast<std::size_t>(n.label)] << " (" << n.cases << ")\n";
      return;
    }
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      out << pad << "a" << n.attribute;
      if (n.continuous)
        out << (c == 0 ? " <= " : " > ") << n.threshold << "\n";
      else
        out << " = " << n.branch_values[c] << "\n";
      rec(n.children[c], indent + 1);
    }
  };
  if (!nodes_.empty()) rec(0, 0);
  return out.str();
}

DecisionTree c45_build(const TrainingSet& t, const C45Params& params) {
  if (t.size() == 0) throw EmptyTrainingSet("C4.5 needs at least one training case");
  Builder b(t, params);
  return DecisionTree(b.build(), t.classes);
}

}  // namespace clinrel::learn
