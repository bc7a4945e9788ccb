#include "clinrel/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace clinrel {

SparseVector make_sparse(std::vector<SparseEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  SparseVector out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!out.empty() && out.back().index == e.index)
      out.back().value += e.value;
    else
      out.push_back(e);
  }
  std::erase_if(out, [](const SparseEntry& e) { return e.value == 0.0; });
  return out;
}

SparseVector from_dense(const std::vector<double>& dense) {
  SparseVector out;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) out.push_back({static_cast<std::uint32_t>(i), dense[i]});
  return out;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->index < j->index) {
      ++i;
    } else if (j->index < i->index) {
      ++j;
    } else {
      sum += i->value * j->value;
      ++i;
      ++j;
    }
  }
  return sum;
}

double squared_norm(const SparseVector& a) {
  double sum = 0.0;
  for (const auto& e : a) sum += e.value * e.value;
  return sum;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    double d;
    if (j == b.end() || (i != a.end() && i->index < j->index)) {
      d = i->value;
      ++i;
    } else if (i == a.end() || j->index < i->index) {
      d = j->value;
      ++j;
    } else {
      d = i->value - j->value;
      ++i;
      ++j;
    }
    sum += d * d;
  }
  return sum;
}

double dot(const std::vector<double>& dense, const SparseVector& x) {
  double sum = 0.0;
  for (const auto& e : x)
    if (e.index < dense.size()) sum += dense[e.index] * e.value;
  return sum;
}

void add_scaled(std::vector<double>& dense, const SparseVector& x, double scale) {
  for (const auto& e : x) {
    if (e.index >= dense.size()) dense.resize(e.index + 1, 0.0);
    dense[e.index] += scale * e.value;
  }
}

SparseVector normalized(const SparseVector& x) {
  const double n = std::sqrt(squared_norm(x));
  if (n == 0.0) return x;
  SparseVector out = x;
  for (auto& e : out) e.value /= n;
  return out;
}

}  // namespace clinrel
