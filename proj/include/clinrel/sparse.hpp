#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace clinrel {

struct SparseEntry {
  std::uint32_t index;
  double value;

  bool operator==(const SparseEntry&) const = default;
};

/// Entries sorted by strictly increasing index; zero values are not stored.
using SparseVector = std::vector<SparseEntry>;

/// Sorts by index, sums duplicate indices and drops zeros.
SparseVector make_sparse(std::vector<SparseEntry> entries);
SparseVector from_dense(const std::vector<double>& dense);

double dot(const SparseVector& a, const SparseVector& b);
double squared_norm(const SparseVector& a);
double squared_distance(const SparseVector& a, const SparseVector& b);
/// Dense weights against sparse input; indices past the end contribute 0.
double dot(const std::vector<double>& dense, const SparseVector& x);
void add_scaled(std::vector<double>& dense, const SparseVector& x, double scale);
/// Unit L2 norm (zero vector unchanged).
SparseVector normalized(const SparseVector& x);

}  // namespace clinrel
