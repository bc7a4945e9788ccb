#pragma once

#include <list>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "clinrel/learners/dataset.hpp"

namespace clinrel::learn {

enum class KernelKind { Linear, Polynomial };

struct KernelSpec {
  KernelKind kind = KernelKind::Polynomial;
  int degree = 2;

  /// Throws std::invalid_argument for a polynomial degree below 1.
  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

std::string to_string(KernelKind k);
KernelKind parse_kernel_kind(const std::string& name);

/// Linear: x.y; polynomial: (x.y + 1)^d.
double kernel_eval(const KernelSpec& k, const SparseVector& x, const SparseVector& y);

/// Least-recently-used cache of kernel matrix columns over a fixed row set.
/// Columns hold unsigned kernel values, so binary problems that share rows
/// but differ in labels can share one cache.
class KernelCache {
 public:
  using Column = std::shared_ptr<const std::vector<double>>;

  KernelCache(std::span<const SparseVector> rows, KernelSpec kernel, double megabytes = 100.0);

  /// K(rows[t], rows[i]) for every t. The returned column stays valid after
  /// eviction for as long as the caller holds it.
  Column column(std::size_t i);
  double diagonal(std::size_t i) const { return diagonal_[i]; }

  std::span<const SparseVector> rows() const { return rows_; }
  const KernelSpec& kernel() const { return kernel_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::span<const SparseVector> rows_;
  KernelSpec kernel_;
  std::size_t capacity_;
  std::vector<double> diagonal_;
  std::list<std::size_t> order_;  // most recent first
  std::unordered_map<std::size_t, std::pair<Column, std::list<std::size_t>::iterator>> columns_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

struct SmoParams {
  double C = 0.7;
  KernelSpec kernel;
  double tolerance = 1e-3;
  double cache_mb = 100.0;
  std::size_t max_iterations = 10'000'000;
};

/// Dual solution of the standard soft-margin SVM:
/// f(x) = sum_i alpha_i y_i K(x_i, x) + b.
struct SmoSolution {
  std::vector<double> alpha;
  double b = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Sequential minimal optimisation with second-order working-set selection.
/// `cache`, when given, must be built over the same rows as `p`.
/// Throws std::invalid_argument unless both classes are present.
SmoSolution smo_train(const BinaryProblem& p, const SmoParams& params, KernelCache* cache = nullptr);

struct KernelSvm {
  KernelSpec kernel;
  std::vector<SparseVector> support;
  std::vector<double> coef;  // alpha_i y_i
  double b = 0.0;

  double decision(const SparseVector& x) const;
};

/// Keeps only instances with nonzero alpha.
KernelSvm make_kernel_svm(const BinaryProblem& p, const SmoSolution& s, const KernelSpec& kernel);

/// s f + (1 - tau) / 2 with s = (1 + tau) / 2. Throws std::invalid_argument
/// unless 0 < tau <= 1.
double uneven_margin(double standard_decision, double tau);
KernelSvm apply_uneven_margin(const KernelSvm& standard, double tau);

/// Explicit weights of a linear-kernel model. Throws for other kernels.
std::vector<double> primal_weights(const KernelSvm& m);

}  // namespace clinrel::learn
