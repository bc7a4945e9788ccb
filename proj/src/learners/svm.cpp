#include "clinrel/learners/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clinrel::learn {

namespace {

constexpr double kTau = 1e-12;
constexpr double kBoundSnap = 1e-12;  // relative to C

}  // namespace

void KernelSpec::validate() const {
  if (kind == KernelKind::Polynomial && degree < 1) throw std::invalid_argument("polynomial degree must be at least 1");
}

std::string to_string(KernelKind k) { return k == KernelKind::Linear ? "linear" : "polynomial"; }

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "linear") return KernelKind::Linear;
  if (name == "polynomial" || name == "poly") return KernelKind::Polynomial;
  throw std::invalid_argument("unknown kernel: " + name);
}

double kernel_eval(const KernelSpec& k, const SparseVector& x, const SparseVector& y) {
  const double d = dot(x, y);
  if (k.kind == KernelKind::Linear) return d;
  double base = d + 1.0, out = 1.0;
  for (int i = 0; i < k.degree; ++i) out *= base;
  return out;
}

KernelCache::KernelCache(std::span<const SparseVector> rows, KernelSpec kernel, double megabytes)
    : rows_(rows), kernel_(kernel) {
  kernel_.validate();
  const double bytes_per_column = static_cast<double>(std::max<std::size_t>(rows.size(), 1)) * sizeof(double);
  capacity_ = std::max<std::size_t>(2, static_cast<std::size_t>(megabytes * 1024.0 * 1024.0 / bytes_per_column));
  diagonal_.reserve(rows.size());
  for (const auto& r : rows) diagonal_.push_back(kernel_eval(kernel_, r, r));
}

KernelCache::Column KernelCache::column(std::size_t i) {
  auto it = columns_.find(i);
  if (it != columns_.end()) {
    ++hits_;
    order_.splice(order_.begin(), order_, it->second.second);
    return it->second.first;
  }
  ++misses_;
  auto col = std::make_shared<std::vector<double>>(rows_.size());
  for (std::size_t t = 0; t < rows_.size(); ++t) (*col)[t] = t == i ? diagonal_[i] : kernel_eval(kernel_, rows_[t], rows_[i]);
  if (columns_.size() >= capacity_) {
    columns_.erase(order_.back());
    order_.pop_back();
  }
  order_.push_front(i);
  columns_.emplace(i, std::make_pair(col, order_.begin()));
  return col;
}

SmoSolution smo_train(const BinaryProblem& p, const SmoParams& params, KernelCache* cache) {
  const std::size_t m = p.size();
  if (p.y.size() != m) throw std::invalid_argument("rows and labels differ in length");
  if (params.C <= 0.0) throw std::invalid_argument("C must be positive");
  const std::size_t pos = p.positives();
  if (pos == 0 || pos == m) throw std::invalid_argument("SMO needs both classes present");

  std::unique_ptr<KernelCache> own;
  if (cache == nullptr) {
    own = std::make_unique<KernelCache>(p.rows, params.kernel, params.cache_mb);
    cache = own.get();
  } else if (cache->rows().data() != p.rows.data() || cache->rows().size() != m || !(cache->kernel() == params.kernel)) {
    throw std::invalid_argument("kernel cache does not match the problem");
  }

  const double C = params.C;
  std::vector<double> y(m), alpha(m, 0.0), G(m, -1.0);
  for (std::size_t t = 0; t < m; ++t) y[t] = p.y[t] > 0 ? 1.0 : -1.0;
  auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  SmoSolution s;
  while (s.iterations < params.max_iterations) {
    // Maximal violating i, then j by second-order gain.
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = m;
    for (std::size_t t = 0; t < m; ++t) {
      if (y[t] > 0 ? !upper(t) : !lower(t)) {
        const double v = -y[t] * G[t];
        if (v > gmax) {
          gmax = v;
          i = t;
        }
      }
    }
    if (i == m) {
      s.converged = true;
      break;
    }
    const auto Ki = cache->column(i);
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = m;
    for (std::size_t t = 0; t < m; ++t) {
      if (y[t] > 0 ? lower(t) : upper(t)) continue;
      const double v = y[t] * G[t];
      gmax2 = std::max(gmax2, v);
      const double grad_diff = gmax + v;
      if (grad_diff > 0.0) {
        double quad = cache->diagonal(i) + cache->diagonal(t) - 2.0 * (*Ki)[t];
        if (quad <= 0.0) quad = kTau;
        const double obj = -(grad_diff * grad_diff) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (gmax + gmax2 < params.tolerance || j == m) {
      s.converged = true;
      break;
    }
    ++s.iterations;

    const auto Kj = cache->column(j);
    const double old_ai = alpha[i], old_aj = alpha[j];
    double quad = cache->diagonal(i) + cache->diagonal(j) - 2.0 * (*Ki)[j];
    if (quad <= 0.0) quad = kTau;
    double& ai = alpha[i];
    double& aj = alpha[j];
    if (y[i] != y[j]) {
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      const double delta = (G[i] - G[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    // Rounding in the clipping arithmetic (e.g. C - diff) can leave an alpha a
    // few ulps off a bound, which would wrongly count it as free for the bias.
    auto snap = [&](double& a) {
      if (a <= C * kBoundSnap) a = 0.0;
      else if (a >= C * (1.0 - kBoundSnap)) a = C;
    };
    snap(ai);
    snap(aj);
    const double dai = ai - old_ai, daj = aj - old_aj;
    for (std::size_t t = 0; t < m; ++t) G[t] += y[t] * (y[i] * (*Ki)[t] * dai + y[j] * (*Kj)[t] * daj);
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const double yg = y[t] * G[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  s.alpha = std::move(alpha);
  s.b = -rho;
  return s;
}

double KernelSvm::decision(const SparseVector& x) const {
  double f = b;
  for (std::size_t i = 0; i < support.size(); ++i) f += coef[i] * kernel_eval(kernel, support[i], x);
  return f;
}

KernelSvm make_kernel_svm(const BinaryProblem& p, const SmoSolution& s, const KernelSpec& kernel) {
  KernelSvm m;
  m.kernel = kernel;
  m.b = s.b;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (s.alpha[i] <= 0.0) continue;
    m.support.push_back(p.rows[i]);
    m.coef.push_back(s.alpha[i] * (p.y[i] > 0 ? 1.0 : -1.0));
  }
  return m;
}

double uneven_margin(double standard_decision, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  return (1.0 + tau) / 2.0 * standard_decision + (1.0 - tau) / 2.0;
}

KernelSvm apply_uneven_margin(const KernelSvm& standard, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  KernelSvm out = standard;
  const double s = (1.0 + tau) / 2.0;
  for (auto& c : out.coef) c *= s;
  out.b = s * standard.b + (1.0 - tau) / 2.0;
  return out;
}

std::vector<double> primal_weights(const KernelSvm& m) {
  if (m.kernel.kind != KernelKind::Linear) throw std::invalid_argument("primal weights need a linear kernel");
  std::vector<double> w;
  for (std::size_t i = 0; i < m.support.size(); ++i) {
    if (!m.support[i].empty()) w.resize(std::max<std::size_t>(w.size(), m.support[i].back().index + 1), 0.0);
    add_scaled(w, m.support[i], m.coef[i]);
  }
  return w;
}

}  // namespace clinrel::learn
