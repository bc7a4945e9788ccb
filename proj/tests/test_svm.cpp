#include <doctest.h>

#include <cmath>

#include "clinrel/learners/svm.hpp"
#include "support/oracles.hpp"

using namespace clinrel;
using namespace clinrel::learn;

namespace {

SparseVector sv(std::initializer_list<double> dense) { return from_dense(std::vector<double>(dense)); }

KernelSpec linear() { return {KernelKind::Linear, 1}; }

}  // namespace

TEST_CASE("kernel values") {
  KernelSpec poly{KernelKind::Polynomial, 2};
  CHECK(kernel_eval(poly, sv({1, 1}), sv({1, 1})) == 9.0);
  CHECK(kernel_eval(poly, sv({0, 0}), sv({3, 4})) == 1.0);
  CHECK(kernel_eval(linear(), sv({1, 0}), sv({0, 1})) == 0.0);
  CHECK(kernel_eval(KernelSpec{KernelKind::Polynomial, 3}, sv({1}), sv({2})) == 27.0);
  CHECK_THROWS_AS((KernelSpec{KernelKind::Polynomial, 0}.validate()), std::invalid_argument);
}

TEST_CASE("two-point hard margin solution") {
  std::vector<SparseVector> rows = {sv({1, 1}), sv({-1, -1})};
  BinaryProblem p{rows, {1, -1}};
  SmoParams params;
  params.C = 10;
  params.kernel = linear();
  auto s = smo_train(p, params);
  auto m = make_kernel_svm(p, s, params.kernel);
  auto w = primal_weights(m);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.5));
  CHECK(m.b == doctest::Approx(0.0));
  CHECK(m.decision(rows[0]) == doctest::Approx(1.0));
  CHECK(m.decision(rows[1]) == doctest::Approx(-1.0));
}

TEST_CASE("uneven margin transform") {
  KernelSvm standard;
  standard.kernel = linear();
  standard.support = {sv({1, 1}), sv({-1, -1})};
  standard.coef = {0.25, -0.25};
  standard.b = 0.0;
  auto um = apply_uneven_margin(standard, 0.8);
  auto w = primal_weights(um);
  CHECK(w[0] == doctest::Approx(0.45));
  CHECK(w[1] == doctest::Approx(0.45));
  CHECK(um.b == doctest::Approx(0.1));
  CHECK(um.decision(sv({1, 1})) >= 1.0 - 1e-12);
  CHECK(um.decision(sv({-1, -1})) <= -0.8 + 1e-12);

  auto same = apply_uneven_margin(standard, 1.0);
  CHECK(same.coef == standard.coef);
  CHECK(same.b == standard.b);
  CHECK(uneven_margin(0.37, 1.0) == 0.37);
  CHECK_THROWS_AS(uneven_margin(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_uneven_margin(standard, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(uneven_margin(0.0, 1.5), std::invalid_argument);
}

TEST_CASE("positive region grows as tau decreases") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const double f = 4 * rng.uniform() - 2;
    bool was_positive = false;
    for (double tau : {1.0, 0.8, 0.6, 0.4, 0.2}) {
      const bool positive = uneven_margin(f, tau) > 0;
      if (was_positive) CHECK(positive);
      was_positive = positive;
    }
  }
}

TEST_CASE("duplicated contradictory points saturate at C") {
  std::vector<SparseVector> rows = {sv({1, 2}), sv({1, 2})};
  BinaryProblem p{rows, {1, -1}};
  SmoParams params;
  params.C = 1;
  params.kernel = linear();
  auto s = smo_train(p, params);
  CHECK(s.alpha[0] == doctest::Approx(1.0));
  CHECK(s.alpha[1] == doctest::Approx(1.0));
  CHECK(make_kernel_svm(p, s, params.kernel).decision(rows[0]) == doctest::Approx(0.0));
}

TEST_CASE("SMO rejects single-class input") {
  std::vector<SparseVector> rows = {sv({1}), sv({2})};
  BinaryProblem p{rows, {1, 1}};
  CHECK_THROWS_AS(smo_train(p, {}), std::invalid_argument);
}

TEST_CASE("SMO matches the dual coordinate ascent oracle and keeps the dual constraints") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + rng.index(19), dim = 1 + rng.index(5);
    const bool poly = trial % 2 == 1;
    std::vector<SparseVector> rows;
    std::vector<oracle::Dense> dense;
    std::vector<int> y;
    for (std::size_t i = 0; i < m; ++i) {
      rows.push_back(oracle::random_sparse(rng, dim, 0.8));
      dense.push_back(oracle::densify(rows.back(), dim));
      y.push_back(i == 0 ? 1 : i == 1 ? -1 : (rng.bernoulli(0.5) ? 1 : -1));
    }
    SmoParams params;
    params.C = 0.1 + 5 * rng.uniform();
    params.kernel = poly ? KernelSpec{KernelKind::Polynomial, 2} : linear();
    params.tolerance = 1e-10;
    BinaryProblem p{rows, y};
    auto s = smo_train(p, params);
    REQUIRE(s.converged);
    double balance = 0;
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(s.alpha[i] >= 0.0);
      CHECK(s.alpha[i] <= params.C);
      balance += s.alpha[i] * y[i];
    }
    CHECK(std::abs(balance) <= 1e-9);
    auto ref = oracle::dual_ascent(dense, y, params.C, poly, 2, 1e-8);
    auto model = make_kernel_svm(p, s, params.kernel);
    for (std::size_t i = 0; i < m; ++i)
      CHECK(std::abs(model.decision(rows[i]) - oracle::dual_decision(ref, dense, y, poly, 2, dense[i])) <= 1e-4);
  }
}

TEST_CASE("a tiny kernel cache evicts but gives the same answer") {
  Rng rng(23);
  std::vector<SparseVector> rows;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    rows.push_back(oracle::random_sparse(rng, 6, 0.7));
    y.push_back(rng.bernoulli(0.4) ? 1 : -1);
  }
  BinaryProblem p{rows, y};
  SmoParams params;
  auto big = smo_train(p, params);
  KernelCache small(rows, params.kernel, 1e-9);
  CHECK(small.capacity() == 2);
  auto tiny = smo_train(p, params, &small);
  CHECK(small.misses() > 2);
  REQUIRE(tiny.alpha.size() == big.alpha.size());
  for (std::size_t i = 0; i < big.alpha.size(); ++i) CHECK(tiny.alpha[i] == big.alpha[i]);
  CHECK(tiny.b == big.b);

  KernelCache other(rows, KernelSpec{KernelKind::Linear, 1});
  CHECK_THROWS_AS(smo_train(p, params, &other), std::invalid_argument);
}

TEST_CASE("a shared cache serves several labelings of the same rows") {
  Rng rng(29);
  std::vector<SparseVector> rows;
  for (int i = 0; i < 40; ++i) rows.push_back(oracle::random_sparse(rng, 5, 0.6));
  SmoParams params;
  KernelCache cache(rows, params.kernel, params.cache_mb);
  for (int c = 0; c < 3; ++c) {
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) y.push_back(i % 3 == c ? 1 : -1);
    BinaryProblem p{rows, y};
    auto shared = smo_train(p, params, &cache);
    auto alone = smo_train(p, params);
    CHECK(shared.alpha == alone.alpha);
    CHECK(shared.b == alone.b);
  }
  CHECK(cache.hits() > 0);
}

TEST_CASE("alphas are never left a rounding error away from a bound") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 2 + rng.index(19), dim = 1 + rng.index(5);
    std::vector<SparseVector> rows;
    std::vector<int> y;
    for (std::size_t i = 0; i < m; ++i) {
      rows.push_back(oracle::random_sparse(rng, dim, 0.8));
      y.push_back(i == 0 ? 1 : i == 1 ? -1 : (rng.bernoulli(0.5) ? 1 : -1));
    }
    SmoParams params;
    params.C = 0.1 + 5 * rng.uniform();
    params.kernel = trial % 2 ? KernelSpec{KernelKind::Polynomial, 2} : linear();
    params.tolerance = 1e-10;
    BinaryProblem p{rows, y};
    auto s = smo_train(p, params);
    for (double a : s.alpha) {
      CHECK((a == 0.0 || a > params.C * 1e-12));
      CHECK((a == params.C || a < params.C * (1 - 1e-12)));
    }
  }
}

TEST_CASE("with every alpha at a bound the bias is the midpoint of the feasible interval") {
  // Overlapping 1-D classes with a small C put every multiplier at 0 or C.
  std::vector<SparseVector> rows = {sv({0.1}), sv({0.0}), sv({-0.2}), sv({-0.5}), sv({0.9}), sv({0.03}), sv({-0.3})};
  std::vector<int> y = {1, -1, 1, -1, -1, 1, 1};
  BinaryProblem p{rows, y};
  SmoParams params;
  params.C = 0.05;
  params.kernel = linear();
  params.tolerance = 1e-12;
  auto s = smo_train(p, params);
  auto model = make_kernel_svm(p, s, params.kernel);
  double lo = -1e300, hi = 1e300;
  bool any_free = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double g = model.decision(rows[i]) - model.b;
    const bool at_c = s.alpha[i] == params.C, at_0 = s.alpha[i] == 0.0;
    any_free |= !at_c && !at_0;
    // y f >= 1 when alpha = 0, y f <= 1 when alpha = C.
    if ((at_0 && y[i] > 0) || (at_c && y[i] < 0)) lo = std::max(lo, y[i] - g);
    if ((at_0 && y[i] < 0) || (at_c && y[i] > 0)) hi = std::min(hi, y[i] - g);
  }
  REQUIRE_FALSE(any_free);
  CHECK(model.b == doctest::Approx((lo + hi) / 2).epsilon(1e-12));
}
