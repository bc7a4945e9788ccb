#pragma once

#include <vector>

#include "clinrel/learners/dataset.hpp"

namespace clinrel::learn {

struct PaumParams {
  double tau_pos = 20.0;
  double tau_neg = 5.0;
  double eta = 1.0;
  double opt_b = 0.0;  // constant added to the learned bias
  std::size_t max_epochs = 100;
};

struct LinearModel {
  std::vector<double> w;  // dense over feature columns
  double b = 0.0;
  bool converged = false;
  std::size_t epochs = 0;
  std::size_t updates = 0;

  double decision(const SparseVector& x) const { return dot(w, x) + b; }
};

/// Perceptron with uneven margins: an instance triggers an update while
/// y (w.x + b) <= tau_y. Stops after an epoch without updates or at
/// max_epochs, in which case `converged` is false.
LinearModel paum_train(const BinaryProblem& p, const PaumParams& params = {});

}  // namespace clinrel::learn
