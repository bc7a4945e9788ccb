#include "clinrel/learners/paum.hpp"

#include <algorithm>

namespace clinrel::learn {

LinearModel paum_train(const BinaryProblem& p, const PaumParams& params) {
  if (p.rows.size() != p.y.size()) throw std::invalid_argument("rows and labels differ in length");
  std::size_t dim = 0;
  double r2 = 0.0;
  for (const auto& row : p.rows) {
    if (!row.empty()) dim = std::max<std::size_t>(dim, row.back().index + 1);
    r2 = std::max(r2, squared_norm(row));
  }

  LinearModel m;
  m.w.assign(dim, 0.0);
  while (m.epochs < params.max_epochs) {
    ++m.epochs;
    bool updated = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double y = p.y[i] > 0 ? 1.0 : -1.0;
      const double tau = y > 0 ? params.tau_pos : params.tau_neg;
      if (y * m.decision(p.rows[i]) <= tau) {
        add_scaled(m.w, p.rows[i], params.eta * y);
        m.b += params.eta * y * r2;
        ++m.updates;
        updated = true;
      }
    }
    if (!updated) {
      m.converged = true;
      break;
    }
  }
  m.b += params.opt_b;
  return m;
}

}  // namespace clinrel::learn
