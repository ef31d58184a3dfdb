#pragma once

#include <Eigen/Core>
#include <cmath>

namespace cdmkit::internal {

// Parlett-Reinsch balancing by powers of two; reduces the eigenvalue
// sensitivity of companion matrices whose coefficients span many decades.
inline void balance(Eigen::MatrixXd& m) {
  constexpr double radix = 2.0;
  const Eigen::Index n = m.rows();
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double col = m.col(i).cwiseAbs().sum() - std::abs(m(i, i));
      const double row = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
      if (col == 0.0 || row == 0.0) continue;
      double g = row / radix;
      double f = 1.0;
      double c = col;
      const double s = col + row;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = row * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + row) / f < 0.95 * s) {
        converged = false;
        m.row(i) /= f;
        m.col(i) *= f;
      }
    }
  }
}

}  // namespace cdmkit::internal
