#include "zeno/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zeno {

// Newton iteration on P_n with the three-term recurrence; nodes seeded by the
// Chebyshev-like asymptotic guess.  Symmetric pairs filled from one half.
GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
  GaussLegendre q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

}  // namespace zeno
