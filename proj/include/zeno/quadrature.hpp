#pragma once

#include <vector>

namespace zeno {

// Gauss–Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

}  // namespace zeno
