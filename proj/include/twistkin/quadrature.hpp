#pragma once

#include <vector>

namespace twistkin {

// Gauss-Hermite rule: sum_i w_i f(x_i) approximates the integral of
// exp(-x^2) f(x) over the real line. Nodes via the symmetric tridiagonal
// Jacobi matrix (Golub-Welsch).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermite gauss_hermite(int n);

}  // namespace twistkin
