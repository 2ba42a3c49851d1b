#pragma once

#include <vector>

namespace pfopt {

/* Legendre polynomial P_k(x) by the three-term recurrence. */
double legendre_p(int k, double x);

/* Gauss-Legendre rule on [-1, 1]: nodes ascending, paired nodes exactly
 * mirrored (t_{n-1-q} == -t_q bitwise), weights positive and symmetric. */
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

}  // namespace pfopt
