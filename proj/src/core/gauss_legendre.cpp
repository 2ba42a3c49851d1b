#include "gauss_legendre.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace pfopt {

double legendre_p(int k, double x) {
  if (k < 0) throw InvalidInput("negative Legendre degree");
  double pm1 = 1.0;  // P_0
  if (k == 0) return pm1;
  double p = x;  // P_1
  for (int m = 2; m <= k; ++m) {
    const double pm2 = pm1;
    pm1 = p;
    p = ((2 * m - 1) * x * pm1 - (m - 1) * pm2) / m;
  }
  return p;
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("rule size must be >= 1");

  GaussLegendre rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  /* Newton's method on P_n from the Chebyshev-like initial guess; only the
   * positive half is computed, the other half is mirrored so symmetric node
   * pairs are exact negatives. */
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double pm1 = 1.0, p = x;
      for (int m = 2; m <= n; ++m) {
        const double pm2 = pm1;
        pm1 = p;
        p = ((2 * m - 1) * x * pm1 - (m - 1) * pm2) / m;
      }
      dp = n * (x * p - pm1) / (x * x - 1.0);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    /* one more recurrence pass at the converged node for the weight */
    double pm1 = 1.0, p = x;
    for (int m = 2; m <= n; ++m) {
      const double pm2 = pm1;
      pm1 = p;
      p = ((2 * m - 1) * x * pm1 - (m - 1) * pm2) / m;
    }
    dp = n * (x * p - pm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);

    /* i counts from the largest root downward */
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace pfopt
