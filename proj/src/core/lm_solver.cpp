#include "lm_solver.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace pfopt {

namespace {

/* Accept a solution when it is finite and actually satisfies the system. */
bool solution_ok(const Eigen::MatrixXd& m, const Eigen::VectorXd& delta,
                 const Eigen::VectorXd& rhs) {
  if (!delta.allFinite()) return false;
  const double scale = std::max(rhs.norm(), 1e-300);
  return (m * delta - rhs).norm() <= 1e-8 * std::max(1.0, scale);
}

}  // namespace

double clamp_lambda(double lambda) {
  return std::clamp(lambda, kLambdaMin, kLambdaMax);
}

double adapt_lambda(double h_prev, double h_new, double lambda,
                    const LMSettings& settings) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidInput("lambda must be positive and finite");
  return clamp_lambda(h_new < h_prev ? lambda / settings.adapt_down
                                     : lambda * settings.adapt_up);
}

Eigen::VectorXd project_nonnegative(Eigen::VectorXd v,
                                    std::span<const int> indices) {
  for (int i : indices) {
    if (i < 0 || i >= v.size()) throw InvalidInput("constraint index out of range");
    v[i] = std::max(0.0, v[i]);
  }
  return v;
}

ParamVector project_constraints(const ParamVector& alpha) {
  ParamVector out = alpha;
  for (int i : constrained_indices()) out[i] = std::max(0.0, out[i]);
  return out;
}

Eigen::VectorXd lm_step(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& J,
                        const Eigen::VectorXd& f, double lambda,
                        const LMSettings& settings,
                        std::span<const int> constrained) {
  const Eigen::Index n = alpha.size();
  if (J.cols() != n || J.rows() != f.size())
    throw InvalidInput("lm_step: shape mismatch");
  if (!alpha.allFinite() || !J.allFinite() || !f.allFinite())
    throw InvalidInput("lm_step: non-finite input");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidInput("lm_step: bad lambda");

  const Eigen::MatrixXd a = J.transpose() * J;
  const Eigen::VectorXd rhs = -J.transpose() * f;
  const Eigen::VectorXd d = a.diagonal().cwiseMax(settings.diag_floor);

  Eigen::MatrixXd m = a;
  m.diagonal() += lambda * d;

  Eigen::VectorXd delta = m.ldlt().solve(rhs);
  if (!solution_ok(m, delta, rhs)) {
    /* Ridge retry: a small multiple of the mean curvature scale added to the
     * whole diagonal usually restores solvability for rank-deficient J. */
    const double mean_diag = a.trace() / static_cast<double>(n);
    const double ridge =
        settings.ridge_scale * (mean_diag > 0.0 ? mean_diag : 1.0);
    m.diagonal().array() += ridge;
    delta = m.ldlt().solve(rhs);
    if (!solution_ok(m, delta, rhs))
      throw SingularSystem("damped normal equations unsolvable",
                           project_nonnegative(alpha, constrained));
  }

  return project_nonnegative(alpha + delta, constrained);
}

}  // namespace pfopt
