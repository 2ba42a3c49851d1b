#pragma once

#include <span>

#include <Eigen/Dense>

#include "exp_family.hpp"

namespace pfopt {

/* One damped step for the least-squares problem min 1/2 |f(alpha)|^2:
 *
 *     [ J^T J + lambda * diag(J^T J) ] * delta = -J^T f
 *
 * followed by projection of the constrained entries onto [0, inf).  The
 * damping lambda is adapted multiplicatively from the observed objective
 * change: divide by adapt_down on improvement, multiply by adapt_up
 * otherwise (ties count as non-improvement). */

struct LMSettings {
  /* Initial damping.  Deliberately conservative: the standardized optimum
   * sits close to the constraint boundary, and an early overshoot that
   * projects the confining coefficients to zero leaves a tilted unconfined
   * density whose moments diverge — a trajectory that never recovers.
   * Starting heavily damped costs a few iterations; the adaptation (and the
   * batch ladder of the modified filter) wins them back. */
  double lambda0 = 100.0;
  double adapt_up = 2.0;     // multiplier on non-improvement
  double adapt_down = 2.0;   // divisor on improvement
  double diag_floor = 1e-12; // lower bound on damped diagonal entries
  double ridge_scale = 1e-8; // retry ridge, relative to mean diag of J^T J
};

inline constexpr double kLambdaMin = 1e-12;
inline constexpr double kLambdaMax = 1e12;

double clamp_lambda(double lambda);

/* lambda / adapt_down if h_new < h_prev, else lambda * adapt_up; clamped. */
double adapt_lambda(double h_prev, double h_new, double lambda,
                    const LMSettings& settings);

/* Clamps v at the listed indices to [0, inf). */
Eigen::VectorXd project_nonnegative(Eigen::VectorXd v,
                                    std::span<const int> indices);

/* Same, with the canonical constrained-parameter set of the density family. */
ParamVector project_constraints(const ParamVector& alpha);

/* Solves the damped normal equations and returns the projected update
 * project(alpha + delta).  If the system is unsolvable even after a ridge
 * retry, throws SingularSystem carrying project(alpha) (a zero step) as the
 * fallback.  Throws InvalidInput on non-finite input or shape mismatch. */
Eigen::VectorXd lm_step(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& J,
                        const Eigen::VectorXd& f, double lambda,
                        const LMSettings& settings,
                        std::span<const int> constrained);

}  // namespace pfopt
