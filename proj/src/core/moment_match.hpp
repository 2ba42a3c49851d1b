#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "exp_family.hpp"

namespace pfopt {

/* Fitting works on standardized data: each coordinate of the source samples
 * is shifted and scaled to mean 0, variance 1 (population convention, divide
 * by N) before the target moments are taken.  The applied shift/scale is
 * recorded so the fitted density can be mapped back to raw coordinates.
 *
 * A coordinate whose scale is numerically negligible (below 1e-12 relative to
 * its mean) is left untransformed: dividing by a rounding-level sigma would
 * amplify noise into a fake unit-variance coordinate.  Such coordinates are
 * flagged via `standardized`.  A coordinate that is *exactly* constant across
 * all samples is an error: no scale information exists at all. */
struct TargetMoments {
  Eigen::VectorXd t;  // T_k = sample mean of psi_k over standardized samples
  long n_source_samples = 0;
  std::array<double, kStateDim> mean{};
  std::array<double, kStateDim> stddev{};
  std::array<bool, kStateDim> standardized{};
};

/* Standardizes the samples and returns their empirical potential moments.
 * Throws InvalidInput on an empty or non-finite sample set, DegenerateData if
 * some coordinate is constant. */
TargetMoments compute_target_moments(const std::vector<State>& samples);

/* Moment-matching residual f_k(alpha) = E_alpha[psi_k] - T_k. */
Eigen::VectorXd residual(const MomentEstimates& est,
                         const TargetMoments& targets);

/* epsilon = 1/2 sum_k f_k^2 */
double moment_matching_error(const Eigen::VectorXd& f);

/* sqrt(2 epsilon / l): the root-mean-square residual per moment, the
 * objective every run reports. */
double average_error_per_moment(double epsilon, int n_moments);

/* Jacobian of the residual map: d f_i / d alpha_j = -Cov_alpha(psi_i, psi_j),
 * i.e. J = -(E[psi psi^T] - E[psi] E[psi]^T).  Symmetric and negative
 * semidefinite up to Monte Carlo noise. */
Eigen::MatrixXd jacobian(const MomentEstimates& est);

}  // namespace pfopt
