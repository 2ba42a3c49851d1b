#include "moment_match.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace pfopt {

TargetMoments compute_target_moments(const std::vector<State>& samples) {
  if (samples.empty()) throw InvalidInput("empty sample set");
  const long n = static_cast<long>(samples.size());

  TargetMoments tm;
  tm.n_source_samples = n;

  for (int i = 0; i < kStateDim; ++i) {
    double lo = samples[0][i], hi = samples[0][i], sum = 0.0;
    for (const State& x : samples) {
      if (!std::isfinite(x[i])) throw InvalidInput("non-finite sample");
      lo = std::min(lo, x[i]);
      hi = std::max(hi, x[i]);
      sum += x[i];
    }
    if (lo == hi)
      throw DegenerateData("coordinate " + std::to_string(i + 1) +
                           " is constant across all samples");
    const double mu = sum / n;
    double ss = 0.0;
    for (const State& x : samples) ss += (x[i] - mu) * (x[i] - mu);
    const double sigma = std::sqrt(ss / n);  // population convention

    if (sigma > 1e-12 * std::max(1.0, std::abs(mu))) {
      tm.mean[i] = mu;
      tm.stddev[i] = sigma;
      tm.standardized[i] = true;
    } else {
      tm.mean[i] = 0.0;
      tm.stddev[i] = 1.0;
      tm.standardized[i] = false;
    }
  }

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(kNumPotentials);
  for (const State& x : samples) {
    State z;
    for (int i = 0; i < kStateDim; ++i)
      z[i] = (x[i] - tm.mean[i]) / tm.stddev[i];
    acc += eval_potentials(z);
  }
  tm.t = acc / static_cast<double>(n);
  return tm;
}

Eigen::VectorXd residual(const MomentEstimates& est,
                         const TargetMoments& targets) {
  if (est.first.size() != kNumPotentials ||
      targets.t.size() != kNumPotentials)
    throw InvalidInput("moment vector has wrong dimension");
  return est.first - targets.t;
}

double moment_matching_error(const Eigen::VectorXd& f) {
  return 0.5 * f.squaredNorm();
}

double average_error_per_moment(double epsilon, int n_moments) {
  if (n_moments <= 0) throw InvalidInput("n_moments must be positive");
  if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be nonnegative");
  return std::sqrt(2.0 * epsilon / n_moments);
}

Eigen::MatrixXd jacobian(const MomentEstimates& est) {
  if (est.first.size() != kNumPotentials ||
      est.second.rows() != kNumPotentials ||
      est.second.cols() != kNumPotentials)
    throw InvalidInput("moment estimates have wrong dimension");
  return -(est.second - est.first * est.first.transpose());
}

}  // namespace pfopt
