#include "exp_family.hpp"

#include <cmath>

#include "rng.hpp"

namespace pfopt {

namespace {

constexpr std::array<int, 14> kConstrained = {
    4, 8, 11, 13,                            // x_i^2
    14, 15, 16, 17, 18, 19, 20, 21, 22, 23,  // x_i^2 x_j^2
};

int pair_offset(int i, int j) {
  if (i < 0 || j < i || j >= kStateDim)
    throw InvalidInput("pair index out of range");
  for (int k = 0; k < static_cast<int>(kPairs.size()); ++k)
    if (kPairs[k].first == i && kPairs[k].second == j) return k;
  throw InvalidInput("pair index out of range");
}

void validate_state(const State& x) {
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidInput("non-finite state coordinate");
}

void validate_mc_config(const MCConfig& cfg) {
  if (cfg.n_samples < 1) throw InvalidInput("n_samples must be >= 1");
  if (cfg.burn_in < 0) throw InvalidInput("burn_in must be >= 0");
  if (cfg.thinning < 1) throw InvalidInput("thinning must be >= 1");
  if (!(std::isfinite(cfg.proposal_std) && cfg.proposal_std > 0.0))
    throw InvalidInput("proposal_std must be positive and finite");
}

}  // namespace

int quadratic_index(int i, int j) { return 4 + pair_offset(i, j); }

int quartic_index(int i, int j) { return 14 + pair_offset(i, j); }

std::span<const int> constrained_indices() { return kConstrained; }

void validate_params(const ParamVector& alpha) {
  if (!alpha.allFinite()) throw InvalidInput("non-finite parameter");
}

PotentialVector eval_potentials(const State& x) {
  validate_state(x);
  PotentialVector psi;
  for (int i = 0; i < kStateDim; ++i) psi[i] = x[i];
  for (int k = 0; k < static_cast<int>(kPairs.size()); ++k) {
    const auto [i, j] = kPairs[k];
    const double q = x[i] * x[j];
    psi[4 + k] = q;
    psi[14 + k] = x[i] * x[i] * x[j] * x[j];
  }
  return psi;
}

double log_unnormalized_density(const State& x, const ParamVector& alpha) {
  validate_params(alpha);
  return -alpha.dot(eval_potentials(x));
}

SampleSet sample_density(const ParamVector& alpha, const MCConfig& cfg) {
  validate_params(alpha);
  validate_mc_config(cfg);

  Rng rng(cfg.seed);
  SampleSet out;
  out.states.reserve(cfg.n_samples);

  State x{};  // chain starts at the origin
  double logp = -alpha.dot(eval_potentials(x));

  const long total =
      static_cast<long>(cfg.burn_in) +
      static_cast<long>(cfg.n_samples) * static_cast<long>(cfg.thinning);
  long accepted = 0;

  for (long step = 1; step <= total; ++step) {
    State y;
    for (int i = 0; i < kStateDim; ++i)
      y[i] = x[i] + cfg.proposal_std * rng.normal();
    const double logp_y = -alpha.dot(eval_potentials(y));
    if (std::log(rng.uniform01_pos()) < logp_y - logp) {
      x = y;
      logp = logp_y;
      ++accepted;
    }
    const long past_burn = step - cfg.burn_in;
    if (past_burn > 0 && past_burn % cfg.thinning == 0) out.states.push_back(x);
  }

  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
  out.acceptance_suspect =
      out.acceptance_rate < 0.01 || out.acceptance_rate > 0.99;
  return out;
}

MomentEstimates estimate_expectations(const ParamVector& alpha,
                                      const MCConfig& cfg) {
  const SampleSet s = sample_density(alpha, cfg);
  const int n = static_cast<int>(s.states.size());

  Eigen::Matrix<double, Eigen::Dynamic, kNumPotentials> psi(n, kNumPotentials);
  for (int r = 0; r < n; ++r) psi.row(r) = eval_potentials(s.states[r]);

  MomentEstimates est;
  est.first = psi.colwise().mean();
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(kNumPotentials, kNumPotentials);
  second.selfadjointView<Eigen::Lower>().rankUpdate(psi.transpose(), 1.0 / n);
  est.second = second.selfadjointView<Eigen::Lower>();
  est.n_samples_used = n;
  est.acceptance_rate = s.acceptance_rate;
  est.acceptance_suspect = s.acceptance_suspect;
  return est;
}

FirstMoments estimate_first_moments(const ParamVector& alpha,
                                    const MCConfig& cfg) {
  const SampleSet s = sample_density(alpha, cfg);
  const int n = static_cast<int>(s.states.size());

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(kNumPotentials);
  for (const State& x : s.states) acc += eval_potentials(x);

  FirstMoments fm;
  fm.first = acc / n;
  fm.n_samples_used = n;
  fm.acceptance_rate = s.acceptance_rate;
  fm.acceptance_suspect = s.acceptance_suspect;
  return fm;
}

}  // namespace pfopt
