#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace pfopt {

/* Four-variable exponential-family density
 *
 *     p(x, alpha)  ∝  exp( -<alpha, psi(x)> ),      x in R^4,
 *
 * with 24 potentials psi(x), ordered as
 *
 *     psi_1..4    =  x_i                       (linear)
 *     psi_5..14   =  x_i x_j,    j >= i        (quadratic, pair order below)
 *     psi_15..24  =  x_i^2 x_j^2, j >= i       (quartic,   pair order below)
 *
 * Pair order: (1,1),(1,2),(1,3),(1,4),(2,2),(2,3),(2,4),(3,3),(3,4),(4,4).
 * Integrability requires the pure-square and quartic coefficients to stay
 * nonnegative; those positions are listed by constrained_indices(). */

inline constexpr int kStateDim = 4;
inline constexpr int kNumPotentials = 24;

using State = std::array<double, kStateDim>;
using ParamVector = Eigen::Matrix<double, kNumPotentials, 1>;
using PotentialVector = Eigen::Matrix<double, kNumPotentials, 1>;

/* The 10 index pairs (i, j), j >= i, shared by the quadratic and quartic
 * blocks, in potential order. */
inline constexpr std::array<std::pair<int, int>, 10> kPairs = {{
    {0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1},
    {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3},
}};

/* 0-based potential index of x_i x_j (j >= i, 0-based coordinates). */
int quadratic_index(int i, int j);
/* 0-based potential index of x_i^2 x_j^2 (j >= i, 0-based coordinates). */
int quartic_index(int i, int j);

/* 0-based indices of the nonnegativity-constrained parameters: the four pure
 * squares x_i^2 and all ten quartics x_i^2 x_j^2. */
std::span<const int> constrained_indices();

/* Throws InvalidInput unless alpha is finite everywhere. */
void validate_params(const ParamVector& alpha);

PotentialVector eval_potentials(const State& x);

/* log of the unnormalized density: -<alpha, psi(x)>.  The normalizer Z(alpha)
 * has no closed form and is never computed anywhere in the library. */
double log_unnormalized_density(const State& x, const ParamVector& alpha);

struct MCConfig {
  int n_samples = 10000;     // retained draws
  int burn_in = 2000;        // discarded leading steps
  double proposal_std = 0.5; // per-coordinate random-walk scale
  /* Keep every thinning-th post-burn-in state.  The default decorrelates the
   * random walk enough that n_samples retained draws carry close to n_samples
   * of independent information, which is what the 1/sqrt(n) noise model the
   * optimizer's observation variance assumes. */
  int thinning = 10;
  std::uint64_t seed = 0;
};

struct SampleSet {
  std::vector<State> states;
  double acceptance_rate = 0.0;
  /* Raised when the acceptance rate leaves [0.01, 0.99]: the chain is almost
   * frozen or almost free, so estimates from it deserve suspicion.  Nonfatal:
   * callers count these and keep going. */
  bool acceptance_suspect = false;
};

/* Random-walk Metropolis on the unnormalized log density, started at x = 0.
 * Runs burn_in + n_samples*thinning steps and retains every thinning-th
 * post-burn-in state.  Identical (alpha, cfg) give bit-identical output. */
SampleSet sample_density(const ParamVector& alpha, const MCConfig& cfg);

struct MomentEstimates {
  Eigen::VectorXd first;   // E[psi_k],        size 24
  Eigen::MatrixXd second;  // E[psi_i psi_j],  24 x 24, exactly symmetric
  int n_samples_used = 0;
  double acceptance_rate = 0.0;
  bool acceptance_suspect = false;
};

/* Monte Carlo estimates of first and second potential moments under
 * p(., alpha), from one sample_density chain. */
MomentEstimates estimate_expectations(const ParamVector& alpha,
                                      const MCConfig& cfg);

struct FirstMoments {
  Eigen::VectorXd first;  // E[psi_k], size 24
  int n_samples_used = 0;
  double acceptance_rate = 0.0;
  bool acceptance_suspect = false;
};

/* First moments only; runs the same chain as estimate_expectations would for
 * the same (alpha, cfg) but skips the second-moment accumulation. */
FirstMoments estimate_first_moments(const ParamVector& alpha,
                                    const MCConfig& cfg);

}  // namespace pfopt
