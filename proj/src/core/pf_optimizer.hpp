#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "exp_family.hpp"
#include "lm_solver.hpp"
#include "moment_match.hpp"
#include "rng.hpp"

namespace pfopt {

/* Population search over parameter space, phrased as a filtering loop:
 * every particle takes one damped least-squares step (predict), the best
 * objective value over the population is treated as the measurement
 * (observe), particles are weighted by a Gaussian likelihood around that
 * measurement, and the population is resampled in proportion to weight.
 *
 *   Naive       - M independent restarts; no weighting, no resampling.
 *   GenericPF   - weight + multinomial resampling; offspring inherit the
 *                 parent's damping unchanged.
 *   ModifiedPF  - same, but offspring duplicated from one parent ladder
 *                 their damping: the i-th copy (in id order) runs with
 *                 lambda_parent / gamma^(i-1), so duplicates explore
 *                 different step sizes instead of repeating one another. */
enum class Strategy { Naive, GenericPF, ModifiedPF };

const std::string& strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);  // throws ParseError

struct Particle {
  ParamVector alpha = ParamVector::Zero();
  double lambda = 1.0;
  /* Objective at alpha (average error per moment); +inf until first
   * evaluated, which makes the first adaptation count as an improvement. */
  double objective = std::numeric_limits<double>::infinity();
  int parent_id = -1;
  int id = 0;
};

struct Ensemble {
  std::vector<Particle> particles;  // always ordered by id = position
  int iteration = 0;                // completed prediction rounds
  int init_projected = 0;           // initializer outputs clipped by projection
};

/* Gaussian measurement likelihood: w* ~ exp(-(y - H)^2 / (2 sigma2)) with
 * sigma2 = 1 / n_samples, tying the selection sharpness to the Monte Carlo
 * noise floor of the objective estimates. */
struct ObservationModel {
  double sigma2 = 1e-4;
};

struct IterationRecord {
  int iteration = 0;  // 1-based
  double y = 0.0;     // min objective across the population this iteration
  ParamVector best_alpha = ParamVector::Zero();  // argmin particle's alpha
  double best_so_far = 0.0;                      // running min of y
  std::vector<double> per_particle_objectives;
  std::vector<double> weights;  // normalized; empty for Naive
  int singular_steps = 0;       // particles that fell back to a zero step
  int sampler_warnings = 0;     // suspect Metropolis acceptance rates
};

struct RunConfig {
  Strategy strategy = Strategy::ModifiedPF;
  int n_particles = 100;
  int t_max = 20;
  /* Stop once best_so_far <= stop_threshold (0 disables in practice since
   * the objective is positive). */
  double stop_threshold = 0.0;
  double gamma = 1.1;         // damping-ladder ratio (ModifiedPF)
  int warmup_iterations = 0;  // leading iterations without resampling
  MCConfig mc;                // estimation settings; mc.seed is ignored here
  LMSettings lm;
  std::uint64_t master_seed = 1;
};

/* Draws one parameter vector per particle; rng is shared across calls so the
 * draws form one stream. */
using Initializer = std::function<ParamVector(int particle_index, Rng& rng)>;

Ensemble init_ensemble(const Initializer& init, int n_particles,
                       std::uint64_t seed, double lambda0);

struct PredictResult {
  std::vector<Particle> proposed;  // same ids/order as the input ensemble
  int singular_steps = 0;
  int sampler_warnings = 0;
};

/* One prediction round: per particle, estimate moments at alpha_j, take the
 * damped step with lambda_j, evaluate the objective at the proposal, adapt
 * lambda from the change.  A singular system keeps alpha and forces the
 * damping up.  Seeds derive from (master_seed, phase, ensemble.iteration,
 * particle id); the strategy never enters, so strategies that share a master
 * seed see identical Monte Carlo streams. */
PredictResult predict(const Ensemble& ensemble, const TargetMoments& targets,
                      const RunConfig& cfg);

/* Measurement: the smallest objective across the proposed population. */
double observe(const std::vector<Particle>& proposed);

/* Normalized Gaussian likelihood weights, computed in log space. */
std::vector<double> compute_weights(const std::vector<Particle>& proposed,
                                    double y, const ObservationModel& obs);

/* The particle carrying the population's estimate this iteration: highest
 * weight, equivalently lowest objective (ties break to the lowest id).
 * Pass empty weights to select by objective alone. */
const Particle& select_estimate(const std::vector<Particle>& proposed,
                                const std::vector<double>& weights);

/* Multinomial resampling: offspring k copies proposal a(k) drawn with
 * P(a(k) = j) = w_j, keeping its alpha/lambda/objective, with
 * parent_id = a(k) and id = k.  The caller sets the new iteration count. */
Ensemble resample(const std::vector<Particle>& proposed,
                  const std::vector<double>& weights, std::uint64_t seed);

/* ModifiedPF damping ladder: within each batch of same-parent offspring, in
 * id order, the i-th (1-based) gets lambda_parent / gamma^(i-1), clamped. */
Ensemble assign_batch_lambdas(Ensemble ensemble, double gamma);

/* Full optimization loop; returns one record per completed iteration. */
std::vector<IterationRecord> run(const RunConfig& cfg,
                                 const TargetMoments& targets,
                                 const Initializer& init);

}  // namespace pfopt
