#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exp_family.hpp"
#include "gauss_legendre.hpp"
#include "pf_optimizer.hpp"

namespace pfopt {

/* The four benchmark source distributions whose moments the optimizer is
 * asked to match:
 *
 *   Indep      - x_i i.i.d. from the 1-D density ∝ exp(-0.5 x^2 - x^4)
 *   Dep        - the full coupled density (all quartic cross terms active)
 *   SineNoise  - first four Legendre coefficients of sin(2πt) + white noise
 *   SinePhase  - same coefficients of sin(2π(t+η)) with a random phase η
 */
enum class ExperimentKind { Indep, Dep, SineNoise, SinePhase };

const std::string& experiment_name(ExperimentKind k);
ExperimentKind experiment_from_name(const std::string& name);  // throws ParseError

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Indep;
  long n_source_samples = 1000000;
  std::uint64_t seed = 1;
  int quadrature_nodes = 64;  // Legendre projection rule (SineNoise/SinePhase)
};

/* Parameter vector of the Indep density: alpha = 0.5 on the four pure
 * squares, 1 on the four pure quartics, 0 elsewhere. */
ParamVector known_density_alpha();

/* Parameter vector of the Dep density: 0.5 on the four pure squares, 1 on
 * all ten quartics. */
ParamVector coupled_density_alpha();

std::vector<State> gen_indep_samples(const ExperimentSpec& spec);
std::vector<State> gen_dep_samples(const ExperimentSpec& spec);
std::vector<State> gen_sine_noise_samples(const ExperimentSpec& spec);
std::vector<State> gen_sine_phase_samples(const ExperimentSpec& spec);

/* Dispatch on spec.kind. */
std::vector<State> gen_source_samples(const ExperimentSpec& spec);

/* Projection coefficients c_k = (2k+1)/2 * sum_q w_q u(t_q) P_k(t_q),
 * k = 0..3, for a signal given by its values at the rule's nodes. */
State legendre_coeffs(std::span<const double> u_at_nodes,
                      const GaussLegendre& rule);

/* Coefficients of sin(2πt) + noise, noise given per node. */
State sine_noise_coeffs(std::span<const double> noise_at_nodes,
                        const GaussLegendre& rule);

/* Coefficients of sin(2π(t + eta)). */
State sine_phase_coeffs(double eta, const GaussLegendre& rule);

/* Initial-condition distributions (one ParamVector per particle):
 * known-density start for Indep/Dep, wider start for the signal examples. */
ParamVector initializer_known_density(int j, Rng& rng);
ParamVector initializer_sine(int j, Rng& rng);
Initializer initializer_for(ExperimentKind kind);

}  // namespace pfopt
