#include "experiments.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "rng.hpp"

namespace pfopt {

namespace {

constexpr std::array<int, 4> kSquareIdx = {4, 8, 11, 13};    // x_i^2
constexpr std::array<int, 4> kQuarticDiagIdx = {14, 18, 21, 23};  // x_i^4

void validate_spec(const ExperimentSpec& spec, bool needs_quadrature) {
  if (spec.n_source_samples < 2)
    throw InvalidInput("n_source_samples must be >= 2");
  if (needs_quadrature && spec.quadrature_nodes < 32)
    throw InvalidInput("quadrature_nodes must be >= 32");
}

/* 4 x n_nodes projection matrix: row k maps node values to c_k. */
std::vector<std::vector<double>> projection_rows(const GaussLegendre& rule) {
  std::vector<std::vector<double>> rows(4);
  for (int k = 0; k < 4; ++k) {
    rows[k].resize(rule.nodes.size());
    for (size_t q = 0; q < rule.nodes.size(); ++q)
      rows[k][q] =
          0.5 * (2 * k + 1) * rule.weights[q] * legendre_p(k, rule.nodes[q]);
  }
  return rows;
}

State apply_projection(const std::vector<std::vector<double>>& rows,
                       std::span<const double> u) {
  State c{};
  for (int k = 0; k < 4; ++k) {
    double acc = 0.0;
    for (size_t q = 0; q < u.size(); ++q) acc += rows[k][q] * u[q];
    c[k] = acc;
  }
  return c;
}

}  // namespace

const std::string& experiment_name(ExperimentKind k) {
  static const std::string names[] = {"Indep", "Dep", "SineNoise", "SinePhase"};
  return names[static_cast<int>(k)];
}

ExperimentKind experiment_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::Indep, ExperimentKind::Dep, ExperimentKind::SineNoise,
        ExperimentKind::SinePhase})
    if (experiment_name(k) == name) return k;
  throw ParseError("experiment.kind", "unknown experiment '" + name + "'");
}

ParamVector known_density_alpha() {
  ParamVector a = ParamVector::Zero();
  for (int i : kSquareIdx) a[i] = 0.5;
  for (int i : kQuarticDiagIdx) a[i] = 1.0;
  return a;
}

ParamVector coupled_density_alpha() {
  ParamVector a = ParamVector::Zero();
  for (int i : kSquareIdx) a[i] = 0.5;
  for (int i = 14; i < kNumPotentials; ++i) a[i] = 1.0;
  return a;
}

std::vector<State> gen_indep_samples(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::Indep) throw InvalidInput("kind mismatch");
  validate_spec(spec, false);

  /* Rejection from a standard-normal envelope: the target 1-D density is
   * ∝ exp(-0.5 x^2) * exp(-x^4), so a N(0,1) proposal is accepted with
   * probability exp(-x^4) <= 1. */
  Rng rng(derive_seed(spec.seed, kSeedPhaseSource));
  std::vector<State> out(spec.n_source_samples);
  for (State& x : out)
    for (int i = 0; i < kStateDim; ++i) {
      for (;;) {
        const double z = rng.normal();
        if (rng.uniform01() < std::exp(-z * z * z * z)) {
          x[i] = z;
          break;
        }
      }
    }
  return out;
}

std::vector<State> gen_dep_samples(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::Dep) throw InvalidInput("kind mismatch");
  validate_spec(spec, false);

  /* The coupled density has no product structure, so draw the whole state
   * with the family's Metropolis sampler; long thinning decorrelates. */
  MCConfig mc;
  mc.n_samples = static_cast<int>(spec.n_source_samples);
  mc.burn_in = 5000;
  mc.thinning = 10;
  mc.proposal_std = 0.5;
  mc.seed = derive_seed(spec.seed, kSeedPhaseSource);
  return sample_density(coupled_density_alpha(), mc).states;
}

std::vector<State> gen_sine_noise_samples(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::SineNoise)
    throw InvalidInput("kind mismatch");
  validate_spec(spec, true);

  const GaussLegendre rule = gauss_legendre(spec.quadrature_nodes);
  const auto rows = projection_rows(rule);
  std::vector<double> base(rule.nodes.size());
  for (size_t q = 0; q < rule.nodes.size(); ++q)
    base[q] = std::sin(2.0 * std::numbers::pi * rule.nodes[q]);

  Rng rng(derive_seed(spec.seed, kSeedPhaseSource));
  std::vector<State> out(spec.n_source_samples);
  std::vector<double> u(rule.nodes.size());
  for (State& x : out) {
    for (size_t q = 0; q < u.size(); ++q) u[q] = base[q] + rng.normal();
    x = apply_projection(rows, u);
  }
  return out;
}

std::vector<State> gen_sine_phase_samples(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::SinePhase)
    throw InvalidInput("kind mismatch");
  validate_spec(spec, true);

  const GaussLegendre rule = gauss_legendre(spec.quadrature_nodes);
  const auto rows = projection_rows(rule);
  const double sigma = std::sqrt(0.1);  // phase has variance 0.1

  Rng rng(derive_seed(spec.seed, kSeedPhaseSource));
  std::vector<State> out(spec.n_source_samples);
  std::vector<double> u(rule.nodes.size());
  for (State& x : out) {
    const double eta = sigma * rng.normal();
    for (size_t q = 0; q < u.size(); ++q)
      u[q] = std::sin(2.0 * std::numbers::pi * (rule.nodes[q] + eta));
    x = apply_projection(rows, u);
  }
  return out;
}

std::vector<State> gen_source_samples(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::Indep: return gen_indep_samples(spec);
    case ExperimentKind::Dep: return gen_dep_samples(spec);
    case ExperimentKind::SineNoise: return gen_sine_noise_samples(spec);
    case ExperimentKind::SinePhase: return gen_sine_phase_samples(spec);
  }
  throw InvalidInput("unknown experiment kind");
}

State legendre_coeffs(std::span<const double> u_at_nodes,
                      const GaussLegendre& rule) {
  if (u_at_nodes.size() != rule.nodes.size())
    throw InvalidInput("node-value count does not match the rule");
  if (rule.nodes.size() < 32) throw InvalidInput("rule must have >= 32 nodes");
  return apply_projection(projection_rows(rule), u_at_nodes);
}

State sine_noise_coeffs(std::span<const double> noise_at_nodes,
                        const GaussLegendre& rule) {
  if (noise_at_nodes.size() != rule.nodes.size())
    throw InvalidInput("node-value count does not match the rule");
  std::vector<double> u(rule.nodes.size());
  for (size_t q = 0; q < u.size(); ++q)
    u[q] = std::sin(2.0 * std::numbers::pi * rule.nodes[q]) + noise_at_nodes[q];
  return legendre_coeffs(u, rule);
}

State sine_phase_coeffs(double eta, const GaussLegendre& rule) {
  std::vector<double> u(rule.nodes.size());
  for (size_t q = 0; q < u.size(); ++q)
    u[q] = std::sin(2.0 * std::numbers::pi * (rule.nodes[q] + eta));
  return legendre_coeffs(u, rule);
}

ParamVector initializer_known_density(int /*j*/, Rng& rng) {
  ParamVector a = ParamVector::Zero();
  for (int i : kSquareIdx) a[i] = 0.5 * (1.0 - rng.uniform01());
  for (int i : kQuarticDiagIdx) a[i] = 1.0 - 0.5 * rng.uniform01();
  return a;
}

ParamVector initializer_sine(int /*j*/, Rng& rng) {
  ParamVector a = ParamVector::Zero();
  for (int i : kSquareIdx) a[i] = 1.0 - rng.uniform01();
  for (int i : kQuarticDiagIdx) a[i] = 1.0 - rng.uniform01();
  return a;
}

Initializer initializer_for(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Indep:
    case ExperimentKind::Dep:
      return [](int j, Rng& rng) { return initializer_known_density(j, rng); };
    case ExperimentKind::SineNoise:
    case ExperimentKind::SinePhase:
      return [](int j, Rng& rng) { return initializer_sine(j, rng); };
  }
  throw InvalidInput("unknown experiment kind");
}

}  // namespace pfopt
