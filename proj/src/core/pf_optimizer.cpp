#include "pf_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "errors.hpp"
#include "rng.hpp"

namespace pfopt {

namespace {

void validate_run_config(const RunConfig& cfg) {
  if (cfg.n_particles < 1) throw InvalidInput("n_particles must be >= 1");
  if (cfg.t_max < 1) throw InvalidInput("t_max must be >= 1");
  if (cfg.warmup_iterations < 0)
    throw InvalidInput("warmup_iterations must be >= 0");
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma))
    throw InvalidInput("gamma must be positive and finite");
  if (cfg.strategy == Strategy::ModifiedPF && !(cfg.gamma > 1.0))
    throw InvalidInput("gamma must be > 1 for the ladder strategy");
  if (!(cfg.stop_threshold >= 0.0))
    throw InvalidInput("stop_threshold must be >= 0");
  if (!(cfg.lm.lambda0 > 0.0)) throw InvalidInput("lambda0 must be positive");
}

int argmin_objective(const std::vector<Particle>& proposed) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(proposed.size()); ++j)
    if (proposed[j].objective < proposed[best].objective) best = j;
  return best;
}

}  // namespace

const std::string& strategy_name(Strategy s) {
  static const std::string names[] = {"Naive", "GenericPF", "ModifiedPF"};
  return names[static_cast<int>(s)];
}

Strategy strategy_from_name(const std::string& name) {
  for (Strategy s : {Strategy::Naive, Strategy::GenericPF, Strategy::ModifiedPF})
    if (strategy_name(s) == name) return s;
  throw ParseError("strategy", "unknown strategy '" + name + "'");
}

Ensemble init_ensemble(const Initializer& init, int n_particles,
                       std::uint64_t seed, double lambda0) {
  if (!init) throw InvalidInput("initializer must be callable");
  if (n_particles < 1) throw InvalidInput("n_particles must be >= 1");
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0))
    throw InvalidInput("lambda0 must be positive and finite");

  Rng rng(seed);
  Ensemble ens;
  ens.particles.resize(n_particles);
  for (int j = 0; j < n_particles; ++j) {
    const ParamVector raw = init(j, rng);
    validate_params(raw);
    const ParamVector alpha = project_constraints(raw);
    if (alpha != raw) ++ens.init_projected;
    Particle& p = ens.particles[j];
    p.alpha = alpha;
    p.lambda = lambda0;
    p.parent_id = -1;
    p.id = j;
  }
  return ens;
}

PredictResult predict(const Ensemble& ensemble, const TargetMoments& targets,
                      const RunConfig& cfg) {
  if (ensemble.particles.empty()) throw InvalidInput("empty ensemble");
  validate_run_config(cfg);

  PredictResult out;
  out.proposed.reserve(ensemble.particles.size());

  for (const Particle& p : ensemble.particles) {
    MCConfig mc = cfg.mc;
    mc.seed = derive_seed(cfg.master_seed, kSeedPhaseEstimate,
                          ensemble.iteration, p.id);
    const MomentEstimates est = estimate_expectations(p.alpha, mc);
    if (est.acceptance_suspect) ++out.sampler_warnings;

    const Eigen::VectorXd f = residual(est, targets);
    const Eigen::MatrixXd jac = jacobian(est);

    ParamVector alpha_star;
    bool singular = false;
    try {
      alpha_star =
          lm_step(p.alpha, jac, f, p.lambda, cfg.lm, constrained_indices());
    } catch (const SingularSystem& e) {
      alpha_star = e.fallback();
      singular = true;
      ++out.singular_steps;
    }

    mc.seed = derive_seed(cfg.master_seed, kSeedPhaseObjective,
                          ensemble.iteration, p.id);
    const FirstMoments fm = estimate_first_moments(alpha_star, mc);
    if (fm.acceptance_suspect) ++out.sampler_warnings;
    const Eigen::VectorXd f_star = fm.first - targets.t;
    const double h_star = average_error_per_moment(
        moment_matching_error(f_star), kNumPotentials);

    Particle q;
    q.alpha = alpha_star;
    q.lambda = singular ? clamp_lambda(p.lambda * cfg.lm.adapt_up)
                        : adapt_lambda(p.objective, h_star, p.lambda, cfg.lm);
    q.objective = h_star;
    q.parent_id = p.id;
    q.id = p.id;
    out.proposed.push_back(q);
  }
  return out;
}

double observe(const std::vector<Particle>& proposed) {
  if (proposed.empty()) throw InvalidInput("empty population");
  return proposed[argmin_objective(proposed)].objective;
}

std::vector<double> compute_weights(const std::vector<Particle>& proposed,
                                    double y, const ObservationModel& obs) {
  if (proposed.empty()) throw InvalidInput("empty population");
  if (!(obs.sigma2 > 0.0)) throw InvalidInput("sigma2 must be positive");

  std::vector<double> logw(proposed.size());
  double max_logw = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < proposed.size(); ++j) {
    const double d = proposed[j].objective - y;
    logw[j] = -(d * d) / (2.0 * obs.sigma2);
    max_logw = std::max(max_logw, logw[j]);
  }

  std::vector<double> w(proposed.size());
  double sum = 0.0;
  for (size_t j = 0; j < w.size(); ++j) {
    w[j] = std::exp(logw[j] - max_logw);
    sum += w[j];
  }
  for (double& v : w) v /= sum;
  return w;
}

const Particle& select_estimate(const std::vector<Particle>& proposed,
                                const std::vector<double>& weights) {
  if (proposed.empty()) throw InvalidInput("empty population");
  const int by_objective = argmin_objective(proposed);
  if (weights.empty()) return proposed[by_objective];

  if (weights.size() != proposed.size())
    throw InvalidInput("weights/population size mismatch");
  int by_weight = 0;
  for (int j = 1; j < static_cast<int>(weights.size()); ++j)
    if (weights[j] > weights[by_weight]) by_weight = j;
  /* The weight is a strictly decreasing function of the objective, so the
   * two selections must agree; disagreement means corrupted inputs. */
  if (by_weight != by_objective)
    throw InvalidInput("weights are inconsistent with objectives");
  return proposed[by_weight];
}

Ensemble resample(const std::vector<Particle>& proposed,
                  const std::vector<double>& weights, std::uint64_t seed) {
  if (proposed.empty()) throw InvalidInput("empty population");
  if (weights.size() != proposed.size())
    throw InvalidInput("weights/population size mismatch");

  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InvalidInput("weights must be nonnegative and finite");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidInput("weights must be normalized");

  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (size_t j = 0; j < weights.size(); ++j) {
    acc += weights[j];
    cdf[j] = acc;
  }
  cdf.back() = 1.0;  // guard against accumulated rounding

  Rng rng(seed);
  Ensemble ens;
  ens.particles.resize(proposed.size());
  for (size_t k = 0; k < proposed.size(); ++k) {
    const double u = rng.uniform01();
    const size_t a =
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    Particle& child = ens.particles[k];
    child = proposed[std::min(a, proposed.size() - 1)];
    child.parent_id = proposed[std::min(a, proposed.size() - 1)].id;
    child.id = static_cast<int>(k);
  }
  return ens;
}

Ensemble assign_batch_lambdas(Ensemble ensemble, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InvalidInput("gamma must be positive and finite");
  std::map<int, int> rank;  // parent_id -> offspring seen so far
  for (Particle& p : ensemble.particles) {
    const int r = rank[p.parent_id]++;
    p.lambda = clamp_lambda(p.lambda / std::pow(gamma, r));
  }
  return ensemble;
}

std::vector<IterationRecord> run(const RunConfig& cfg,
                                 const TargetMoments& targets,
                                 const Initializer& init) {
  validate_run_config(cfg);

  Ensemble ens = init_ensemble(init, cfg.n_particles,
                               derive_seed(cfg.master_seed, kSeedPhaseInit),
                               cfg.lm.lambda0);

  ObservationModel obs;
  obs.sigma2 = 1.0 / static_cast<double>(cfg.mc.n_samples);

  std::vector<IterationRecord> records;
  records.reserve(cfg.t_max);
  double best_so_far = std::numeric_limits<double>::infinity();

  for (int t = 0; t < cfg.t_max; ++t) {
    PredictResult pr = predict(ens, targets, cfg);
    const double y = observe(pr.proposed);
    std::vector<double> weights;
    if (cfg.strategy != Strategy::Naive)
      weights = compute_weights(pr.proposed, y, obs);
    const Particle& best = select_estimate(pr.proposed, weights);
    best_so_far = std::min(best_so_far, y);

    IterationRecord rec;
    rec.iteration = t + 1;
    rec.y = y;
    rec.best_alpha = best.alpha;
    rec.best_so_far = best_so_far;
    rec.per_particle_objectives.reserve(pr.proposed.size());
    for (const Particle& p : pr.proposed)
      rec.per_particle_objectives.push_back(p.objective);
    rec.weights = weights;
    rec.singular_steps = pr.singular_steps;
    rec.sampler_warnings = pr.sampler_warnings;
    records.push_back(std::move(rec));

    if (t + 1 == cfg.t_max || best_so_far <= cfg.stop_threshold) break;

    if (cfg.strategy != Strategy::Naive && t >= cfg.warmup_iterations) {
      Ensemble next = resample(
          pr.proposed, weights,
          derive_seed(cfg.master_seed, kSeedPhaseResample, t));
      next.iteration = t + 1;
      next.init_projected = ens.init_projected;
      ens = std::move(next);
      if (cfg.strategy == Strategy::ModifiedPF)
        ens = assign_batch_lambdas(std::move(ens), cfg.gamma);
    } else {
      /* Independent continuation: every proposal survives as its own line. */
      ens.particles = std::move(pr.proposed);
      ens.iteration = t + 1;
    }
  }
  return records;
}

}  // namespace pfopt
