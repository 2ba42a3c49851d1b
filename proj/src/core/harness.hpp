#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "experiments.hpp"
#include "moment_match.hpp"
#include "pf_optimizer.hpp"

namespace pfopt {

/* A campaign runs every configured strategy n_repeats times against one
 * experiment's target moments and aggregates the per-iteration objective
 * series across repeats.  Artifacts written under output_dir:
 *
 *   targets.txt                   standardization + target moments used
 *   traces/<Strategy>_rep<r>.csv  per-repeat trace (iteration, y, best_so_far)
 *   summary.csv                   per-(iteration, strategy) aggregates
 *   campaign.svg                  error-vs-iteration plot with error bars
 *   campaign_summary.json         wall-clock, failures, convergence readout
 */
struct CampaignConfig {
  ExperimentSpec experiment;
  RunConfig run;  // template; its strategy field is overridden per entry
  std::vector<Strategy> strategies = {Strategy::Naive, Strategy::GenericPF,
                                      Strategy::ModifiedPF};
  int n_repeats = 10;
  /* When true (default, and what the benchmark protocol prescribes), all
   * strategies of a repeat share one derived seed, hence identical initial
   * ensembles and Monte Carlo streams. */
  bool shared_initial_conditions = true;
  std::filesystem::path output_dir;
  /* Best-so-far level that counts as converged; <= 0 selects the default
   * 3/sqrt(n_samples), three times the Monte Carlo noise floor. */
  double convergence_threshold = 0.0;
  /* Optional: load target moments from this file instead of generating
   * source samples. */
  std::filesystem::path targets_path;
};

void validate_config(const CampaignConfig& cfg);  // throws ParseError
double resolved_convergence_threshold(const CampaignConfig& cfg);

/* JSON document mirroring the field names above; unknown keys rejected.
 * parse(config_to_json(c)) reproduces c exactly. */
CampaignConfig parse_config_text(const std::string& text);
CampaignConfig parse_config(const std::filesystem::path& path);
std::string config_to_json(const CampaignConfig& cfg);

/* Preset parameter scales: "paper" (N=10^6, M=100, N_E=10^4, 10 repeats) or
 * "desk" (N=10^5, M=50, N_E=2000, 3 repeats) — throws InvalidInput else. */
void apply_scale(CampaignConfig& cfg, const std::string& scale);

struct StrategySummary {
  Strategy strategy = Strategy::Naive;
  /* Index 0 is iteration 1.  Aggregates are taken across the repeats that
   * reached the iteration (all of them unless a run stopped early). */
  std::vector<double> mean_error;       // mean of y
  std::vector<double> std_error;        // population std of y
  std::vector<double> best_so_far_mean; // mean of running-min y
  std::vector<double> convergence_fraction;  // repeats at/below threshold
  double wall_seconds = 0.0;
  int n_repeats_done = 0;
  int failed_repeats = 0;
  std::vector<std::string> failures;  // one message per failed repeat
};

struct CampaignSummary {
  std::string experiment;  // name, used in plot labels
  double convergence_threshold = 0.0;
  std::vector<StrategySummary> strategies;
};

/* First 1-based index at which the running minimum of the series is at or
 * below the threshold; nullopt if never. */
std::optional<int> convergence_iteration(std::span<const double> series,
                                         double threshold);

/* Target moments for the configured experiment: loaded from targets_path if
 * set, otherwise computed from freshly generated source samples. */
TargetMoments campaign_targets(const CampaignConfig& cfg);

/* Runs the full campaign and writes every artifact.  Individual run failures
 * are recorded in the summary and do not abort the campaign. */
CampaignSummary run_campaign(const CampaignConfig& cfg);

/* Re-aggregates summary.csv and campaign.svg from traces already on disk. */
CampaignSummary report_campaign(const CampaignConfig& cfg);

/* Writes <output_dir>/samples.csv and <output_dir>/targets.txt for the
 * configured experiment. */
void generate_artifacts(const CampaignConfig& cfg);

void emit_csv(const CampaignSummary& summary,
              const std::filesystem::path& path);
void emit_svg(const CampaignSummary& summary,
              const std::filesystem::path& path);

void write_target_moments(const TargetMoments& tm,
                          const std::filesystem::path& path);
TargetMoments read_target_moments(const std::filesystem::path& path);

}  // namespace pfopt
