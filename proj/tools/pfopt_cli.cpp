/* Command-line front end; talks to the library exclusively through the
 * public C API. */

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfopt/pfopt.h"

namespace {

/* 0 on success, 1 for configuration problems, 2 for execution problems. */
int exit_code(pfopt_status s) {
  switch (s) {
    case PFOPT_OK: return 0;
    case PFOPT_ERR_INVALID_ARGUMENT:
    case PFOPT_ERR_PARSE: return 1;
    case PFOPT_ERR_IO:
    case PFOPT_ERR_RUNTIME: return 2;
  }
  return 2;
}

struct CampaignCloser {
  void operator()(pfopt_campaign* c) const { pfopt_campaign_close(c); }
};
using CampaignHandle = std::unique_ptr<pfopt_campaign, CampaignCloser>;

struct CommonArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string scale;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_scale) {
  cmd->add_option("--config", args.config, "campaign config (JSON)")
      ->required();
  cmd->add_option("--out", args.out, "override the config's output directory");
  cmd->add_option("--seed", args.seed, "override the master seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  if (with_scale)
    cmd->add_option("--scale", args.scale,
                    "parameter-scale preset: paper or desk")
        ->check(CLI::IsMember({"paper", "desk"}));
}

int open_and_prepare(const CommonArgs& args, CampaignHandle& handle) {
  pfopt_campaign* raw = nullptr;
  pfopt_status s = pfopt_campaign_open(args.config.c_str(), &raw);
  handle.reset(raw);
  if (s != PFOPT_OK) return exit_code(s);

  if (!args.scale.empty()) {
    s = pfopt_campaign_apply_scale(handle.get(), args.scale.c_str());
    if (s != PFOPT_OK) return exit_code(s);
  }
  if (args.seed_set) {
    s = pfopt_campaign_set_master_seed(handle.get(), args.seed);
    if (s != PFOPT_OK) return exit_code(s);
  }
  if (!args.out.empty()) {
    s = pfopt_campaign_set_output_dir(handle.get(), args.out.c_str());
    if (s != PFOPT_OK) return exit_code(s);
  }
  return 0;
}

std::string effective_output_dir(const pfopt_campaign* handle) {
  size_t size = 0;
  if (pfopt_campaign_config_json(handle, nullptr, &size) != PFOPT_OK)
    return "";
  std::string buf(size, '\0');
  if (pfopt_campaign_config_json(handle, buf.data(), &size) != PFOPT_OK)
    return "";
  buf.resize(size - 1);
  const auto j = nlohmann::json::parse(buf, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.contains("output_dir")) return "";
  return j["output_dir"].get<std::string>();
}

int report_failure(const char* verb) {
  std::fprintf(stderr, "pfopt %s failed: %s\n", verb, pfopt_last_error());
  return 0;  // actual code comes from exit_code at the call site
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle-filter global optimization of moment-matching "
               "density estimates"};
  app.set_version_flag("--version", std::string("pfopt ") + pfopt_version());
  app.require_subcommand(1);

  CommonArgs gen_args, run_args, report_args;
  CLI::App* gen = app.add_subcommand(
      "generate", "write source samples and target moments");
  add_common(gen, gen_args, /*with_scale=*/true);
  CLI::App* run = app.add_subcommand(
      "run", "run the configured campaign and write traces/summary/plot");
  add_common(run, run_args, /*with_scale=*/true);
  CLI::App* rep = app.add_subcommand(
      "report", "recompute summary and plot from stored traces");
  add_common(rep, report_args, /*with_scale=*/false);

  CLI11_PARSE(app, argc, argv);

  CampaignHandle handle;
  if (gen->parsed()) {
    if (int rc = open_and_prepare(gen_args, handle)) {
      report_failure("generate");
      return rc;
    }
    const pfopt_status s = pfopt_campaign_generate(handle.get());
    if (s != PFOPT_OK) {
      report_failure("generate");
      return exit_code(s);
    }
    std::printf("wrote samples.csv and targets.txt under %s\n",
                effective_output_dir(handle.get()).c_str());
    return 0;
  }

  if (run->parsed()) {
    if (int rc = open_and_prepare(run_args, handle)) {
      report_failure("run");
      return rc;
    }
    const pfopt_status s = pfopt_campaign_run(handle.get());
    if (s != PFOPT_OK) {
      report_failure("run");
      return exit_code(s);
    }
    std::printf(
        "wrote traces/, summary.csv, campaign.svg, campaign_summary.json "
        "under %s\n",
        effective_output_dir(handle.get()).c_str());
    return 0;
  }

  if (int rc = open_and_prepare(report_args, handle)) {
    report_failure("report");
    return rc;
  }
  const pfopt_status s = pfopt_campaign_report(handle.get());
  if (s != PFOPT_OK) {
    report_failure("report");
    return exit_code(s);
  }
  std::printf("rewrote summary.csv and campaign.svg under %s\n",
              effective_output_dir(handle.get()).c_str());
  return 0;
}
