#include "pfopt/pfopt.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <string>

#include "errors.hpp"
#include "harness.hpp"

struct pfopt_campaign {
  pfopt::CampaignConfig cfg;
};

namespace {

thread_local std::string g_last_error;

pfopt_status fail(pfopt_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

/* Runs fn, translating the library's exception taxonomy to status codes. */
template <typename Fn>
pfopt_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PFOPT_OK;
  } catch (const pfopt::ParseError& e) {
    return fail(PFOPT_ERR_PARSE, e.what());
  } catch (const pfopt::InvalidInput& e) {
    return fail(PFOPT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const pfopt::IoError& e) {
    return fail(PFOPT_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(PFOPT_ERR_RUNTIME, e.what());
  }
}

}  // namespace

extern "C" {

const char* pfopt_version(void) { return PFOPT_VERSION_STRING; }

const char* pfopt_last_error(void) { return g_last_error.c_str(); }

pfopt_status pfopt_campaign_open(const char* config_path,
                                 pfopt_campaign** out) {
  if (!config_path || !out)
    return fail(PFOPT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<pfopt_campaign>();
    handle->cfg = pfopt::parse_config(config_path);
    *out = handle.release();
  });
}

pfopt_status pfopt_campaign_open_json(const char* config_json,
                                      pfopt_campaign** out) {
  if (!config_json || !out)
    return fail(PFOPT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<pfopt_campaign>();
    handle->cfg = pfopt::parse_config_text(config_json);
    *out = handle.release();
  });
}

pfopt_status pfopt_campaign_set_master_seed(pfopt_campaign* c, uint64_t seed) {
  if (!c) return fail(PFOPT_ERR_INVALID_ARGUMENT, "null handle");
  c->cfg.run.master_seed = seed;
  g_last_error.clear();
  return PFOPT_OK;
}

pfopt_status pfopt_campaign_set_output_dir(pfopt_campaign* c,
                                           const char* dir) {
  if (!c || !dir) return fail(PFOPT_ERR_INVALID_ARGUMENT, "null argument");
  if (!*dir)
    return fail(PFOPT_ERR_INVALID_ARGUMENT, "output dir must not be empty");
  c->cfg.output_dir = dir;
  g_last_error.clear();
  return PFOPT_OK;
}

pfopt_status pfopt_campaign_apply_scale(pfopt_campaign* c, const char* scale) {
  if (!c || !scale) return fail(PFOPT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { pfopt::apply_scale(c->cfg, scale); });
}

pfopt_status pfopt_campaign_config_json(const pfopt_campaign* c, char* buf,
                                        size_t* size) {
  if (!c || !size) return fail(PFOPT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string text = pfopt::config_to_json(c->cfg);
    const size_t needed = text.size() + 1;
    if (buf && *size > 0) {
      const size_t n = std::min(*size - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
    *size = needed;
  });
}

pfopt_status pfopt_campaign_generate(pfopt_campaign* c) {
  if (!c) return fail(PFOPT_ERR_INVALID_ARGUMENT, "null handle");
  return guarded([&] { pfopt::generate_artifacts(c->cfg); });
}

pfopt_status pfopt_campaign_run(pfopt_campaign* c) {
  if (!c) return fail(PFOPT_ERR_INVALID_ARGUMENT, "null handle");
  std::string dead_strategy;
  std::string first_failure;
  const pfopt_status s = guarded([&] {
    const pfopt::CampaignSummary summary = pfopt::run_campaign(c->cfg);
    for (const pfopt::StrategySummary& ss : summary.strategies)
      if (ss.n_repeats_done == 0 && dead_strategy.empty()) {
        dead_strategy = pfopt::strategy_name(ss.strategy);
        first_failure = ss.failures.empty() ? "unknown" : ss.failures.front();
      }
  });
  if (s != PFOPT_OK) return s;
  if (!dead_strategy.empty())
    return fail(PFOPT_ERR_RUNTIME, "every repeat of strategy " +
                                       dead_strategy +
                                       " failed; first: " + first_failure);
  return PFOPT_OK;
}

pfopt_status pfopt_campaign_report(pfopt_campaign* c) {
  if (!c) return fail(PFOPT_ERR_INVALID_ARGUMENT, "null handle");
  return guarded([&] { pfopt::report_campaign(c->cfg); });
}

void pfopt_campaign_close(pfopt_campaign* c) { delete c; }

}  // extern "C"
