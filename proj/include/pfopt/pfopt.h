#ifndef PFOPT_H
#define PFOPT_H

/* C interface to the particle-filter moment-matching optimizer.
 *
 * Every function that can fail returns a pfopt_status; PFOPT_OK is 0.  On
 * failure, pfopt_last_error() returns a human-readable message for the most
 * recent failure on the calling thread.  Handles are opaque and must be
 * released with pfopt_campaign_close(). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define PFOPT_VERSION_STRING "1.0.0"

typedef enum pfopt_status {
  PFOPT_OK = 0,
  PFOPT_ERR_INVALID_ARGUMENT = 1, /* bad handle/pointer/value */
  PFOPT_ERR_PARSE = 2,            /* malformed config or data file */
  PFOPT_ERR_IO = 3,               /* file unreadable/unwritable */
  PFOPT_ERR_RUNTIME = 4           /* execution failed */
} pfopt_status;

/* Library version, e.g. "1.0.0". */
const char* pfopt_version(void);

/* Message for the calling thread's most recent failure ("" if none). */
const char* pfopt_last_error(void);

/* A configured campaign: one experiment, a set of strategies, repeat count,
 * output directory.  Created from a JSON config, then optionally adjusted,
 * then executed. */
typedef struct pfopt_campaign pfopt_campaign;

/* Loads a campaign config from a JSON file. */
pfopt_status pfopt_campaign_open(const char* config_path,
                                 pfopt_campaign** out);

/* Same, from an in-memory JSON document. */
pfopt_status pfopt_campaign_open_json(const char* config_json,
                                      pfopt_campaign** out);

/* Overrides the master seed / output directory from the config. */
pfopt_status pfopt_campaign_set_master_seed(pfopt_campaign* c, uint64_t seed);
pfopt_status pfopt_campaign_set_output_dir(pfopt_campaign* c, const char* dir);

/* Applies a parameter-scale preset: "paper" or "desk". */
pfopt_status pfopt_campaign_apply_scale(pfopt_campaign* c, const char* scale);

/* Serializes the effective config (defaults filled in, overrides applied) as
 * JSON.  Two-call pattern: with buf == NULL, *size receives the required
 * buffer size including the terminating NUL; with buf != NULL, up to *size
 * bytes are written and *size is updated to the full required size. */
pfopt_status pfopt_campaign_config_json(const pfopt_campaign* c, char* buf,
                                        size_t* size);

/* Writes source samples and target moments under the output directory. */
pfopt_status pfopt_campaign_generate(pfopt_campaign* c);

/* Runs every configured strategy x repeat, writing traces, summary CSV, SVG
 * plot, and a JSON run report under the output directory.  Individual repeat
 * failures are recorded in the report; the call fails with
 * PFOPT_ERR_RUNTIME only if every repeat of some strategy failed. */
pfopt_status pfopt_campaign_run(pfopt_campaign* c);

/* Recomputes summary CSV and SVG from traces already under the output
 * directory. */
pfopt_status pfopt_campaign_report(pfopt_campaign* c);

/* Releases the handle (NULL is fine). */
void pfopt_campaign_close(pfopt_campaign* c);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PFOPT_H */
