/* C interface for the clap shared library.
 *
 * Every function returns a clap_status; CLAP_OK means success. On failure the
 * thread-local message from clap_last_error() describes what went wrong.
 * Strings returned through out-parameters are heap-allocated and must be
 * released with clap_string_free(); domains with clap_domain_free().
 */
#ifndef CLAP_CAPI_H
#define CLAP_CAPI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clap_status {
  CLAP_OK = 0,
  CLAP_ERR_INVALID_ARG = 1,
  CLAP_ERR_PARSE = 2,
  CLAP_ERR_VALIDATION = 3,
  CLAP_ERR_IO = 4,
  CLAP_ERR_RUNTIME = 5
} clap_status;

typedef struct clap_domain clap_domain; /* opaque lifted-domain handle */

const char* clap_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* clap_last_error(void);

clap_status clap_domain_parse(const char* text, clap_domain** out);
clap_status clap_domain_parse_file(const char* path, clap_domain** out);
clap_status clap_domain_serialize(const clap_domain* d, char** out_text);
void clap_domain_free(clap_domain* d);

/* Applies `chain` successive random mutations (seeded by `seed`) and returns
 * the final domain plus a JSON array describing every mutation record. Either
 * out-parameter may be NULL when the caller does not need it. */
clap_status clap_mutate_chain(const clap_domain* d, uint64_t seed, int chain,
                              clap_domain** out_domain, char** out_spec_json);

/* Runs the full benchmark described by a plain-text key=value manifest and
 * writes metrics.jsonl, aggregate.csv and curves.svg under its `out` dir. */
clap_status clap_run_experiment(const char* manifest_path);

/* Re-aggregates an existing metrics.jsonl into a CSV. */
clap_status clap_report(const char* metrics_path, const char* csv_path);

/* Renders learning curves from an existing metrics.jsonl as SVG. */
clap_status clap_plot(const char* metrics_path, const char* svg_path);

void clap_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CLAP_CAPI_H */
