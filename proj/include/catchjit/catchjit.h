#ifndef CATCHJIT_CATCHJIT_H
#define CATCHJIT_CATCHJIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define CATCHJIT_API __attribute__((visibility("default")))
#else
#define CATCHJIT_API
#endif

typedef enum catchjit_status {
  CATCHJIT_OK = 0,
  CATCHJIT_ERR_CONFIG = 1,
  CATCHJIT_ERR_CORPUS = 2,
  CATCHJIT_ERR_BACKEND = 3,
  CATCHJIT_ERR_REPORT = 4,
  CATCHJIT_ERR_NOT_FOUND = 5,
  CATCHJIT_ERR_INVALID_ARGUMENT = 6,
  CATCHJIT_ERR_IO = 7,
  CATCHJIT_ERR_INTERNAL = 8
} catchjit_status;

typedef struct catchjit_config catchjit_config;
typedef struct catchjit_report catchjit_report;

/* Message for the last failing call on this thread; never NULL. */
CATCHJIT_API const char* catchjit_last_error(void);
CATCHJIT_API const char* catchjit_version(void);
CATCHJIT_API const char* catchjit_status_name(catchjit_status status);

/* Strings returned through char** out-parameters are owned by the caller. */
CATCHJIT_API void catchjit_string_free(char* text);

CATCHJIT_API catchjit_status catchjit_config_load(const char* path, catchjit_config** out);
CATCHJIT_API catchjit_status catchjit_config_parse(const char* json_text, catchjit_config** out);
CATCHJIT_API catchjit_status catchjit_config_set_corpus(catchjit_config* config, const char* path);
/* Applies CATCHJIT_SEED when set. */
CATCHJIT_API catchjit_status catchjit_config_apply_environment(catchjit_config* config);
CATCHJIT_API catchjit_status catchjit_config_to_json(const catchjit_config* config, char** out);
CATCHJIT_API void catchjit_config_free(catchjit_config* config);

CATCHJIT_API catchjit_status catchjit_run(const catchjit_config* config, catchjit_report** out);
CATCHJIT_API catchjit_status catchjit_report_load(const char* path, catchjit_report** out);
CATCHJIT_API catchjit_status catchjit_report_write(const catchjit_report* report, const char* path);
CATCHJIT_API catchjit_status catchjit_report_to_json(const catchjit_report* report, char** out);
/* Serialized report without the timestamp field. */
CATCHJIT_API catchjit_status catchjit_report_canonical(const catchjit_report* report, char** out);
CATCHJIT_API size_t catchjit_report_assessment_count(const catchjit_report* report);
/* Newline-separated problems; empty when the counters are consistent. */
CATCHJIT_API catchjit_status catchjit_report_check(const catchjit_report* report, char** out);
/* CATCHJIT_ERR_NOT_FOUND for an unknown weak-catch id. */
CATCHJIT_API catchjit_status catchjit_report_render_assessment(const catchjit_report* report, const char* id,
                                                               char** out);
/* CATCHJIT_ERR_REPORT when the report has no assessments. */
CATCHJIT_API catchjit_status catchjit_report_render_stats(const catchjit_report* report, char** out);
CATCHJIT_API void catchjit_report_free(catchjit_report* report);

/* Number of loadable cases and newline-separated problems. */
CATCHJIT_API catchjit_status catchjit_corpus_validate(const char* path, int* cases, char** problems);

#ifdef __cplusplus
}
#endif

#endif
