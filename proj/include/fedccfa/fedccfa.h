/* C interface to the fedccfa simulator. Every call returns a status code;
 * on failure fedccfa_last_error() describes the problem for the calling
 * thread. Handles are opaque and owned by the caller. */
#ifndef FEDCCFA_FEDCCFA_H
#define FEDCCFA_FEDCCFA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FEDCCFA_API __declspec(dllexport)
#else
#define FEDCCFA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fedccfa_status {
    FEDCCFA_OK = 0,
    FEDCCFA_ERR_CONFIG = 1,     /* bad key, value or combination */
    FEDCCFA_ERR_INVARIANT = 2,  /* runtime invariant breach */
    FEDCCFA_ERR_DATA = 3,       /* malformed or insufficient data */
    FEDCCFA_ERR_IO = 4,
    FEDCCFA_ERR_CONTRACT = 5,   /* caller passed inconsistent shapes or null handles */
    FEDCCFA_ERR_DEGENERATE = 6, /* zero-norm anchor in the alignment loss */
    FEDCCFA_ERR_INTERNAL = 7
} fedccfa_status;

typedef struct fedccfa_config fedccfa_config;
typedef struct fedccfa_simulation fedccfa_simulation;
typedef struct fedccfa_summary fedccfa_summary;

typedef struct fedccfa_round_info {
    size_t round;
    int evaluated;
    double mean_accuracy;
    double extractor_delta_norm;
    int has_rand_index;
    double rand_index;
    double mean_alignment_weight;
} fedccfa_round_info;

FEDCCFA_API const char* fedccfa_version(void);
FEDCCFA_API const char* fedccfa_last_error(void);
FEDCCFA_API const char* fedccfa_status_name(fedccfa_status status);

FEDCCFA_API fedccfa_status fedccfa_config_default(fedccfa_config** out);
FEDCCFA_API fedccfa_status fedccfa_config_load(const char* path, fedccfa_config** out);
FEDCCFA_API fedccfa_status fedccfa_config_parse(const char* text, fedccfa_config** out);
FEDCCFA_API fedccfa_status fedccfa_config_set(fedccfa_config* config, const char* key,
                                              const char* value);
FEDCCFA_API fedccfa_status fedccfa_config_validate(const fedccfa_config* config);
/* Writes key=value text into buf (NUL-terminated, truncated to cap) and the
 * full length, excluding the NUL, into *length. buf may be NULL when cap is 0. */
FEDCCFA_API fedccfa_status fedccfa_config_serialize(const fedccfa_config* config, char* buf,
                                                    size_t cap, size_t* length);
FEDCCFA_API void fedccfa_config_free(fedccfa_config* config);

/* Runs every configured seed and writes metrics.csv and summary.jsonl. */
FEDCCFA_API fedccfa_status fedccfa_run(const fedccfa_config* config, fedccfa_summary** out);
FEDCCFA_API size_t fedccfa_summary_seed_count(const fedccfa_summary* summary);
/* NaN for an out-of-range index. */
FEDCCFA_API double fedccfa_summary_final_accuracy(const fedccfa_summary* summary, size_t index);
FEDCCFA_API double fedccfa_summary_mean(const fedccfa_summary* summary);
FEDCCFA_API double fedccfa_summary_std(const fedccfa_summary* summary);
FEDCCFA_API const char* fedccfa_summary_metrics_path(const fedccfa_summary* summary);
FEDCCFA_API void fedccfa_summary_free(fedccfa_summary* summary);

/* Round-by-round driving of a single seed. */
FEDCCFA_API fedccfa_status fedccfa_simulation_create(const fedccfa_config* config, uint64_t seed,
                                                     fedccfa_simulation** out);
FEDCCFA_API fedccfa_status fedccfa_simulation_step(fedccfa_simulation* sim,
                                                   fedccfa_round_info* info);
FEDCCFA_API size_t fedccfa_simulation_client_count(const fedccfa_simulation* sim);
FEDCCFA_API fedccfa_status fedccfa_simulation_accuracies(const fedccfa_simulation* sim,
                                                         double* out, size_t count);
FEDCCFA_API void fedccfa_simulation_free(fedccfa_simulation* sim);

/* One polyline per (file, seed) of the named column against round. */
FEDCCFA_API fedccfa_status fedccfa_plot(const char* const* csv_paths, size_t path_count,
                                        const char* column, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* FEDCCFA_FEDCCFA_H */
