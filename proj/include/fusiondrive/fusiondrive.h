#ifndef FUSIONDRIVE_FUSIONDRIVE_H
#define FUSIONDRIVE_FUSIONDRIVE_H

#include <stddef.h>
#include <stdint.h>

#if defined(FUSIONDRIVE_BUILDING)
#define FD_API __attribute__((visibility("default")))
#else
#define FD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fd_status {
  FD_OK = 0,
  FD_ERR_INVALID_ARGUMENT = 1,
  FD_ERR_SHAPE_MISMATCH = 2,
  FD_ERR_PLACEMENT_INFEASIBLE = 3,
  FD_ERR_UNREACHABLE_GOAL = 4,
  FD_ERR_OFF_ROUTE = 5,
  FD_ERR_EMPTY_INPUT = 6,
  FD_ERR_UNKNOWN_COMMAND = 7,
  FD_ERR_UNKNOWN_VARIANT = 8,
  FD_ERR_DIVERGENCE = 9,
  FD_ERR_IO = 10,
  FD_ERR_CONFIG = 11,
  FD_ERR_MISSING_ARTIFACT = 12,
  FD_ERR_NO_SUCCESSFUL_EPISODES = 13,
  FD_ERR_INTERNAL = 14
} fd_status;

/* Navigation commands, in policy-branch order. */
typedef enum fd_command {
  FD_CMD_STRAIGHT = 0,
  FD_CMD_LANE_FOLLOW = 1,
  FD_CMD_TURN_RIGHT = 2,
  FD_CMD_TURN_LEFT = 3
} fd_command;

typedef struct fd_config fd_config;
typedef struct fd_model fd_model;

/* Receives one progress line; the pointer is valid only during the call. */
typedef void (*fd_log_fn)(const char* line, void* user);

FD_API const char* fd_version(void);
FD_API const char* fd_status_name(fd_status status);
/* Message of the last failed call on this thread ("" when none). */
FD_API const char* fd_last_error(void);
/* Frees strings returned through char** out parameters. */
FD_API void fd_string_free(char* s);

/* Run configuration. */
FD_API fd_status fd_config_new(fd_config** out);
FD_API fd_status fd_config_load(const char* path, fd_config** out);
FD_API fd_status fd_config_save(const fd_config* config, const char* path);
/* "a.b.c=value" with value parsed as JSON, otherwise taken as a string. */
FD_API fd_status fd_config_set(fd_config* config, const char* assignment);
/* Resets the benchmark section to the default corl2017 or nocrash spec. */
FD_API fd_status fd_config_set_benchmark_style(fd_config* config, const char* style, const char* town,
                                               const char* weather_set);
/* JSON text of one value, addressed as "a.b.c". */
FD_API fd_status fd_config_get(const fd_config* config, const char* key, char** out_json);
FD_API fd_status fd_config_to_json(const fd_config* config, char** out_json);
FD_API void fd_config_free(fd_config* config);

/* Pipeline stages; artifacts go to the configured directories. */
FD_API fd_status fd_collect(const fd_config* config, int episodes, uint64_t seed, fd_log_fn log, void* user);
FD_API fd_status fd_prepare(const fd_config* config, uint64_t seed, fd_log_fn log, void* user);
/* variant: "MSFSU", "MSF" or "SU". */
FD_API fd_status fd_train(const fd_config* config, const char* variant, uint64_t seed, fd_log_fn log, void* user);
/* variant: "MSFSU", "MSF", "SU" or "expert". */
FD_API fd_status fd_bench(const fd_config* config, const char* variant, uint64_t seed, fd_log_fn log, void* user);
FD_API fd_status fd_ablate(const fd_config* config, uint64_t seed, fd_log_fn log, void* user);
/* Re-simulates one archived benchmark episode into PNG frames and plots.
   max_frames < 0 writes every frame_stride-th frame. */
FD_API fd_status fd_replay(const fd_config* config, const char* archive_dir, const char* task, int route,
                           int repetition, const char* out_dir, int frame_stride, int max_frames, fd_log_fn log,
                           void* user);

/* Trained models. */
FD_API fd_status fd_model_load(const char* checkpoint, fd_model** out);
FD_API fd_status fd_model_summary(const fd_model* model, char** out_text);
/* rgb: height x width x 3, depth: height x width, both row-major in [0, 1].
   semantics (optional, may be NULL): size x size class ids, size = model input size. */
FD_API fd_status fd_model_predict(fd_model* model, const float* rgb, const float* depth, int width, int height,
                                  fd_command command, float* steer, float* speed, uint8_t* semantics);
FD_API int fd_model_input_size(const fd_model* model);
FD_API void fd_model_free(fd_model* model);

/* Low-level control helpers. */
FD_API double fd_denormalize_steer(double steer_norm);

#ifdef __cplusplus
}
#endif

#endif
