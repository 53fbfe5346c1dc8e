/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef ECHOSTICK_H
#define ECHOSTICK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EsAdvisory {
  ES_ADVISORY_MOVE_FORWARD = 0,
  ES_ADVISORY_MOVE_FORWARD_CAUTION = 1,
  ES_ADVISORY_UP_STAIRS_AHEAD = 2,
  ES_ADVISORY_KNEE_OBSTACLE_AHEAD = 3,
  ES_ADVISORY_TOE_OBSTACLE_AHEAD = 4,
  ES_ADVISORY_ALTERNATE_PATH = 5,
  ES_ADVISORY_STOP_IMMEDIATELY = 6,
  ES_ADVISORY_UPPER_OBSTACLE_HEAD = 7,
  ES_ADVISORY_UPPER_OBSTACLE_CHEST = 8,
  ES_ADVISORY_UPPER_OBSTACLE_WAIST = 9,
  ES_ADVISORY_UPPER_OBSTACLE_UNKNOWN = 10,
} EsAdvisory;

typedef enum EsStatus {
  ES_STATUS_OK = 0,
  ES_STATUS_NULL_POINTER = 1,
  ES_STATUS_INVALID_UTF8 = 2,
  ES_STATUS_PARSE_ERROR = 3,
  ES_STATUS_VALIDATION_ERROR = 4,
  ES_STATUS_DOMAIN_ERROR = 5,
  ES_STATUS_PANIC = 6,
} EsStatus;

typedef enum EsUpperLevel {
  ES_UPPER_LEVEL_NONE = 0,
  ES_UPPER_LEVEL_HEAD = 1,
  ES_UPPER_LEVEL_CHEST = 2,
  ES_UPPER_LEVEL_WAIST = 3,
  ES_UPPER_LEVEL_UNKNOWN = 4,
} EsUpperLevel;

// Parsed scenario file.
typedef struct EsScenario EsScenario;

// Running simulation.
typedef struct EsSimulator EsSimulator;

// Echo distance in cm; `distance_cm` is meaningless when `has_echo` is false.
typedef struct EsReading {
  bool has_echo;
  double distance_cm;
} EsReading;

typedef struct EsStairDetection {
  bool upstairs;
  bool knee_bit;
  bool toe_bit;
} EsStairDetection;

typedef struct EsDepthClass {
  uint8_t brz_p;
  enum EsAdvisory advisory;
} EsDepthClass;

// One tick of simulator output.
typedef struct EsFrame {
  uint64_t tick;
  uint64_t t_ms;
  double user_x;
  struct EsReading chest;
  struct EsReading knee;
  struct EsReading toe;
  struct EsReading arch;
  uint8_t brz_c;
  uint8_t brz_k;
  uint8_t brz_t;
  uint8_t brz_p;
  bool upstairs;
  bool downstep;
  enum EsUpperLevel inferred;
  enum EsAdvisory advisory;
} EsFrame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL. The pointer
// stays valid until the next call into the library on the same thread.
const char *es_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *es_version(void);

// Forward distance at which two stacked sensor cones first overlap.
//
// # Safety
// `out` must be a valid pointer to a `double`.
enum EsStatus es_overlap_distance(double h_upper,
                                  double h_lower,
                                  double divergence_deg,
                                  double *out);

uint8_t es_classify_chest(struct EsReading r);

uint8_t es_classify_knee(struct EsReading r);

uint8_t es_classify_toe(struct EsReading r);

struct EsStairDetection es_detect_upstairs(struct EsReading knee, struct EsReading toe);

struct EsDepthClass es_classify_depth(double depth_cm);

bool es_is_downstep(double depth_cm);

// Parses scenario text into a new handle stored in `*out`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum EsStatus es_scenario_parse(const char *text, struct EsScenario **out);

// # Safety
// `scenario` must come from [`es_scenario_parse`] and not be used afterwards.
void es_scenario_free(struct EsScenario *scenario);

// Runs the scenario's walk and returns the CSV trace in `*out`.
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer. The returned
// string must be released with [`es_string_free`].
enum EsStatus es_scenario_run_trace(const struct EsScenario *scenario, char **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void es_string_free(char *s);

// Creates a step-by-step simulator from a scenario's scene and configuration.
// The scenario's walk segments are ignored; drive it with [`es_simulator_tick`].
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
enum EsStatus es_simulator_new(const struct EsScenario *scenario, struct EsSimulator **out);

// Runs one tick at `speed_cm_s` and writes the result to `*out`.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum EsStatus es_simulator_tick(struct EsSimulator *sim, double speed_cm_s, struct EsFrame *out);

// # Safety
// `sim` must come from [`es_simulator_new`] and not be used afterwards.
void es_simulator_free(struct EsSimulator *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ECHOSTICK_H */
