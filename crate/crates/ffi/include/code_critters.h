#ifndef CODE_CRITTERS_H
#define CODE_CRITTERS_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_ARGUMENT = 1,
  CC_STATUS_INVALID_UTF8 = 2,
  CC_STATUS_DECODE = 3,
  CC_STATUS_INVALID_LEVEL = 4,
  CC_STATUS_INVALID_CONFIG = 5,
  CC_STATUS_ANALYSIS = 6,
  CC_STATUS_NOT_RUNNING = 7,
  CC_STATUS_NOT_FINISHED = 8,
  CC_STATUS_INTERNAL = 9,
  CC_STATUS_PANIC = 10,
} CcStatus;

/**
 * A game in progress or finished.
 */
typedef struct CcGame CcGame;

/**
 * A decoded level.
 */
typedef struct CcLevel CcLevel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *cc_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cc_string_free(char *s);

/**
 * Decodes a level document. The level is not validated.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CcStatus cc_level_from_json(const char *json, struct CcLevel **out);

/**
 * # Safety
 * `level` must come from [`cc_level_from_json`] and not have been freed.
 */
void cc_level_free(struct CcLevel *level);

/**
 * Writes the validation issues as a JSON array to `out`. Returns
 * `INVALID_LEVEL` when any issue is an error; `out` is written either way.
 *
 * # Safety
 * `level` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_level_validate(const struct CcLevel *level, char **out);

/**
 * Writes the analysis report as JSON to `out`.
 *
 * # Safety
 * `level` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_level_analyze(const struct CcLevel *level, size_t route_cap, char **out);

/**
 * Starts a game. `mines_json` may be null for no mines.
 *
 * # Safety
 * `level` must be a live handle; `mines_json` null or NUL-terminated;
 * `out` must be writable.
 */
enum CcStatus cc_game_new(const struct CcLevel *level,
                          const char *mines_json,
                          uint64_t seed,
                          struct CcGame **out);

/**
 * Advances one tick. Returns `NOT_RUNNING` once the game has finished.
 *
 * # Safety
 * `game` must be a live handle.
 */
enum CcStatus cc_game_tick(struct CcGame *game);

/**
 * Runs until every critter is saved or trapped.
 *
 * # Safety
 * `game` must be a live handle.
 */
enum CcStatus cc_game_run(struct CcGame *game);

/**
 * False for a null handle.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
bool cc_game_is_finished(const struct CcGame *game);

/**
 * Writes the event log so far as a JSON array.
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_game_events_json(const struct CcGame *game, char **out);

/**
 * Writes the score report. Returns `NOT_FINISHED` while the game runs.
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum CcStatus cc_game_score_json(const struct CcGame *game, char **out);

/**
 * # Safety
 * `game` must come from [`cc_game_new`] and not have been freed.
 */
void cc_game_free(struct CcGame *game);

/**
 * Plays a whole game from JSON documents and writes the score report.
 *
 * # Safety
 * `level_json` must be NUL-terminated; `mines_json` null or NUL-terminated;
 * `out` must be writable.
 */
enum CcStatus cc_run_level(const char *level_json,
                           const char *mines_json,
                           uint64_t seed,
                           char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CODE_CRITTERS_H */
