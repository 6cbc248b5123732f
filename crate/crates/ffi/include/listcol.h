#ifndef LISTCOL_H
#define LISTCOL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ListcolAlgorithm {
  LISTCOL_ALGORITHM_BRUTE = 0,
  LISTCOL_ALGORITHM_DP = 1,
  LISTCOL_ALGORITHM_LOG2 = 2,
  LISTCOL_ALGORITHM_LOG = 3,
  LISTCOL_ALGORITHM_PATHWIDTH = 4,
  LISTCOL_ALGORITHM_TPW = 5,
} ListcolAlgorithm;

typedef enum ListcolStatus {
  LISTCOL_STATUS_OK = 0,
  LISTCOL_STATUS_NULL_POINTER = 1,
  LISTCOL_STATUS_INVALID_UTF8 = 2,
  LISTCOL_STATUS_PARSE = 3,
  LISTCOL_STATUS_NOT_A_TREE = 4,
  LISTCOL_STATUS_INVALID_PARTITION = 5,
  LISTCOL_STATUS_REFUSED = 6,
  LISTCOL_STATUS_ORACLE_BUDGET = 7,
  LISTCOL_STATUS_INVALID = 8,
  LISTCOL_STATUS_PANIC = 9,
} ListcolStatus;

/**
 * Opaque instance handle.
 */
typedef struct ListcolInstance ListcolInstance;

/**
 * Opaque tree-partition handle.
 */
typedef struct ListcolPartition ListcolPartition;

/**
 * Meter peaks of one solve.
 */
typedef struct ListcolPeaks {
  uint64_t peak_persistent_bits;
  uint64_t peak_scratch_bits;
  uint64_t scratch_violations;
} ListcolPeaks;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an instance from its text format.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ListcolStatus listcol_instance_parse(const char *src, struct ListcolInstance **out);

/**
 * # Safety
 * `inst` must come from [`listcol_instance_parse`] and not be freed twice.
 */
void listcol_instance_free(struct ListcolInstance *inst);

/**
 * Number of vertices, 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t listcol_instance_vertex_count(const struct ListcolInstance *inst);

/**
 * Parses a tree-partition.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ListcolStatus listcol_partition_parse(const char *src, struct ListcolPartition **out);

/**
 * # Safety
 * `tp` must come from [`listcol_partition_parse`] and not be freed twice.
 */
void listcol_partition_free(struct ListcolPartition *tp);

/**
 * Decides colourability. `partition` may be null; `tpw` then uses one
 * bag per vertex. `peaks` may be null.
 *
 * # Safety
 * Handles must be live; `answer` must be valid, `peaks` null or valid.
 */
enum ListcolStatus listcol_solve(const struct ListcolInstance *inst,
                                 enum ListcolAlgorithm alg,
                                 const struct ListcolPartition *partition,
                                 bool *answer,
                                 struct ListcolPeaks *peaks);

/**
 * Copies the last error message (NUL-terminated, truncated to fit) into
 * `buf` and returns the full message length without the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t listcol_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LISTCOL_H */
