/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

/*
 * C interface of the cmgrasp library.
 *
 * Functions that can fail return a cmg_status; CMG_OK is zero. On failure
 * cmg_last_error() describes the problem for the calling thread. Strings and
 * buffers returned through out-parameters are heap allocations owned by the
 * caller and released with cmg_free(). Handles are opaque and released with
 * their matching destroy function.
 *
 * Rotations are row-major 3x3 matrices. Compact grasps describe one
 * anchor-finger contact (chart coordinates x, y) plus the joint state of a
 * three-finger hand; fingers are 0-based here and 1-based in files.
 */

#ifndef CMGRASP_CMGRASP_H
#define CMGRASP_CMGRASP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cmg_status {
  CMG_OK = 0,
  CMG_ERROR_IO = 1,
  CMG_ERROR_PARSE = 2,
  CMG_ERROR_INVALID_ARG = 3,
  CMG_ERROR_UNREPRESENTABLE = 4,
  CMG_ERROR_DEGENERATE = 5,
  CMG_ERROR_INTERNAL = 6
} cmg_status;

/* Message for the last failure on this thread; empty string if none. */
const char* cmg_last_error(void);

/* Releases any buffer or string returned by this library. */
void cmg_free(void* ptr);

uint32_t cmg_abi_version(void);

typedef struct cmg_transform {
  double rotation[9]; /* row-major */
  double translation[3];
} cmg_transform;

typedef struct cmg_oriented_point {
  double position[3];
  double normal[3];
} cmg_oriented_point;

typedef struct cmg_compact_grasp {
  int finger; /* anchor finger, 0-based */
  double x, y;
  double spread;
  double inner;
  double support1, support2; /* supports in ascending finger order */
} cmg_compact_grasp;

typedef struct cmg_full_grasp {
  cmg_transform pose;
  double spread;
  double inner[3];
} cmg_full_grasp;

typedef struct cmg_grasp_record {
  int id;
  cmg_transform pose;
  double spread;
  double inner[3];
  cmg_oriented_point contacts[3];
  double x[3], y[3];
  int anchor; /* 0-based */
  double epsilon;
} cmg_grasp_record;

/* ---- hand model ---- */

typedef struct cmg_hand cmg_hand;

cmg_status cmg_hand_load(const char* path, cmg_hand** out);
void cmg_hand_destroy(cmg_hand* hand);
int cmg_hand_finger_count(const cmg_hand* hand);
cmg_status cmg_hand_joint_limits(const cmg_hand* hand, double* spread_min, double* spread_max,
                                 double* inner_min, double* inner_max);

/* ---- contact representation ---- */

/* Canonical frame of a unit direction; columns of the result are the two
 * tangents and the direction itself. */
cmg_status cmg_chart(const double direction[3], double frame[9]);

cmg_status cmg_decode_grasp(const cmg_hand* hand, const cmg_compact_grasp* grasp,
                            const cmg_oriented_point* contact, cmg_full_grasp* out);

/* Inverse of decoding for one finger of a full grasp. The contact supplies
 * the surface normal; its position is re-derived from the fingertip so the
 * pair (compact, contact_out) decodes back to the same pose. */
cmg_status cmg_encode_grasp(const cmg_hand* hand, const cmg_full_grasp* grasp, int finger,
                            const cmg_oriented_point* contact, cmg_compact_grasp* out,
                            cmg_oriented_point* contact_out);

/* ---- wrench-space quality ---- */

/* Builds the unit friction cone wrenches of a contact set: 6 doubles per
 * wrench, cone_edges wrenches per contact. The buffer is released with
 * cmg_free. */
cmg_status cmg_contact_wrenches(const cmg_oriented_point* contacts, size_t contact_count,
                                double mu, int cone_edges, double lambda,
                                const double torque_origin[3], double** wrenches_out,
                                size_t* wrench_count_out);

/* Exact radius of the largest origin-centered ball inside the wrench hull. */
cmg_status cmg_epsilon_quality(const double* wrenches, size_t wrench_count, double* out);

/* Sampled upper bound of the same radius; never below the exact value. */
cmg_status cmg_epsilon_oracle(const double* wrenches, size_t wrench_count, int directions,
                              uint64_t seed, double* out);

/* ---- meshes ---- */

typedef struct cmg_mesh cmg_mesh;

cmg_status cmg_mesh_load(const char* path, double scale, cmg_mesh** out);
void cmg_mesh_destroy(cmg_mesh* mesh);
size_t cmg_mesh_vertex_count(const cmg_mesh* mesh);
size_t cmg_mesh_triangle_count(const cmg_mesh* mesh);

/* ---- grasp annotation files ---- */

typedef struct cmg_grasp_list cmg_grasp_list;

cmg_status cmg_grasp_list_load(const char* path, cmg_grasp_list** out);
void cmg_grasp_list_destroy(cmg_grasp_list* list);
size_t cmg_grasp_list_count(const cmg_grasp_list* list);
cmg_status cmg_grasp_list_get(const cmg_grasp_list* list, size_t index, cmg_grasp_record* out);

/* ---- dataset pipeline ----
 *
 * Option fields set to negative values (or zero where zero is meaningless)
 * fall back to the library defaults. Reports come back as JSON strings.
 */

typedef struct cmg_sample_grasps_options {
  const char* registry_path;
  const char* hand_path;
  const char* out_dir;
  double tau;          /* < 0: default 0.05 */
  double mu;           /* <= 0: default 0.5 */
  int cone_edges;      /* <= 0: default 8 */
  double sample_voxel; /* <= 0: default 0.01 */
  int target_count;    /* <= 0: default 100 */
  uint64_t seed;
} cmg_sample_grasps_options;

cmg_status cmg_run_sample_grasps(const cmg_sample_grasps_options* options, char** report_out);

typedef struct cmg_build_scene_options {
  const char* registry_path;
  const char* out_path;
  int count;        /* <= 0: default 3 */
  double extent;    /* < 0: default 0.3 */
  double clearance; /* < 0: default 0.005 */
  int max_tries;    /* <= 0: default 100 */
  uint64_t seed;
} cmg_build_scene_options;

cmg_status cmg_run_build_scene(const cmg_build_scene_options* options, char** report_out);

typedef struct cmg_render_options {
  const char* scene_path;
  const char* annotations_dir;
  const char* hand_path;
  const char* out_dir;
  const char* prefix; /* NULL: "capture" */
  int points;         /* <= 0: default 20000 */
  uint64_t seed;
  int width, height;     /* <= 0: defaults 640x480 */
  double fx, fy;         /* <= 0: default 600 */
  double cx, cy;         /* < 0: defaults for 640x480 */
} cmg_render_options;

cmg_status cmg_run_render(const cmg_render_options* options, char** report_out);

typedef struct cmg_validate_options {
  const char* annotations_path; /* exactly one of these two is non-NULL */
  const char* capture_path;
  const char* hand_path; /* optional override, may be NULL */
  double pose_tolerance;     /* <= 0: default 1e-6 */
  double surface_tolerance;  /* <= 0: default 1e-3 */
  double penetration_max;    /* <= 0: default 1e-3 */
} cmg_validate_options;

/* CMG_OK even when checks fail; *passed_out carries the verdict. */
cmg_status cmg_run_validate(const cmg_validate_options* options, int* passed_out,
                            char** report_out);

typedef struct cmg_eval_quality_options {
  const char* annotations_path;
  int samples;           /* <= 0: default 20 */
  int oracle_directions; /* <= 0: default 4096 */
  uint64_t seed;
} cmg_eval_quality_options;

cmg_status cmg_run_eval_quality(const cmg_eval_quality_options* options, char** report_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CMGRASP_CMGRASP_H */
