// SPDX-License-Identifier: Apache-2.0
//
// wavescope - indoor RF ray tracing and WiFi radio-map simulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef WAVESCOPE_H
#define WAVESCOPE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define WS_API __declspec(dllexport)
#else
#define WS_API __attribute__((visibility("default")))
#endif

typedef enum ws_status
{
    WS_OK = 0,
    WS_ERR_ARGUMENT = 1,
    WS_ERR_SCHEMA = 2,
    WS_ERR_NOT_FOUND = 3,
    WS_ERR_STREAM_MISMATCH = 4,
    WS_ERR_IO = 5,
    WS_ERR_INTERNAL = 6
} ws_status;

typedef struct ws_scene ws_scene;
typedef struct ws_radiomap ws_radiomap;

typedef struct ws_prop_config
{
    int max_depth;
    double min_power_dbm;
    int tessellation_order;
    int max_diffraction_order;
    double noise_floor_dbm;
    int quantize_rss;
    int bidirectional;
} ws_prop_config;

typedef struct ws_grid
{
    double x0, y0;  /* centre of the first cell */
    double resolution;
    int nx, ny;
    double z;
} ws_grid;

/* Zero/NULL fields keep the suite defaults. */
typedef struct ws_suite_options
{
    uint64_t seed;
    double noise_sigma_db;      /* < 0: default */
    int samples_per_location;   /* 0: default */
    double frequency_hz;        /* 0: every frequency */
    const char *mounting;       /* NULL: both mountings */
    int threads;                /* 0: hardware concurrency */
    const char *fixtures;       /* NULL: WAVESCOPE_FIXTURES or the built-in directory */
    const ws_prop_config *propagation;
} ws_suite_options;

WS_API const char *ws_version(void);

/* Message and JSON pointer of the last failure on this thread. */
WS_API const char *ws_last_error(void);
WS_API const char *ws_last_error_pointer(void);

/* Strings returned through char** belong to the caller. */
WS_API void ws_string_free(char *s);

WS_API void ws_prop_config_default(ws_prop_config *out);
WS_API ws_status ws_prop_config_parse(const char *document, ws_prop_config *out);

WS_API ws_status ws_scene_load(const char *path, ws_scene **out);
WS_API ws_status ws_scene_parse(const char *document, ws_scene **out);
WS_API ws_status ws_scene_save(const ws_scene *scene, const char *path);
WS_API ws_status ws_scene_serialize(const ws_scene *scene, char **out);
WS_API ws_status ws_scene_digest(const ws_scene *scene, char **out);
WS_API void ws_scene_free(ws_scene *scene);

/* kind: "device-based" | "device-free"; mounting: "wall" | "ceiling". */
WS_API ws_status ws_testbed_scene(const char *kind, const char *mounting, ws_scene **out);
WS_API ws_status ws_write_fixtures(const char *directory);

/* Sets the carrier frequency of every transceiver. */
WS_API ws_status ws_scene_set_frequency(ws_scene *scene, double frequency_hz);
/* Moves the access points to wall (1.5 m) or ceiling height. */
WS_API ws_status ws_scene_set_mounting(ws_scene *scene, const char *mounting);

WS_API ws_status ws_predict_rss(const ws_scene *scene, const char *tx_id, const char *rx_id,
                                const ws_prop_config *config, double *out_dbm);
/* Receiver with the tx's antenna settings placed at (x, y, z). */
WS_API ws_status ws_predict_at(const ws_scene *scene, const char *tx_id, double x, double y, double z,
                               const ws_prop_config *config, double *out_dbm);

WS_API ws_status ws_grid_over(const ws_scene *scene, double resolution, double z, ws_grid *out);
/* Heatmap CSV (x,y,rss_dbm) with a metadata header. */
WS_API ws_status ws_heatmap(const ws_scene *scene, const char *tx_id, const ws_grid *grid,
                            const ws_prop_config *config, int threads, char **out_csv);

/* kind: "active" | "passive". Uses every AP, MP and radio-map location of the scene. */
WS_API ws_status ws_build_map(const ws_scene *scene, const char *kind, const ws_prop_config *config, int threads,
                              ws_radiomap **out);
WS_API ws_status ws_radiomap_load(const char *path, ws_radiomap **out);
WS_API ws_status ws_radiomap_parse(const char *document, ws_radiomap **out);
/* digits < 0 keeps full precision. */
WS_API ws_status ws_radiomap_serialize(const ws_radiomap *map, int digits, char **out);
WS_API ws_status ws_radiomap_save(const ws_radiomap *map, const char *path);
WS_API void ws_radiomap_free(ws_radiomap *map);

/* observation: "AP1>MP1=-40.5,AP2>MP1=-51". */
WS_API ws_status ws_localize(const ws_radiomap *map, const char *observation, int *out_location,
                             double out_position[3], double *out_distance_db);
/* Noisy samples of `test` localized against `train`; out_detail is the per-observation CSV. */
WS_API ws_status ws_evaluate(const ws_radiomap *train, const ws_radiomap *test, int samples, double sigma_db,
                             uint64_t seed, int threads, double *out_mean_error, char **out_detail);

/* kind: "device-based" | "device-free" | "all". Writes the output tree and returns the summary. */
WS_API ws_status ws_run_suite(const char *kind, const ws_suite_options *options, const char *out_dir,
                              char **out_summary);
/* Scenario config document; out_dir may be NULL. */
WS_API ws_status ws_run_scenario(const char *config_document, const char *fixtures, int threads, const char *out_dir,
                                 char **out_report);

/* Blocks serving HTTP until the process ends. secret may be NULL. */
WS_API ws_status ws_serve(const char *host, int port, const char *fixtures, int threads, const char *secret);

#ifdef __cplusplus
}
#endif

#endif
