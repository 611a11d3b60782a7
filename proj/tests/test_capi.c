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

#include <wavescope/wavescope.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define CHECK(cond)                                                                   \
    do                                                                                \
    {                                                                                 \
        if (!(cond))                                                                  \
        {                                                                             \
            fprintf(stderr, "%s:%d: CHECK(%s) failed [%s]\n", __FILE__, __LINE__, #cond, \
                    ws_last_error());                                                 \
            ++failures;                                                               \
        }                                                                             \
    } while (0)

static const char *scene_doc =
    "{\"format\": \"wavescope-scene\", \"version\": 1,"
    " \"bounds\": {\"min\": [-5, -5, 0], \"max\": [5, 5, 3]}, \"ceiling_height_m\": 3,"
    " \"transceivers\": ["
    "  {\"id\": \"AP1\", \"role\": \"access_point\", \"position\": [0, 0, 1.2]},"
    "  {\"id\": \"AP2\", \"role\": \"access_point\", \"position\": [3, 3, 1.2]},"
    "  {\"id\": \"RX\", \"role\": \"tracked_device\", \"position\": [1, 0, 1.2]}],"
    " \"radiomap_locations\": [{\"id\": 1, \"position\": [1, 0, 0]}, {\"id\": 2, \"position\": [-2, 1, 0]}]}";

static void test_errors(void)
{
    ws_scene *s = NULL;
    CHECK(ws_scene_parse("{", &s) == WS_ERR_SCHEMA);
    CHECK(s == NULL);
    CHECK(strlen(ws_last_error()) > 0);
    CHECK(ws_scene_parse("{\"bounds\": {\"min\": [0,0,0], \"max\": [1,1,1]}}", &s) == WS_ERR_SCHEMA);
    CHECK(strcmp(ws_last_error_pointer(), "/ceiling_height_m") == 0);
    CHECK(ws_scene_load("/nonexistent/scene.json", &s) == WS_ERR_IO);
    CHECK(ws_scene_parse(NULL, &s) == WS_ERR_ARGUMENT);
    CHECK(ws_testbed_scene("device-based", "floor", &s) == WS_ERR_ARGUMENT);
}

static void test_predict(void)
{
    ws_scene *s = NULL;
    ws_prop_config cfg;
    double rss = 0, rss57 = 0;
    ws_prop_config_default(&cfg);
    CHECK(cfg.max_depth == 4 && cfg.tessellation_order == 4);
    CHECK(ws_scene_parse(scene_doc, &s) == WS_OK);

    CHECK(ws_predict_rss(s, "AP1", "RX", &cfg, &rss) == WS_OK);
    CHECK(fabs(rss - -31.0) < 0.5);
    CHECK(ws_predict_at(s, "AP1", 1, 0, 1.2, &cfg, &rss57) == WS_OK);
    CHECK(rss57 == rss);
    CHECK(ws_predict_rss(s, "AP9", "RX", &cfg, &rss) == WS_ERR_NOT_FOUND);
    CHECK(strstr(ws_last_error(), "AP9") != NULL);
    CHECK(ws_predict_rss(s, "RX", "AP1", &cfg, &rss) == WS_ERR_ARGUMENT);

    CHECK(ws_scene_set_frequency(s, 5.7e9) == WS_OK);
    CHECK(ws_predict_rss(s, "AP1", "RX", &cfg, &rss57) == WS_OK);
    CHECK(fabs((rss - rss57) - 20.0 * log10(5.7 / 2.4)) < 0.3);

    cfg.tessellation_order = 99;
    CHECK(ws_predict_rss(s, "AP1", "RX", &cfg, &rss) == WS_ERR_ARGUMENT);
    ws_scene_free(s);
}

static void test_heatmap(void)
{
    ws_scene *s = NULL;
    ws_grid g;
    char *csv = NULL;
    int lines = 0;
    CHECK(ws_scene_parse(scene_doc, &s) == WS_OK);
    CHECK(ws_grid_over(s, 1.0, 1.2, &g) == WS_OK);
    CHECK(g.nx == 10 && g.ny == 10);
    g.nx = 2;
    g.ny = 2;
    CHECK(ws_heatmap(s, "AP1", &g, NULL, 1, &csv) == WS_OK);
    for (const char *p = csv; p && *p; ++p)
        lines += *p == '\n';
    CHECK(lines == 6 + 4);
    ws_string_free(csv);
    g.nx = 0;
    CHECK(ws_heatmap(s, "AP1", &g, NULL, 1, &csv) == WS_ERR_ARGUMENT);
    ws_scene_free(s);
}

static void test_maps(void)
{
    ws_scene *s = NULL;
    ws_radiomap *m = NULL, *back = NULL;
    ws_prop_config cfg;
    char *text = NULL, *again = NULL, *detail = NULL;
    int id = 0;
    double pos[3], dist = -1, mean = -1;
    ws_prop_config_default(&cfg);
    cfg.tessellation_order = 2;
    CHECK(ws_scene_parse(scene_doc, &s) == WS_OK);
    CHECK(ws_build_map(s, "passive", &cfg, 1, &m) == WS_ERR_ARGUMENT);
    CHECK(ws_build_map(s, "active", &cfg, 1, &m) == WS_OK);
    CHECK(ws_radiomap_serialize(m, -1, &text) == WS_OK);
    CHECK(ws_radiomap_parse(text, &back) == WS_OK);
    CHECK(ws_radiomap_serialize(back, -1, &again) == WS_OK);
    CHECK(text && again && strcmp(text, again) == 0);

    CHECK(ws_localize(m, "AP1>device=-20,AP2>device=-60", &id, pos, &dist) == WS_OK);
    CHECK(id == 1);
    CHECK(pos[0] == 1.0 && pos[1] == 0.0);
    CHECK(ws_localize(m, "AP1>device=-20", &id, pos, &dist) == WS_ERR_STREAM_MISMATCH);
    CHECK(strstr(ws_last_error(), "AP2>device") != NULL);
    CHECK(ws_localize(m, "AP1>device=loud,AP2>device=-60", &id, pos, &dist) == WS_ERR_ARGUMENT);

    CHECK(ws_evaluate(m, m, 3, 0.0, 0, 1, &mean, &detail) == WS_OK);
    CHECK(mean == 0.0);
    CHECK(detail != NULL);

    ws_string_free(text);
    ws_string_free(again);
    ws_string_free(detail);
    ws_radiomap_free(back);
    ws_radiomap_free(m);
    ws_scene_free(s);
}

static void test_testbed(void)
{
    ws_scene *s = NULL, *t = NULL;
    char *a = NULL, *b = NULL, *text = NULL;
    CHECK(ws_testbed_scene("device-free", "wall", &s) == WS_OK);
    CHECK(ws_testbed_scene("device-free", "ceiling", &t) == WS_OK);
    CHECK(ws_scene_set_mounting(s, "ceiling") == WS_OK);
    CHECK(ws_scene_digest(s, &a) == WS_OK);
    CHECK(ws_scene_digest(t, &b) == WS_OK);
    CHECK(a && b && strcmp(a, b) == 0);
    CHECK(ws_scene_serialize(s, &text) == WS_OK);
    CHECK(text && strstr(text, "\"AP1\"") != NULL);
    ws_string_free(a);
    ws_string_free(b);
    ws_string_free(text);
    ws_scene_free(s);
    ws_scene_free(t);
}

int main(void)
{
    CHECK(strlen(ws_version()) > 0);
    test_errors();
    test_predict();
    test_heatmap();
    test_maps();
    test_testbed();
    if (failures)
    {
        fprintf(stderr, "%d C API check(s) failed\n", failures);
        return 1;
    }
    printf("C API checks passed\n");
    return 0;
}
