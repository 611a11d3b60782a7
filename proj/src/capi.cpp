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

#include <wavescope/errors.hpp>
#include <wavescope/heatmap.hpp>
#include <wavescope/localization.hpp>
#include <wavescope/scenarios.hpp>
#include <wavescope/service.hpp>
#include <wavescope/testbed.hpp>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>

struct ws_scene
{
    wavescope::Scene scene;
};

struct ws_radiomap
{
    wavescope::RadioMap map;
};

namespace
{

using namespace wavescope;

thread_local std::string last_error;
thread_local std::string last_pointer;

template <class F> ws_status guarded(F &&f)
{
    last_error.clear();
    last_pointer.clear();
    try
    {
        f();
        return WS_OK;
    }
    catch (const SchemaError &e)
    {
        last_error = e.what();
        last_pointer = e.pointer();
        return WS_ERR_SCHEMA;
    }
    catch (const StreamMismatchError &e)
    {
        last_error = e.what();
        for (const auto &s : e.expected())
            last_error += (&s == &e.expected().front() ? " (expected " : ", ") + s;
        if (!e.expected().empty())
            last_error += ")";
        return WS_ERR_STREAM_MISMATCH;
    }
    catch (const NotFoundError &e)
    {
        last_error = e.what();
        return WS_ERR_NOT_FOUND;
    }
    catch (const ArgumentError &e)
    {
        last_error = e.what();
        return WS_ERR_ARGUMENT;
    }
    catch (const IoError &e)
    {
        last_error = e.what();
        return WS_ERR_IO;
    }
    catch (const std::exception &e)
    {
        last_error = e.what();
        return WS_ERR_INTERNAL;
    }
    catch (...)
    {
        last_error = "unknown failure";
        return WS_ERR_INTERNAL;
    }
}

char *dup(const std::string &s)
{
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class T> void need(const T *p, const char *name)
{
    if (!p)
        throw ArgumentError(std::string(name) + " must not be null");
}

PropagationConfig to_cpp(const ws_prop_config *c)
{
    PropagationConfig out;
    if (c)
    {
        out.max_depth = c->max_depth;
        out.min_power_dbm = c->min_power_dbm;
        out.tessellation_order = c->tessellation_order;
        out.max_diffraction_order = c->max_diffraction_order;
        out.noise_floor_dbm = c->noise_floor_dbm;
        out.quantize_rss = c->quantize_rss != 0;
        out.bidirectional = c->bidirectional != 0;
    }
    out.validate();
    return out;
}

void to_c(const PropagationConfig &c, ws_prop_config *out)
{
    out->max_depth = c.max_depth;
    out->min_power_dbm = c.min_power_dbm;
    out->tessellation_order = c.tessellation_order;
    out->max_diffraction_order = c.max_diffraction_order;
    out->noise_floor_dbm = c.noise_floor_dbm;
    out->quantize_rss = c.quantize_rss;
    out->bidirectional = c.bidirectional;
}

std::string trimmed(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return std::string(s);
}

Observation parse_observation(std::string_view text)
{
    Observation obs;
    std::stringstream in{std::string(text)};
    std::string item;
    while (std::getline(in, item, ','))
    {
        item = trimmed(item);
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("observation item '" + item + "' is not STREAM=dBm");
        StreamId id = StreamId::parse(trimmed(item.substr(0, eq)));
        std::string value = trimmed(item.substr(eq + 1));
        char *end = nullptr;
        double v = std::strtod(value.c_str(), &end);
        if (value.empty() || *end != '\0' || !std::isfinite(v))
            throw ArgumentError("observation value '" + value + "' is not a number");
        if (!obs.rss.emplace(id, v).second)
            throw ArgumentError("stream " + id.label() + " given twice");
    }
    if (obs.rss.empty())
        throw ArgumentError("empty observation");
    return obs;
}

std::vector<Transceiver> with_role(const Scene &scene, Role role)
{
    std::vector<Transceiver> out;
    for (const auto &t : scene.transceivers())
        if (t.role == role)
            out.push_back(t);
    return out;
}

const Transceiver &transmitter(const Scene &scene, const char *tx_id)
{
    need(tx_id, "tx_id");
    const Transceiver &tx = scene.transceiver(tx_id);
    if (!tx.is_transmitter())
        throw ArgumentError(std::string("transceiver '") + tx_id + "' is not an access point");
    return tx;
}

} // namespace

extern "C" {

const char *ws_version(void)
{
    return WAVESCOPE_VERSION;
}

const char *ws_last_error(void)
{
    return last_error.c_str();
}

const char *ws_last_error_pointer(void)
{
    return last_pointer.c_str();
}

void ws_string_free(char *s)
{
    std::free(s);
}

void ws_prop_config_default(ws_prop_config *out)
{
    if (out)
        to_c(PropagationConfig{}, out);
}

ws_status ws_prop_config_parse(const char *document, ws_prop_config *out)
{
    return guarded([&] {
        need(document, "document");
        need(out, "out");
        to_c(parse_propagation_config(document), out);
    });
}

ws_status ws_scene_load(const char *path, ws_scene **out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new ws_scene{load_scene_file(path)};
    });
}

ws_status ws_scene_parse(const char *document, ws_scene **out)
{
    return guarded([&] {
        need(document, "document");
        need(out, "out");
        *out = new ws_scene{parse_scene(document)};
    });
}

ws_status ws_scene_save(const ws_scene *scene, const char *path)
{
    return guarded([&] {
        need(scene, "scene");
        need(path, "path");
        save_scene_file(scene->scene, path);
    });
}

ws_status ws_scene_serialize(const ws_scene *scene, char **out)
{
    return guarded([&] {
        need(scene, "scene");
        need(out, "out");
        *out = dup(serialize_scene(scene->scene));
    });
}

ws_status ws_scene_digest(const ws_scene *scene, char **out)
{
    return guarded([&] {
        need(scene, "scene");
        need(out, "out");
        *out = dup(scene->scene.digest());
    });
}

void ws_scene_free(ws_scene *scene)
{
    delete scene;
}

ws_status ws_testbed_scene(const char *kind, const char *mounting, ws_scene **out)
{
    return guarded([&] {
        need(kind, "kind");
        need(mounting, "mounting");
        need(out, "out");
        *out = new ws_scene{build_testbed(parse_testbed_kind(kind), parse_mounting(mounting)).scene};
    });
}

ws_status ws_write_fixtures(const char *directory)
{
    return guarded([&] {
        need(directory, "directory");
        write_fixtures(directory);
    });
}

ws_status ws_scene_set_frequency(ws_scene *scene, double frequency_hz)
{
    return guarded([&] {
        need(scene, "scene");
        if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
            throw ArgumentError("frequency must be positive");
        auto ts = scene->scene.transceivers();
        for (auto &t : ts)
            t.frequency_hz = frequency_hz;
        scene->scene = scene->scene.with_transceivers(std::move(ts));
    });
}

ws_status ws_scene_set_mounting(ws_scene *scene, const char *mounting)
{
    return guarded([&] {
        need(scene, "scene");
        need(mounting, "mounting");
        scene->scene = testbed_from_scene(scene->scene, parse_mounting(mounting)).scene;
    });
}

ws_status ws_predict_rss(const ws_scene *scene, const char *tx_id, const char *rx_id, const ws_prop_config *config,
                         double *out_dbm)
{
    return guarded([&] {
        need(scene, "scene");
        need(rx_id, "rx_id");
        need(out_dbm, "out_dbm");
        const Transceiver &tx = transmitter(scene->scene, tx_id);
        *out_dbm = predict_rss(scene->scene, tx, scene->scene.transceiver(rx_id), to_cpp(config));
    });
}

ws_status ws_predict_at(const ws_scene *scene, const char *tx_id, double x, double y, double z,
                        const ws_prop_config *config, double *out_dbm)
{
    return guarded([&] {
        need(scene, "scene");
        need(out_dbm, "out_dbm");
        const Transceiver &tx = transmitter(scene->scene, tx_id);
        Transceiver rx = tx;
        rx.id = "rx";
        rx.role = Role::tracked_device;
        rx.position = {x, y, z};
        *out_dbm = predict_rss(scene->scene, tx, rx, to_cpp(config));
    });
}

ws_status ws_grid_over(const ws_scene *scene, double resolution, double z, ws_grid *out)
{
    return guarded([&] {
        need(scene, "scene");
        need(out, "out");
        GridSpec g = grid_over(scene->scene, resolution, z);
        *out = {g.x0, g.y0, g.resolution, g.nx, g.ny, g.z};
    });
}

ws_status ws_heatmap(const ws_scene *scene, const char *tx_id, const ws_grid *grid, const ws_prop_config *config,
                     int threads, char **out_csv)
{
    return guarded([&] {
        need(scene, "scene");
        need(grid, "grid");
        need(out_csv, "out_csv");
        const Transceiver &tx = transmitter(scene->scene, tx_id);
        GridSpec g{grid->x0, grid->y0, grid->resolution, grid->nx, grid->ny, grid->z};
        g.validate();
        *out_csv = dup(write_heatmap(compute_heatmap(scene->scene, tx, g, to_cpp(config), threads)));
    });
}

ws_status ws_build_map(const ws_scene *scene, const char *kind, const ws_prop_config *config, int threads,
                       ws_radiomap **out)
{
    return guarded([&] {
        need(scene, "scene");
        need(kind, "kind");
        need(out, "out");
        const Scene &s = scene->scene;
        auto aps = with_role(s, Role::access_point);
        if (aps.empty())
            throw ArgumentError("scene has no access points");
        if (s.locations().empty())
            throw ArgumentError("scene has no radio-map locations");
        PropagationConfig cfg = to_cpp(config);
        if (parse_map_kind(kind) == MapKind::active)
        {
            ActiveMapOptions opts;
            opts.threads = threads;
            *out = new ws_radiomap{build_active_map(s, aps, s.locations(), cfg, opts)};
        }
        else
        {
            auto mps = with_role(s, Role::monitoring_point);
            if (mps.empty())
                throw ArgumentError("scene has no monitoring points");
            *out = new ws_radiomap{build_passive_map(s, aps, mps, s.locations(), HumanCylinder{}, cfg, threads)};
        }
    });
}

ws_status ws_radiomap_load(const char *path, ws_radiomap **out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new ws_radiomap{load_radiomap(path)};
    });
}

ws_status ws_radiomap_parse(const char *document, ws_radiomap **out)
{
    return guarded([&] {
        need(document, "document");
        need(out, "out");
        *out = new ws_radiomap{parse_radiomap(document)};
    });
}

ws_status ws_radiomap_serialize(const ws_radiomap *map, int digits, char **out)
{
    return guarded([&] {
        need(map, "map");
        need(out, "out");
        *out = dup(write_radiomap(map->map, digits));
    });
}

ws_status ws_radiomap_save(const ws_radiomap *map, const char *path)
{
    return guarded([&] {
        need(map, "map");
        need(path, "path");
        save_radiomap(map->map, path);
    });
}

void ws_radiomap_free(ws_radiomap *map)
{
    delete map;
}

ws_status ws_localize(const ws_radiomap *map, const char *observation, int *out_location, double out_position[3],
                      double *out_distance_db)
{
    return guarded([&] {
        need(map, "map");
        need(observation, "observation");
        NnMatch m = nearest_neighbor(map->map, parse_observation(observation));
        if (out_location)
            *out_location = m.location_id;
        if (out_position)
        {
            out_position[0] = m.position.x;
            out_position[1] = m.position.y;
            out_position[2] = m.position.z;
        }
        if (out_distance_db)
            *out_distance_db = m.distance;
    });
}

ws_status ws_evaluate(const ws_radiomap *train, const ws_radiomap *test, int samples, double sigma_db, uint64_t seed,
                      int threads, double *out_mean_error, char **out_detail)
{
    return guarded([&] {
        need(train, "train");
        need(test, "test");
        if (samples < 1)
            throw ArgumentError("samples must be at least 1");
        auto obs = sample_observations(test->map, samples, sigma_db, seed);
        LocalizationReport r = evaluate(train->map, obs, threads);
        if (out_mean_error)
            *out_mean_error = r.mean_error;
        if (out_detail)
            *out_detail = dup(write_localization_detail(r));
    });
}

ws_status ws_run_suite(const char *kind, const ws_suite_options *options, const char *out_dir, char **out_summary)
{
    return guarded([&] {
        need(kind, "kind");
        std::string k = kind;
        bool db = k == "all", df = k == "all";
        if (k != "all")
            (parse_testbed_kind(k) == TestbedKind::device_based ? db : df) = true;
        SuiteOverrides o;
        if (options)
        {
            o.seed = options->seed;
            if (options->noise_sigma_db >= 0.0)
                o.noise_sigma_db = options->noise_sigma_db;
            if (options->samples_per_location > 0)
                o.samples_per_location = options->samples_per_location;
            if (options->frequency_hz > 0.0)
                o.frequency_hz = options->frequency_hz;
            if (options->mounting)
                o.mounting = parse_mounting(options->mounting);
            o.threads = options->threads;
            if (options->fixtures)
                o.fixtures = options->fixtures;
            if (options->propagation)
                o.propagation = to_cpp(options->propagation);
        }
        std::vector<ScenarioReport> reports;
        if (db)
            reports = run_device_based_suite(o);
        if (df)
            for (auto &r : run_device_free_suite(o))
                reports.push_back(std::move(r));
        if (reports.empty())
            throw ArgumentError("the filters leave no scenario to run");
        if (out_dir)
            write_suite_outputs(reports, out_dir);
        if (out_summary)
            *out_summary = dup(summary_table(reports));
    });
}

ws_status ws_run_scenario(const char *config_document, const char *fixtures, int threads, const char *out_dir,
                          char **out_report)
{
    return guarded([&] {
        need(config_document, "config_document");
        ScenarioConfig cfg = parse_scenario_config(config_document);
        ScenarioReport r = run_scenario(cfg, threads, fixtures ? fixtures : "");
        if (out_dir)
            write_scenario_outputs(r, out_dir);
        if (out_report)
            *out_report = dup(report_text(r));
    });
}

ws_status ws_serve(const char *host, int port, const char *fixtures, int threads, const char *secret)
{
    return guarded([&] {
        need(host, "host");
        if (port < 0 || port > 65535)
            throw ArgumentError("port out of range");
        ServiceOptions o;
        o.fixtures = fixtures ? fixtures : "";
        o.threads = threads;
        o.shared_secret = secret ? secret : "";
        Service service(o);
        service.serve(host, port);
    });
}

} // extern "C"
