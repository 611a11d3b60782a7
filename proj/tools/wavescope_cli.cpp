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

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace
{

// Exit codes: 0 ok, 2 bad arguments or input, 3 scene/schema error, 4 internal error.
struct Failure
{
    int code;
};

int exit_code(ws_status s)
{
    switch (s)
    {
    case WS_OK:
        return 0;
    case WS_ERR_SCHEMA:
        return 3;
    case WS_ERR_INTERNAL:
        return 4;
    default:
        return 2;
    }
}

void check(ws_status s)
{
    if (s == WS_OK)
        return;
    std::string pointer = ws_last_error_pointer();
    std::cerr << "error: " << ws_last_error();
    if (!pointer.empty() && std::string(ws_last_error()).rfind(pointer, 0) != 0)
        std::cerr << " (at " << pointer << ")";
    std::cerr << "\n";
    throw Failure{exit_code(s)};
}

[[noreturn]] void usage_error(const std::string &message)
{
    std::cerr << "error: " << message << "\n";
    throw Failure{2};
}

struct CString
{
    char *p = nullptr;
    ~CString() { ws_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

using SceneHandle = std::unique_ptr<ws_scene, decltype(&ws_scene_free)>;
using MapHandle = std::unique_ptr<ws_radiomap, decltype(&ws_radiomap_free)>;

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        usage_error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void emit(const std::string &text, const std::string &out)
{
    if (out.empty() || out == "-")
    {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << text) || !f.flush())
        usage_error("cannot write " + out);
}

struct EngineFlags
{
    std::string scene, config, mounting;
    std::optional<double> frequency_hz;
    bool quantize = false;
    int threads = 0;

    void add_to(CLI::App *cmd, bool scene_required)
    {
        auto *s = cmd->add_option("--scene", scene, "Scene document");
        if (scene_required)
            s->required();
        cmd->add_option("--config", config, "Propagation config document");
        cmd->add_option("--frequency-hz", frequency_hz, "Carrier frequency for every transceiver")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--mounting", mounting, "Move the access points: wall or ceiling")
            ->check(CLI::IsMember({"wall", "ceiling"}));
        cmd->add_flag("--quantize-rss", quantize, "Round reported RSS to whole dBm");
        cmd->add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    }

    ws_prop_config propagation() const
    {
        ws_prop_config c;
        ws_prop_config_default(&c);
        if (!config.empty())
            check(ws_prop_config_parse(read_file(config).c_str(), &c));
        if (quantize)
            c.quantize_rss = 1;
        return c;
    }

    SceneHandle load_scene() const
    {
        ws_scene *s = nullptr;
        check(ws_scene_load(scene.c_str(), &s));
        SceneHandle h(s, ws_scene_free);
        if (frequency_hz)
            check(ws_scene_set_frequency(h.get(), *frequency_hz));
        if (!mounting.empty())
            check(ws_scene_set_mounting(h.get(), mounting.c_str()));
        return h;
    }
};

std::vector<double> numbers(const std::string &text, char sep, std::size_t count, const std::string &flag)
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, sep))
    {
        try
        {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        }
        catch (const std::exception &)
        {
            usage_error(flag + ": '" + text + "' is not a list of numbers");
        }
    }
    if (out.size() != count)
        usage_error(flag + ": expected " + std::to_string(count) + " values");
    return out;
}

std::string fixed3(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"wavescope: indoor RF ray tracing, radio maps and fingerprint localization"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ws_version());

    // simulate
    EngineFlags sim;
    std::string sim_tx, sim_rx, sim_at, sim_out, grid_origin, grid_size;
    std::optional<double> grid_res;
    double grid_z = 1.2;
    auto *simulate = app.add_subcommand("simulate", "Predict RSS at a receiver or over a grid");
    sim.add_to(simulate, true);
    simulate->add_option("--tx", sim_tx, "Transmitting access point id")->required();
    auto *rx_opt = simulate->add_option("--rx", sim_rx, "Receiver transceiver id");
    auto *at_opt = simulate->add_option("--at", sim_at, "Receiver position X,Y,Z");
    auto *res_opt = simulate->add_option("--grid-resolution", grid_res, "Grid spacing in metres")
                        ->check(CLI::PositiveNumber);
    simulate->add_option("--grid-origin", grid_origin, "First cell centre X,Y (default: scene corner)")
        ->needs(res_opt);
    simulate->add_option("--grid-size", grid_size, "Cells NXxNY (default: cover the scene)")->needs(res_opt);
    simulate->add_option("--grid-z", grid_z, "Grid height")->needs(res_opt);
    simulate->add_option("--out", sim_out, "Output file (default: stdout)");
    rx_opt->excludes(at_opt)->excludes(res_opt);
    at_opt->excludes(res_opt);

    // map
    EngineFlags mapf;
    std::string map_kind = "active", map_out;
    auto *map = app.add_subcommand("map", "Build an active or passive radio map");
    mapf.add_to(map, true);
    map->add_option("--kind", map_kind, "active or passive")->check(CLI::IsMember({"active", "passive"}));
    map->add_option("--out", map_out, "Output file (default: stdout)");

    // localize
    std::string loc_map, loc_obs, loc_test, loc_out;
    int loc_samples = 100, loc_threads = 0;
    double loc_sigma = 3.0;
    std::uint64_t loc_seed = 0;
    auto *localize = app.add_subcommand("localize", "Nearest-neighbour localization against a radio map");
    localize->add_option("--map", loc_map, "Training radio map")->required();
    auto *obs_opt = localize->add_option("--observation", loc_obs, "Observation: AP1>MP1=-40.5,AP2>MP1=-51");
    auto *test_opt = localize->add_option("--test-map", loc_test, "Evaluate noisy samples of this map");
    obs_opt->excludes(test_opt);
    localize->add_option("--samples", loc_samples, "Samples per location")->check(CLI::PositiveNumber)->needs(test_opt);
    localize->add_option("--sigma", loc_sigma, "Noise standard deviation in dB")
        ->check(CLI::NonNegativeNumber)
        ->needs(test_opt);
    localize->add_option("--seed", loc_seed, "Noise seed");
    localize->add_option("--threads", loc_threads, "Worker threads")->check(CLI::NonNegativeNumber);
    localize->add_option("--out", loc_out, "Output file (default: stdout)");

    // suite
    std::string suite_kind, suite_out = "wavescope_suite", suite_config, suite_mounting, suite_fixtures;
    std::optional<double> suite_freq, suite_sigma;
    std::optional<int> suite_samples;
    std::uint64_t suite_seed = 0;
    int suite_threads = 0;
    bool suite_quantize = false;
    auto *suite = app.add_subcommand("suite", "Run the scenario suite and print the summary");
    suite->add_option("kind", suite_kind, "device-based, device-free or all")
        ->required()
        ->check(CLI::IsMember({"device-based", "device-free", "all"}));
    suite->add_option("--out", suite_out, "Output directory");
    suite->add_option("--seed", suite_seed, "Seed for crowds and measurement noise");
    suite->add_option("--threads", suite_threads, "Worker threads")->check(CLI::NonNegativeNumber);
    suite->add_option("--frequency-hz", suite_freq, "Keep only rows at this frequency")->check(CLI::PositiveNumber);
    suite->add_option("--mounting", suite_mounting, "Keep only rows with this mounting")
        ->check(CLI::IsMember({"wall", "ceiling"}));
    suite->add_option("--config", suite_config, "Propagation config document");
    suite->add_flag("--quantize-rss", suite_quantize, "Round simulated RSS to whole dBm");
    suite->add_option("--sigma", suite_sigma, "Measurement noise in dB")->check(CLI::NonNegativeNumber);
    suite->add_option("--samples", suite_samples, "Test samples per location")->check(CLI::PositiveNumber);
    suite->add_option("--fixtures", suite_fixtures, "Testbed fixture directory");

    // serve
    std::string host = "127.0.0.1", serve_fixtures, token;
    int port = 8080, serve_threads = 0;
    auto *serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
    serve->add_option("--fixtures", serve_fixtures, "Testbed fixture directory");
    serve->add_option("--threads", serve_threads, "Engine threads per job")->check(CLI::NonNegativeNumber);
    serve->add_option("--token", token, "Require this value in the X-Wavescope-Token header");

    // fixtures
    std::string fixture_out;
    auto *fixtures = app.add_subcommand("fixtures", "Write the testbed scene documents");
    fixtures->add_option("--out", fixture_out, "Directory")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }

    try
    {
        if (*simulate)
        {
            SceneHandle scene = sim.load_scene();
            ws_prop_config cfg = sim.propagation();
            if (grid_res)
            {
                ws_grid grid;
                check(ws_grid_over(scene.get(), *grid_res, grid_z, &grid));
                if (!grid_origin.empty())
                {
                    auto o = numbers(grid_origin, ',', 2, "--grid-origin");
                    grid.x0 = o[0];
                    grid.y0 = o[1];
                }
                if (!grid_size.empty())
                {
                    auto n = numbers(grid_size, 'x', 2, "--grid-size");
                    if (n[0] != static_cast<int>(n[0]) || n[1] != static_cast<int>(n[1]))
                        usage_error("--grid-size: expected whole cell counts");
                    grid.nx = static_cast<int>(n[0]);
                    grid.ny = static_cast<int>(n[1]);
                }
                CString csv;
                check(ws_heatmap(scene.get(), sim_tx.c_str(), &grid, &cfg, sim.threads, &csv.p));
                emit(csv.str(), sim_out);
            }
            else if (!sim_at.empty())
            {
                auto p = numbers(sim_at, ',', 3, "--at");
                double rss = 0;
                check(ws_predict_at(scene.get(), sim_tx.c_str(), p[0], p[1], p[2], &cfg, &rss));
                emit("tx_id,x,y,z,rss_dbm\n" + sim_tx + "," + fixed3(p[0]) + "," + fixed3(p[1]) + "," +
                         fixed3(p[2]) + "," + fixed3(rss) + "\n",
                     sim_out);
            }
            else if (!sim_rx.empty())
            {
                double rss = 0;
                check(ws_predict_rss(scene.get(), sim_tx.c_str(), sim_rx.c_str(), &cfg, &rss));
                emit("tx_id,rx_id,rss_dbm\n" + sim_tx + "," + sim_rx + "," + fixed3(rss) + "\n", sim_out);
            }
            else
                usage_error("simulate needs --rx, --at or --grid-resolution");
        }
        else if (*map)
        {
            SceneHandle scene = mapf.load_scene();
            ws_prop_config cfg = mapf.propagation();
            ws_radiomap *m = nullptr;
            std::cerr << "building " << map_kind << " map\n";
            check(ws_build_map(scene.get(), map_kind.c_str(), &cfg, mapf.threads, &m));
            MapHandle handle(m, ws_radiomap_free);
            CString text;
            check(ws_radiomap_serialize(m, 3, &text.p));
            emit(text.str(), map_out);
        }
        else if (*localize)
        {
            ws_radiomap *m = nullptr;
            check(ws_radiomap_load(loc_map.c_str(), &m));
            MapHandle train(m, ws_radiomap_free);
            if (!loc_test.empty())
            {
                check(ws_radiomap_load(loc_test.c_str(), &m));
                MapHandle test(m, ws_radiomap_free);
                double mean = 0;
                CString detail;
                check(ws_evaluate(train.get(), test.get(), loc_samples, loc_sigma, loc_seed, loc_threads, &mean,
                                  &detail.p));
                emit(detail.str(), loc_out);
                std::cerr << "mean error " << fixed3(mean) << " m\n";
            }
            else if (!loc_obs.empty())
            {
                int id = 0;
                double pos[3], dist = 0;
                check(ws_localize(train.get(), loc_obs.c_str(), &id, pos, &dist));
                emit("location_id,x,y,z,distance_db\n" + std::to_string(id) + "," + fixed3(pos[0]) + "," +
                         fixed3(pos[1]) + "," + fixed3(pos[2]) + "," + fixed3(dist) + "\n",
                     loc_out);
            }
            else
                usage_error("localize needs --observation or --test-map");
        }
        else if (*suite)
        {
            ws_prop_config cfg;
            ws_prop_config_default(&cfg);
            if (!suite_config.empty())
                check(ws_prop_config_parse(read_file(suite_config).c_str(), &cfg));
            if (suite_quantize)
                cfg.quantize_rss = 1;
            ws_suite_options o{};
            o.seed = suite_seed;
            o.noise_sigma_db = suite_sigma.value_or(-1.0);
            o.samples_per_location = suite_samples.value_or(0);
            o.frequency_hz = suite_freq.value_or(0.0);
            o.mounting = suite_mounting.empty() ? nullptr : suite_mounting.c_str();
            o.threads = suite_threads;
            o.fixtures = suite_fixtures.empty() ? nullptr : suite_fixtures.c_str();
            o.propagation = &cfg;
            std::cerr << "running " << suite_kind << " suite into " << suite_out << "\n";
            CString summary;
            check(ws_run_suite(suite_kind.c_str(), &o, suite_out.c_str(), &summary.p));
            std::cout << summary.str();
        }
        else if (*serve)
        {
            std::cerr << "listening on " << host << ":" << port << "\n";
            check(ws_serve(host.c_str(), port, serve_fixtures.empty() ? nullptr : serve_fixtures.c_str(),
                           serve_threads, token.empty() ? nullptr : token.c_str()));
        }
        else if (*fixtures)
        {
            check(ws_write_fixtures(fixture_out.c_str()));
        }
    }
    catch (const Failure &f)
    {
        return f.code;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
