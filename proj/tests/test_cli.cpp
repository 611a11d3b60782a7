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

#include "support.hpp"

#include <wavescope/heatmap.hpp>
#include <wavescope/radiomap.hpp>
#include <wavescope/service.hpp>

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <sys/wait.h>

using namespace wavescope;
namespace fs = std::filesystem;

namespace
{

struct Run
{
    int code;
    std::string out, err;
};

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path &p, const std::string &text)
{
    std::ofstream(p, std::ios::binary) << text;
}

struct Sandbox
{
    fs::path dir;

    Sandbox()
    {
        dir = fs::temp_directory_path() / ("wavescope_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        Scene empty = support::empty_scene().with_transceivers(
            {support::node("AP1", {0, 0, 1.2}), support::node("MP1", {1, 0, 1.2}, Role::monitoring_point)});
        spit(dir / "empty.scene", serialize_scene(empty));
        spit(dir / "cheap.json", R"({"tessellation_order": 1, "max_depth": 2, "max_diffraction_order": 0})");
    }
    ~Sandbox() { fs::remove_all(dir); }

    Run run(const std::string &args) const
    {
        const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
        std::string cmd = std::string(WAVESCOPE_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
        int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    }

    std::string path(const std::string &name) const { return (dir / name).string(); }
};

int data_rows(const std::string &csv)
{
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    bool header = false;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header)
            header = true;
        else
            ++rows;
    }
    return rows;
}

} // namespace

TEST_CASE("cli simulate")
{
    Sandbox box;
    SUBCASE("one metre in free space")
    {
        Run r = box.run("simulate --scene " + box.path("empty.scene") + " --tx AP1 --rx MP1 --out " +
                        box.path("rss.csv"));
        REQUIRE(r.code == 0);
        std::string text = slurp(box.dir / "rss.csv");
        CHECK(text.rfind("tx_id,rx_id,rss_dbm\n", 0) == 0);
        double rss = std::stod(text.substr(text.rfind(',') + 1));
        CHECK(std::abs(rss - -31.0) < 0.5);
    }
    SUBCASE("unknown transmitter")
    {
        Run r = box.run("simulate --scene " + box.path("empty.scene") + " --tx AP7 --rx MP1");
        CHECK(r.code == 2);
        CHECK(r.err.find("AP7") != std::string::npos);
        CHECK(r.out.empty());
    }
    SUBCASE("2 x 2 grid matches the service byte for byte")
    {
        Run r = box.run("simulate --scene " + box.path("empty.scene") +
                        " --tx AP1 --grid-resolution 0.5 --grid-origin 1,-0.25 --grid-size 2x2 --threads 2");
        REQUIRE(r.code == 0);
        CHECK(data_rows(r.out) == 4);

        Service service;
        Scene s = parse_scene(slurp(box.dir / "empty.scene"));
        std::string id = nlohmann::json::parse(service.handle("POST", "/api/scenes", serialize_scene(s)).body)["id"];
        nlohmann::json req = {{"scene_id", id},         {"tx_id", "AP1"},     {"resolution_m", 0.5},
                              {"origin", {1.0, -0.25}}, {"size", {2, 2}},     {"z", 1.2}};
        auto job = nlohmann::json::parse(service.handle("POST", "/api/heatmaps", req.dump()).body);
        service.wait_idle();
        job = nlohmann::json::parse(service.handle("GET", "/api/jobs/" + job["id"].get<std::string>(), "").body);
        REQUIRE(job["status"] == "done");
        CHECK(service.handle("GET", job["result"].get<std::string>(), "").body == r.out);
    }
    SUBCASE("frequency and quantization flags")
    {
        Run a = box.run("simulate --scene " + box.path("empty.scene") + " --tx AP1 --at 1,0,1.2");
        Run b = box.run("simulate --scene " + box.path("empty.scene") + " --tx AP1 --at 1,0,1.2 --frequency-hz 5.7e9");
        Run q = box.run("simulate --scene " + box.path("empty.scene") + " --tx AP1 --at 1,0,1.2 --quantize-rss");
        REQUIRE(a.code == 0);
        REQUIRE(b.code == 0);
        REQUIRE(q.code == 0);
        double ra = std::stod(a.out.substr(a.out.rfind(',') + 1)), rb = std::stod(b.out.substr(b.out.rfind(',') + 1));
        CHECK(std::abs((ra - rb) - 7.51) < 0.3);
        CHECK(q.out.find(",-31.000\n") != std::string::npos);
    }
    SUBCASE("argument and document errors")
    {
        CHECK(box.run("simulate --scene " + box.path("empty.scene") + " --tx AP1").code == 2);
        CHECK(box.run("simulate --scene " + box.path("missing.scene") + " --tx AP1 --rx MP1").code == 2);
        CHECK(box.run("simulate --scene " + box.path("empty.scene") + " --tx AP1 --at 1,2").code == 2);
        CHECK(box.run("simulate --scene " + box.path("empty.scene") + " --tx AP1 --grid-resolution 1 --grid-size 0x3")
                  .code == 2);
        CHECK(box.run("simulate --bogus").code == 2);
        CHECK(box.run("").code == 2);
        spit(box.dir / "bad.scene", "{\"bounds\": 1}");
        Run bad = box.run("simulate --scene " + box.path("bad.scene") + " --tx AP1 --rx MP1");
        CHECK(bad.code == 3);
        CHECK(bad.err.find("/bounds") != std::string::npos);
        spit(box.dir / "bad.json", "{\"max_depth\": -4}");
        CHECK(box.run("simulate --scene " + box.path("empty.scene") + " --tx AP1 --rx MP1 --config " +
                      box.path("bad.json"))
                  .code == 3);
        CHECK(box.run("--version").code == 0);
    }
}

TEST_CASE("cli map and localize")
{
    Sandbox box;
    Scene s = parse_scene(slurp(box.dir / "empty.scene"));
    std::vector<Transceiver> ts = s.transceivers();
    Scene with_locations(s.bounds(), s.ceiling_height(), s.materials(), {}, {}, ts,
                         {{1, {2, 0, 0}}, {2, {0, 3, 0}}, {3, {-4, -4, 0}}});
    spit(box.dir / "locs.scene", serialize_scene(with_locations));

    Run m = box.run("map --scene " + box.path("locs.scene") + " --kind active --config " + box.path("cheap.json") +
                    " --out " + box.path("map.csv"));
    REQUIRE(m.code == 0);
    CHECK(m.out.empty());
    RadioMap map = load_radiomap(box.path("map.csv"));
    CHECK(map.fingerprints.size() == 3);

    std::ostringstream obs;
    obs << std::setprecision(17) << "AP1>device=" << map.fingerprints[1].rss[0];
    Run l = box.run("localize --map " + box.path("map.csv") + " --observation '" + obs.str() + "'");
    REQUIRE(l.code == 0);
    CHECK(l.out == "location_id,x,y,z,distance_db\n2,0.000,3.000,0.000,0.000\n");

    Run mismatch = box.run("localize --map " + box.path("map.csv") + " --observation 'AP2>device=-40'");
    CHECK(mismatch.code == 2);
    CHECK(mismatch.err.find("AP1>device") != std::string::npos);

    Run eval = box.run("localize --map " + box.path("map.csv") + " --test-map " + box.path("map.csv") +
                       " --samples 4 --sigma 0");
    REQUIRE(eval.code == 0);
    CHECK(eval.err.find("mean error 0.000 m") != std::string::npos);

    Run passive = box.run("map --scene " + box.path("locs.scene") + " --kind passive --config " +
                          box.path("cheap.json"));
    REQUIRE(passive.code == 0);
    CHECK(passive.out.find("# kind: passive") != std::string::npos);
    CHECK(data_rows(passive.out) == 4);
}

TEST_CASE("cli suite")
{
    Sandbox box;
    const std::string common = " --config " + box.path("cheap.json") + " --samples 2";
    Run df = box.run("suite device-free --out " + box.path("df") + common);
    REQUIRE_MESSAGE(df.code == 0, df.err);
    for (const char *v : {"1.44", "4.48", "1.77"})
        CHECK(df.out.find(v) != std::string::npos);
    CHECK(df.err.find("running") != std::string::npos);
    CHECK(df.out.find("running") == std::string::npos);
    CHECK(slurp(box.dir / "df" / "summary.tsv") == df.out);

    Run all = box.run("suite all --out " + box.path("all") + common);
    REQUIRE(all.code == 0);
    int reports = 0;
    for (const auto &e : fs::directory_iterator(box.dir / "all"))
        reports += e.is_directory() && fs::exists(e.path() / "report.txt");
    CHECK(reports == 16);

    Run again = box.run("suite all --threads 3 --out " + box.path("again") + common);
    REQUIRE(again.code == 0);
    for (const auto &e : fs::recursive_directory_iterator(box.dir / "all"))
        if (e.is_regular_file())
        {
            auto rel = fs::relative(e.path(), box.dir / "all");
            CHECK_MESSAGE(slurp(e.path()) == slurp(box.dir / "again" / rel), rel.string());
        }

    CHECK(box.run("suite sideways").code == 2);
    CHECK(box.run("suite device-based --frequency-hz 3e9 --out " + box.path("none")).code == 2);
}
