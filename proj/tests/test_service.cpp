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
#include <wavescope/localization.hpp>
#include <wavescope/scenarios.hpp>
#include <wavescope/service.hpp>

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <random>
#include <sstream>

using namespace wavescope;
using support::node;
using nlohmann::json;

namespace
{

Scene small_scene()
{
    auto mats = default_materials();
    std::vector<Surface> walls{
        vertical_rect("wall", {4, -2, 0}, {4, 2, 0}, 0, 2.7, support::material_id(mats, "brick"))};
    std::vector<Transceiver> ts{node("AP1", {0, 0, 1.2}), node("AP2", {6, 1, 1.5}),
                                node("MP1", {3, -1, 0.5}, Role::monitoring_point)};
    std::vector<RadioLocation> locs{{1, {1, 0, 0}}, {2, {2, 1, 0}}, {3, {5, -1, 0}}, {4, {3, 1.5, 0}}};
    return Scene(Aabb{{-3, -3, 0}, {8, 3, 2.7}}, 2.7, mats, walls, {}, ts, locs);
}

PropagationConfig cheap()
{
    PropagationConfig c;
    c.tessellation_order = 2;
    return c;
}

json cheap_json()
{
    return {{"tessellation_order", 2}};
}

json body(const HttpResponse &r)
{
    return json::parse(r.body);
}

struct Client
{
    Service &service;

    HttpResponse post(const std::string &path, const json &j) { return service.handle("POST", path, j.dump()); }
    HttpResponse get(const std::string &path) { return service.handle("GET", path, ""); }

    // Submits a job, waits for it and returns the final job record.
    json run(const std::string &path, const json &j)
    {
        HttpResponse r = post(path, j);
        REQUIRE_MESSAGE(r.status == 202, r.body);
        json job = body(r);
        service.wait_idle();
        HttpResponse s = get("/api/jobs/" + job["id"].get<std::string>());
        REQUIRE(s.status == 200);
        return body(s);
    }

    std::string result(const json &job)
    {
        REQUIRE_MESSAGE(job["status"] == "done", job.dump());
        HttpResponse r = get(job["result"].get<std::string>());
        REQUIRE(r.status == 200);
        return r.body;
    }

    std::string add_scene(const Scene &s)
    {
        HttpResponse r = service.handle("POST", "/api/scenes", serialize_scene(s));
        REQUIRE((r.status == 201 || r.status == 200));
        return body(r)["id"];
    }
};

void check_problem(const HttpResponse &r, int status)
{
    CHECK(r.status == status);
    CHECK(r.content_type == "application/problem+json");
    json p = body(r);
    CHECK(p["status"] == status);
    CHECK(p.contains("title"));
    CHECK(p.contains("pointer"));
}

} // namespace

TEST_CASE("service scenes")
{
    Service service;
    Client c{service};
    Scene scene = small_scene();
    HttpResponse first = service.handle("POST", "/api/scenes", serialize_scene(scene));
    CHECK(first.status == 201);
    HttpResponse again = service.handle("POST", "/api/scenes", serialize_scene(scene));
    CHECK(again.status == 200);
    CHECK(body(first)["id"] == body(again)["id"]);
    CHECK(body(first)["id"] == scene.digest());

    HttpResponse doc = c.get("/api/scenes/" + scene.digest());
    CHECK(doc.status == 200);
    CHECK(doc.body == serialize_scene(scene));

    check_problem(service.handle("POST", "/api/scenes", "{\"bounds\": "), 400);
    HttpResponse bad = c.post("/api/scenes", {{"bounds", {{"min", {0, 0}}, {"max", {1, 1, 1}}}}});
    check_problem(bad, 400);
    CHECK(body(bad)["pointer"] == "/bounds/min");
    check_problem(c.get("/api/scenes/nope"), 404);
    check_problem(c.get("/api/nothing"), 404);
    check_problem(service.handle("DELETE", "/api/scenes", ""), 405);
}

TEST_CASE("service heatmaps")
{
    Service service;
    Client c{service};
    Scene empty = support::empty_scene().with_transceivers({node("AP1", {0, 0, 1.2})});
    std::string id = c.add_scene(empty);

    SUBCASE("one cell at 1 m follows Friis and matches the library")
    {
        json req = {{"scene_id", id}, {"tx_id", "AP1"}, {"resolution_m", 1.0}, {"origin", {1.0, 0.0}},
                    {"size", {1, 1}}, {"z", 1.2}};
        json job = c.run("/api/heatmaps", req);
        CHECK(job["progress"] == 1.0);
        std::string csv = c.result(job);
        GridSpec g{1.0, 0.0, 1.0, 1, 1, 1.2};
        CHECK(csv == write_heatmap(compute_heatmap(empty, empty.transceiver("AP1"), g, PropagationConfig{})));
        double rss = std::stod(csv.substr(csv.rfind(',') + 1));
        CHECK(std::abs(rss - -31.0) < 0.5);

        json repeat = body(c.post("/api/heatmaps", req));
        CHECK(repeat["status"] == "done");
        CHECK(repeat["result_id"] == job["result_id"]);
        CHECK(repeat["id"] != job["id"]);
        CHECK(c.result(repeat) == csv);
    }
    SUBCASE("grid over the scene")
    {
        std::string sid = c.add_scene(small_scene());
        json job = c.run("/api/heatmaps", {{"scene_id", sid}, {"tx_id", "AP1"}, {"resolution_m", 2.0},
                                           {"config", cheap_json()}});
        Scene s = small_scene();
        CHECK(c.result(job) ==
              write_heatmap(compute_heatmap(s, s.transceiver("AP1"), grid_over(s, 2.0, 1.2), cheap())));
    }
    SUBCASE("errors")
    {
        check_problem(c.post("/api/heatmaps", {{"scene_id", "missing"}, {"tx_id", "AP1"}, {"resolution_m", 1.0}}),
                      404);
        check_problem(c.post("/api/heatmaps", {{"scene_id", id}, {"tx_id", "AP7"}, {"resolution_m", 1.0}}), 404);
        check_problem(
            c.post("/api/heatmaps", {{"scene_id", id}, {"tx_id", "AP1"}, {"resolution_m", 1.0}, {"size", {0, 4}}}),
            400);
        check_problem(c.post("/api/heatmaps", {{"scene_id", id}, {"tx_id", "AP1"}, {"resolution_m", -1.0}}), 400);
        HttpResponse missing = c.post("/api/heatmaps", {{"scene_id", id}, {"tx_id", "AP1"}});
        check_problem(missing, 400);
        CHECK(body(missing)["pointer"] == "/resolution_m");
        check_problem(c.get("/api/jobs/job-999"), 404);
        check_problem(c.get("/api/results/none"), 404);
    }
}

TEST_CASE("service radio maps and localization")
{
    Service service;
    Client c{service};
    Scene s = small_scene();
    std::string sid = c.add_scene(s);
    std::vector<Transceiver> aps{s.transceiver("AP1"), s.transceiver("AP2")};
    std::vector<Transceiver> mps{s.transceiver("MP1")};

    SUBCASE("active map")
    {
        json job = c.run("/api/radiomaps", {{"scene_id", sid}, {"kind", "active"}, {"config", cheap_json()}});
        RadioMap lib = build_active_map(s, aps, s.locations(), cheap());
        CHECK(c.result(job) == write_radiomap(lib, 3));

        std::string map_id = job["result_id"];
        SUBCASE("exact fingerprint")
        {
            json obs;
            for (std::size_t k = 0; k < lib.streams.size(); ++k)
                obs[lib.streams[k].label()] = lib.fingerprints[2].rss[k];
            HttpResponse r = c.post("/api/localize", {{"map_id", map_id}, {"observation", obs}});
            REQUIRE(r.status == 200);
            CHECK(body(r)["location_id"] == 3);
            CHECK(body(r)["distance_db"] == 0.0);
            CHECK(body(r)["position"][0] == 5.0);
        }
        SUBCASE("stream mismatch")
        {
            HttpResponse r = c.post("/api/localize", {{"map_id", map_id}, {"observation", {{"AP1>device", -40}}}});
            check_problem(r, 409);
            CHECK(body(r)["expected"] == json({"AP1>device", "AP2>device"}));
        }
        SUBCASE("random observations agree with the library")
        {
            std::mt19937_64 rng(21);
            std::uniform_real_distribution<double> u(-80, -30);
            for (int i = 0; i < 25; ++i)
            {
                json obs;
                Observation o;
                for (const auto &st : lib.streams)
                {
                    double v = u(rng);
                    obs[st.label()] = v;
                    o.rss[st] = v;
                }
                HttpResponse r = c.post("/api/localize", {{"map_id", map_id}, {"observation", obs}});
                NnMatch m = nearest_neighbor(lib, o);
                CHECK(body(r)["location_id"] == m.location_id);
                CHECK(body(r)["distance_db"].get<double>() == m.distance);
            }
        }
        SUBCASE("bad requests")
        {
            check_problem(c.post("/api/localize", {{"map_id", "nope"}, {"observation", json::object()}}), 404);
            check_problem(c.post("/api/localize", {{"map_id", map_id}, {"observation", {{"AP1", -40}}}}), 400);
            check_problem(c.post("/api/localize", {{"map_id", map_id}, {"observation", {{"AP1>device", "x"}}}}), 400);
        }
    }
    SUBCASE("passive map")
    {
        json job = c.run("/api/radiomaps", {{"scene_id", sid}, {"kind", "passive"}, {"config", cheap_json()}});
        RadioMap lib = build_passive_map(s, aps, mps, s.locations(), HumanCylinder{}, cheap());
        CHECK(c.result(job) == write_radiomap(lib, 3));
    }
    SUBCASE("explicit transceivers and locations")
    {
        json job = c.run("/api/radiomaps", {{"scene_id", sid},
                                            {"kind", "active"},
                                            {"aps", {"AP2"}},
                                            {"locations", {{1.0, 1.0, 0.0}, {2.0, -1.0, 0.0}}},
                                            {"include_carrier", false},
                                            {"config", cheap_json()}});
        std::vector<RadioLocation> locs{{1, {1, 1, 0}}, {2, {2, -1, 0}}};
        ActiveMapOptions o;
        o.include_carrier = false;
        RadioMap lib = build_active_map(s, std::span(&aps[1], 1), locs, cheap(), o);
        CHECK(c.result(job) == write_radiomap(lib, 3));
    }
    SUBCASE("errors")
    {
        check_problem(c.post("/api/radiomaps", {{"scene_id", sid}, {"kind", "sideways"}}), 400);
        check_problem(c.post("/api/radiomaps", {{"scene_id", sid}, {"kind", "active"}, {"aps", {"AP9"}}}), 404);
        check_problem(c.post("/api/radiomaps", {{"scene_id", "x"}, {"kind", "active"}}), 404);
    }
}

TEST_CASE("service scenarios")
{
    ScenarioConfig cfg = device_free_suite()[0];
    cfg.propagation.tessellation_order = 1;
    cfg.propagation.max_depth = 2;
    cfg.samples_per_location = 3;
    json doc = json::parse(serialize_scenario_config(cfg));

    SUBCASE("report matches the library")
    {
        Service service;
        Client c{service};
        json job = c.run("/api/scenarios", doc);
        CHECK(c.result(job) == report_text(run_scenario(cfg, 1)));
    }
    SUBCASE("engine failures are carried by the job")
    {
        ServiceOptions o;
        o.fixtures = "/nonexistent/fixtures";
        Service service(o);
        Client c{service};
        json job = c.run("/api/scenarios", doc);
        CHECK(job["status"] == "failed");
        CHECK(job["error"]["status"] == 500);
        CHECK(job["error"]["title"].get<std::string>().find("/nonexistent") != std::string::npos);
        CHECK_FALSE(job.contains("result"));
    }
    SUBCASE("invalid config")
    {
        Service service;
        Client c{service};
        json bad = doc;
        bad["noise_sigma_db"] = "loud";
        check_problem(c.post("/api/scenarios", bad), 400);
    }
}

TEST_CASE("service shared secret")
{
    ServiceOptions o;
    o.shared_secret = "s3cret";
    Service service(o);
    check_problem(service.handle("GET", "/api/jobs/job-1", ""), 401);
    check_problem(service.handle("GET", "/api/jobs/job-1", "", {{"X-Wavescope-Token", "wrong"}}), 401);
    check_problem(service.handle("GET", "/api/jobs/job-1", "", {{"X-Wavescope-Token", "s3cret"}}), 404);
}

TEST_CASE("service over a socket")
{
    Service service;
    const int port = service.start("127.0.0.1", 0);
    REQUIRE(port > 0);
    httplib::Client client("127.0.0.1", port);
    Scene empty = support::empty_scene().with_transceivers({node("AP1", {0, 0, 1.2})});

    auto created = client.Post("/api/scenes", serialize_scene(empty), "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    std::string id = json::parse(created->body)["id"];

    json req = {{"scene_id", id}, {"tx_id", "AP1"}, {"resolution_m", 1.0}, {"origin", {1.0, 0.0}}, {"size", {2, 1}}};
    auto submitted = client.Post("/api/heatmaps", req.dump(), "application/json");
    REQUIRE(submitted);
    CHECK(submitted->status == 202);
    CHECK(submitted->get_header_value("Location").rfind("/api/jobs/", 0) == 0);
    json job = json::parse(submitted->body);

    // Poll until done; status only moves forward.
    const std::vector<std::string> order{"queued", "running", "done"};
    std::size_t seen = 0;
    for (int i = 0; i < 600 && job["status"] != "done"; ++i)
    {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
        auto polled = client.Get("/api/jobs/" + job["id"].get<std::string>());
        REQUIRE(polled);
        job = json::parse(polled->body);
        auto at = std::find(order.begin(), order.end(), job["status"].get<std::string>()) - order.begin();
        CHECK(static_cast<std::size_t>(at) >= seen);
        seen = at;
    }
    REQUIRE(job["status"] == "done");
    auto result = client.Get(job["result"].get<std::string>());
    REQUIRE(result);
    CHECK(result->status == 200);
    CHECK(result->get_header_value("Content-Type") == "text/csv");
    CHECK(std::count(result->body.begin(), result->body.end(), '\n') == 6 + 2);

    auto bad = client.Post("/api/scenes", "{", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(bad->get_header_value("Content-Type") == "application/problem+json");
    service.stop();
}
