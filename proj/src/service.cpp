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

#include "documents.hpp"

#include <wavescope/digest.hpp>
#include <wavescope/errors.hpp>
#include <wavescope/heatmap.hpp>
#include <wavescope/localization.hpp>
#include <wavescope/scenarios.hpp>
#include <wavescope/service.hpp>

#include <httplib.h>

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <thread>

namespace wavescope
{

using doc::json;

namespace
{

enum class JobStatus
{
    queued,
    running,
    done,
    failed
};

const char *to_string(JobStatus s)
{
    switch (s)
    {
    case JobStatus::queued:
        return "queued";
    case JobStatus::running:
        return "running";
    case JobStatus::done:
        return "done";
    case JobStatus::failed:
        return "failed";
    }
    return "failed";
}

struct Problem
{
    int status;
    std::string title, pointer;
    json extra = json::object();
};

struct Job
{
    std::string id, kind;
    JobStatus status = JobStatus::queued;
    double progress = 0.0;
    std::string result_id;
    std::optional<Problem> error;
};

struct Result
{
    std::string content_type, body;
};

// Thrown inside handlers to produce a problem response.
struct HttpError
{
    Problem problem;
};

[[noreturn]] void fail(int status, std::string title, std::string pointer = "")
{
    throw HttpError{{status, std::move(title), std::move(pointer)}};
}

json problem_json(const Problem &p)
{
    json j = {{"status", p.status}, {"title", p.title}, {"pointer", p.pointer}};
    for (auto it = p.extra.begin(); it != p.extra.end(); ++it)
        j[it.key()] = it.value();
    return j;
}

HttpResponse problem_response(const Problem &p)
{
    HttpResponse r;
    r.status = p.status;
    r.content_type = "application/problem+json";
    r.body = problem_json(p).dump() + "\n";
    return r;
}

HttpResponse json_response(int status, const json &j)
{
    HttpResponse r;
    r.status = status;
    r.body = j.dump() + "\n";
    return r;
}

// Engine exceptions as problem documents; job failures carry the same detail.
Problem problem_of(const std::exception_ptr &e)
{
    try
    {
        std::rethrow_exception(e);
    }
    catch (const HttpError &h)
    {
        return h.problem;
    }
    catch (const SchemaError &s)
    {
        return {400, s.what(), s.pointer()};
    }
    catch (const StreamMismatchError &s)
    {
        Problem p{409, s.what(), "/observation"};
        p.extra["expected"] = s.expected();
        return p;
    }
    catch (const NotFoundError &s)
    {
        return {404, s.what(), ""};
    }
    catch (const ArgumentError &s)
    {
        return {400, s.what(), ""};
    }
    catch (const IoError &s)
    {
        return {500, s.what(), ""};
    }
    catch (const std::exception &s)
    {
        return {500, std::string("internal error: ") + s.what(), ""};
    }
    catch (...)
    {
        return {500, "internal error", ""};
    }
}

std::vector<std::string> split_path(std::string_view path)
{
    if (auto q = path.find('?'); q != std::string_view::npos)
        path = path.substr(0, q);
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size())
    {
        auto slash = path.find('/', start);
        if (slash == std::string_view::npos)
            slash = path.size();
        if (slash > start)
            parts.emplace_back(path.substr(start, slash - start));
        start = slash + 1;
    }
    return parts;
}

json body_json(std::string_view body)
{
    json j = doc::parse(body);
    if (!j.is_object())
        throw SchemaError("", "expected a JSON object");
    return j;
}

} // namespace

struct Service::Impl
{
    ServiceOptions options;

    std::shared_mutex store_mutex;
    std::map<std::string, Scene> scenes;
    std::map<std::string, Result> results;
    std::map<std::string, RadioMap> maps;  // keyed by result id

    std::mutex job_mutex;
    std::condition_variable job_cv, idle_cv;
    std::map<std::string, Job> jobs;
    std::deque<std::pair<std::string, std::function<Result(Job &)>>> queue;
    std::size_t next_job = 1;
    bool busy = false, stopping = false;
    std::jthread worker;

    std::unique_ptr<httplib::Server> server;
    std::jthread listener;

    explicit Impl(ServiceOptions o) : options(std::move(o))
    {
        worker = std::jthread([this] { run_jobs(); });
    }

    ~Impl()
    {
        {
            std::lock_guard lock(job_mutex);
            stopping = true;
        }
        job_cv.notify_all();
    }

    void run_jobs()
    {
        for (;;)
        {
            std::pair<std::string, std::function<Result(Job &)>> next;
            Job *current;
            {
                std::unique_lock lock(job_mutex);
                job_cv.wait(lock, [&] { return stopping || !queue.empty(); });
                if (stopping)
                    return;
                next = std::move(queue.front());
                queue.pop_front();
                busy = true;
                current = &jobs.at(next.first);  // map nodes are stable
                current->status = JobStatus::running;
            }
            Job &job = *current;
            std::optional<Result> result;
            std::optional<Problem> error;
            try
            {
                result = next.second(job);
            }
            catch (...)
            {
                error = problem_of(std::current_exception());
            }
            std::lock_guard lock(job_mutex);
            if (result)
            {
                {
                    std::unique_lock store(store_mutex);
                    results.emplace(job.result_id, std::move(*result));
                }
                job.progress = 1.0;
                job.status = JobStatus::done;
            }
            else
            {
                job.error = error;
                job.result_id.clear();
                job.status = JobStatus::failed;
            }
            busy = false;
            idle_cv.notify_all();
        }
    }

    json job_json(const Job &j)
    {
        json out = {{"id", j.id}, {"kind", j.kind}, {"status", to_string(j.status)}, {"progress", j.progress}};
        if (j.status == JobStatus::done)
        {
            out["result_id"] = j.result_id;
            out["result"] = "/api/results/" + j.result_id;
        }
        if (j.error)
            out["error"] = problem_json(*j.error);
        return out;
    }

    // Results are content addressed: an identical request reuses the finished result.
    HttpResponse submit(const std::string &kind, const std::string &request_key, std::function<Result(Job &)> work)
    {
        std::string result_id = kind + "-" + sha256_hex(request_key).substr(0, 32);
        std::lock_guard lock(job_mutex);
        Job job;
        job.id = "job-" + std::to_string(next_job++);
        job.kind = kind;
        job.result_id = result_id;
        bool cached;
        {
            std::shared_lock store(store_mutex);
            cached = results.contains(result_id);
        }
        if (cached)
        {
            job.status = JobStatus::done;
            job.progress = 1.0;
        }
        else
            queue.emplace_back(job.id, std::move(work));
        auto &stored = jobs[job.id] = job;
        job_cv.notify_all();
        HttpResponse r = json_response(202, job_json(stored));
        r.headers.emplace_back("Location", "/api/jobs/" + job.id);
        return r;
    }

    Scene scene_for(const json &req)
    {
        std::string id = doc::text(doc::require(req, "scene_id", ""), "/scene_id");
        std::shared_lock store(store_mutex);
        auto it = scenes.find(id);
        if (it == scenes.end())
            fail(404, "unknown scene '" + id + "'", "/scene_id");
        return it->second;
    }

    PropagationConfig config_of(const json &req)
    {
        auto it = req.find("config");
        return it == req.end() ? PropagationConfig{} : doc::propagation_from_json(*it, "/config");
    }

    int threads() const { return options.threads; }

    // -- routes --------------------------------------------------------------

    HttpResponse create_scene(std::string_view body)
    {
        Scene scene = parse_scene(body);
        std::string id = scene.digest();
        bool fresh;
        {
            std::unique_lock store(store_mutex);
            fresh = scenes.emplace(id, std::move(scene)).second;
        }
        HttpResponse r = json_response(fresh ? 201 : 200, {{"id", id}});
        r.headers.emplace_back("Location", "/api/scenes/" + id);
        return r;
    }

    HttpResponse get_scene(const std::string &id)
    {
        std::shared_lock store(store_mutex);
        auto it = scenes.find(id);
        if (it == scenes.end())
            fail(404, "unknown scene '" + id + "'");
        HttpResponse r;
        r.body = serialize_scene(it->second);
        return r;
    }

    HttpResponse heatmap(std::string_view body)
    {
        json req = body_json(body);
        Scene scene = scene_for(req);
        std::string tx_id = doc::text(doc::require(req, "tx_id", ""), "/tx_id");
        const Transceiver *tx = scene.find_transceiver(tx_id);
        if (!tx)
            fail(404, "unknown transceiver '" + tx_id + "'", "/tx_id");
        if (!tx->is_transmitter())
            fail(400, "transceiver '" + tx_id + "' is not an access point", "/tx_id");
        double res = doc::number(doc::require(req, "resolution_m", ""), "/resolution_m");
        double z = doc::number_or(req, "z", 1.2, "");
        GridSpec grid = doc::at("/resolution_m", [&] { return grid_over(scene, res, z); });
        if (auto it = req.find("origin"); it != req.end())
        {
            if (!it->is_array() || it->size() != 2)
                fail(400, "origin must be [x, y]", "/origin");
            grid.x0 = doc::number((*it)[0], "/origin/0");
            grid.y0 = doc::number((*it)[1], "/origin/1");
        }
        if (auto it = req.find("size"); it != req.end())
        {
            if (!it->is_array() || it->size() != 2)
                fail(400, "size must be [nx, ny]", "/size");
            auto nx = doc::integer((*it)[0], "/size/0"), ny = doc::integer((*it)[1], "/size/1");
            if (nx < 0 || ny < 0 || nx > 1'000'000 || ny > 1'000'000)
                fail(400, "grid size out of range", "/size");
            grid.nx = static_cast<int>(nx);
            grid.ny = static_cast<int>(ny);
        }
        doc::at("/size", [&] {
            grid.validate();
            return 0;
        });
        PropagationConfig config = config_of(req);
        std::string key = scene.digest() + "|" + tx_id + "|" + format_double(grid.x0) + "," + format_double(grid.y0) +
                          "," + format_double(grid.resolution) + "," + std::to_string(grid.nx) + "x" +
                          std::to_string(grid.ny) + "," + format_double(grid.z) + "|" + canonical_config(config);
        Transceiver source = *tx;
        return submit("heatmap", key, [this, scene, source, grid, config](Job &job) {
            Heatmap h = compute_heatmap(scene, source, grid, config, threads(), [&](int done, int total) {
                std::lock_guard lock(job_mutex);
                job.progress = static_cast<double>(done) / total;
            });
            return Result{"text/csv", write_heatmap(h)};
        });
    }

    std::vector<Transceiver> pick(const Scene &scene, const json &req, const char *key, Role role)
    {
        std::vector<Transceiver> out;
        auto it = req.find(key);
        if (it == req.end())
        {
            for (const auto &t : scene.transceivers())
                if (t.role == role)
                    out.push_back(t);
            return out;
        }
        if (!it->is_array())
            fail(400, "expected an array of transceiver ids", std::string("/") + key);
        for (std::size_t i = 0; i < it->size(); ++i)
        {
            std::string p = std::string("/") + key + "/" + std::to_string(i);
            std::string id = doc::text((*it)[i], p);
            const Transceiver *t = scene.find_transceiver(id);
            if (!t)
                fail(404, "unknown transceiver '" + id + "'", p);
            out.push_back(*t);
        }
        return out;
    }

    HttpResponse radiomap(std::string_view body)
    {
        json req = body_json(body);
        Scene scene = scene_for(req);
        MapKind kind = doc::at("/kind", [&] { return parse_map_kind(doc::text(doc::require(req, "kind", ""), "/kind")); });
        auto aps = pick(scene, req, "aps", Role::access_point);
        auto mps = pick(scene, req, "mps", Role::monitoring_point);
        std::vector<RadioLocation> locations = scene.locations();
        if (auto it = req.find("locations"); it != req.end())
        {
            if (!it->is_array())
                fail(400, "expected an array of [x, y, z]", "/locations");
            locations.clear();
            for (std::size_t i = 0; i < it->size(); ++i)
                locations.push_back(
                    {static_cast<int>(i) + 1, doc::vec3((*it)[i], "/locations/" + std::to_string(i))});
        }
        if (locations.empty())
            fail(400, "no radio-map locations given and the scene defines none", "/locations");
        if (aps.empty())
            fail(400, "no access points", "/aps");
        if (kind == MapKind::passive && mps.empty())
            fail(400, "no monitoring points", "/mps");
        ActiveMapOptions active;
        active.device_height = doc::number_or(req, "device_height", active.device_height, "");
        active.include_carrier = doc::boolean_or(req, "include_carrier", active.include_carrier, "");
        HumanCylinder entity;
        if (auto it = req.find("entity"); it != req.end())
            entity = doc::cylinder_from_json(*it, "/entity");
        active.carrier = entity;
        active.threads = threads();
        PropagationConfig config = config_of(req);

        std::string key = scene.digest() + "|" + std::string(wavescope::to_string(kind)) + "|" + canonical_config(config) +
                          "|" + format_double(active.device_height) + "|" + std::to_string(active.include_carrier) +
                          "|" + doc::cylinder_to_json(entity).dump();
        for (const auto &t : aps)
            key += "|ap:" + t.id;
        for (const auto &t : mps)
            key += "|mp:" + t.id;
        for (const auto &l : locations)
            key += "|" + std::to_string(l.id) + "@" + format_double(l.position.x) + "," + format_double(l.position.y) +
                   "," + format_double(l.position.z);
        return submit("radiomap", key, [=, this](Job &job) {
            RadioMap map = kind == MapKind::active
                               ? build_active_map(scene, aps, locations, config, active)
                               : build_passive_map(scene, aps, mps, locations, entity, config, threads());
            {
                std::unique_lock store(store_mutex);
                maps.emplace(job.result_id, map);
            }
            return Result{"text/csv", write_radiomap(map, 3)};
        });
    }

    HttpResponse localize(std::string_view body)
    {
        json req = body_json(body);
        std::string id = doc::text(doc::require(req, "map_id", ""), "/map_id");
        RadioMap map;
        {
            std::shared_lock store(store_mutex);
            auto it = maps.find(id);
            if (it == maps.end())
                fail(404, "unknown radio map '" + id + "'", "/map_id");
            map = it->second;
        }
        const json &o = doc::require(req, "observation", "");
        if (!o.is_object())
            fail(400, "observation must map stream labels to dBm", "/observation");
        Observation obs;
        for (auto it = o.begin(); it != o.end(); ++it)
        {
            std::string p = "/observation/" + it.key();
            StreamId s = doc::at(p, [&] { return StreamId::parse(it.key()); });
            obs.rss[s] = doc::number(it.value(), p);
        }
        NnMatch m = nearest_neighbor(map, obs);
        return json_response(200, {{"location_id", m.location_id},
                                   {"position", doc::to_json(m.position)},
                                   {"distance_db", m.distance}});
    }

    HttpResponse scenario(std::string_view body)
    {
        json req = body_json(body);
        std::optional<Scene> scene;
        if (req.contains("scene_id"))
            scene = scene_for(req);
        ScenarioConfig config = doc::scenario_from_json(req, "");
        std::string fixtures = options.fixtures.empty() ? fixtures_directory() : options.fixtures;
        std::string key = doc::scenario_to_json(config).dump() + "|" + (scene ? scene->digest() : "fixture:" + fixtures);
        return submit("scenario", key, [=, this](Job &) {
            ScenarioReport r = scene ? run_scenario(config, testbed_from_scene(*scene, config.mounting), threads())
                                     : run_scenario(config, threads(), fixtures);
            return Result{"text/plain", report_text(r)};
        });
    }

    HttpResponse get_job(const std::string &id)
    {
        std::lock_guard lock(job_mutex);
        auto it = jobs.find(id);
        if (it == jobs.end())
            fail(404, "unknown job '" + id + "'");
        return json_response(200, job_json(it->second));
    }

    HttpResponse get_result(const std::string &id)
    {
        std::shared_lock store(store_mutex);
        auto it = results.find(id);
        if (it == results.end())
            fail(404, "unknown or unfinished result '" + id + "'");
        HttpResponse r;
        r.content_type = it->second.content_type;
        r.body = it->second.body;
        return r;
    }

    HttpResponse route(std::string_view method, std::string_view path, std::string_view body,
                       const std::map<std::string, std::string> &headers)
    {
        if (!options.shared_secret.empty())
        {
            auto it = headers.find("X-Wavescope-Token");
            if (it == headers.end() || it->second != options.shared_secret)
                fail(401, "missing or wrong X-Wavescope-Token");
        }
        auto parts = split_path(path);
        if (parts.size() < 2 || parts[0] != "api")
            fail(404, "no such route");
        const std::string &res = parts[1];
        const bool post = method == "POST", get = method == "GET";
        if (parts.size() == 2 && post)
        {
            if (res == "scenes")
                return create_scene(body);
            if (res == "heatmaps")
                return heatmap(body);
            if (res == "radiomaps")
                return radiomap(body);
            if (res == "localize")
                return localize(body);
            if (res == "scenarios")
                return scenario(body);
        }
        if (parts.size() == 3 && get)
        {
            if (res == "scenes")
                return get_scene(parts[2]);
            if (res == "jobs")
                return get_job(parts[2]);
            if (res == "results")
                return get_result(parts[2]);
        }
        static const std::set<std::string> known{"scenes", "heatmaps", "radiomaps", "localize", "scenarios", "jobs",
                                                 "results"};
        if (known.contains(res) && parts.size() <= 3)
            fail(405, "method not allowed");
        fail(404, "no such route");
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service()
{
    stop();
}

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body,
                             const std::map<std::string, std::string> &headers)
{
    try
    {
        return impl_->route(method, path, body, headers);
    }
    catch (...)
    {
        return problem_response(problem_of(std::current_exception()));
    }
}

void Service::wait_idle()
{
    std::unique_lock lock(impl_->job_mutex);
    impl_->idle_cv.wait(lock, [&] { return impl_->queue.empty() && !impl_->busy; });
}

namespace
{

void install(httplib::Server &server, Service &service)
{
    auto forward = [&service](const httplib::Request &req, httplib::Response &res) {
        std::map<std::string, std::string> headers(req.headers.begin(), req.headers.end());
        HttpResponse r = service.handle(req.method, req.path, req.body, headers);
        res.status = r.status;
        for (const auto &[k, v] : r.headers)
            res.set_header(k, v);
        res.set_content(r.body, r.content_type);
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
    server.Put(".*", forward);
    server.Delete(".*", forward);
    server.Patch(".*", forward);
}

} // namespace

int Service::start(const std::string &host, int port)
{
    stop();
    impl_->server = std::make_unique<httplib::Server>();
    install(*impl_->server, *this);
    int bound = port == 0 ? impl_->server->bind_to_any_port(host) : (impl_->server->bind_to_port(host, port) ? port : -1);
    if (bound < 0)
        throw IoError("cannot bind " + host + ":" + std::to_string(port));
    impl_->listener = std::jthread([s = impl_->server.get()] { s->listen_after_bind(); });
    impl_->server->wait_until_ready();
    return bound;
}

void Service::serve(const std::string &host, int port)
{
    httplib::Server server;
    install(server, *this);
    if (!server.bind_to_port(host, port))
        throw IoError("cannot bind " + host + ":" + std::to_string(port));
    server.listen_after_bind();
}

void Service::stop()
{
    if (impl_->server)
    {
        impl_->server->stop();
        if (impl_->listener.joinable())
            impl_->listener.join();
        impl_->server.reset();
    }
}

} // namespace wavescope
