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

#ifndef WAVESCOPE_SERVICE_HPP
#define WAVESCOPE_SERVICE_HPP

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wavescope
{

struct ServiceOptions
{
    std::string fixtures;   // empty = fixtures_directory()
    int threads = 0;        // engine threads per job
    std::string shared_secret;  // when set, requests must carry it in X-Wavescope-Token
};

struct HttpResponse
{
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
};

// Routes:
//   POST /api/scenes            scene document -> {id} (content addressed)
//   GET  /api/scenes/{id}       canonical scene document
//   POST /api/heatmaps          {scene_id, tx_id, resolution_m, z, origin, size, config} -> job
//   POST /api/radiomaps         {scene_id, kind, aps, mps, locations, device_height,
//                                include_carrier, entity, config} -> job
//   POST /api/localize          {map_id, observation: {"AP1>MP1": dBm, ...}}
//   POST /api/scenarios         scenario config document (+ optional scene_id) -> job
//   GET  /api/jobs/{id}         job record
//   GET  /api/results/{id}      finished result
// Errors are problem documents {status, title, pointer}.
class Service
{
  public:
    explicit Service(ServiceOptions options = {});
    ~Service();
    Service(const Service &) = delete;
    Service &operator=(const Service &) = delete;

    // Transport-independent entry point; the HTTP server forwards every request here.
    HttpResponse handle(std::string_view method, std::string_view path, std::string_view body,
                        const std::map<std::string, std::string> &headers = {});

    // Blocks until every queued job has finished.
    void wait_idle();

    // Starts the HTTP listener on a background thread; port 0 picks a free port. Returns
    // the bound port or throws IoError.
    int start(const std::string &host, int port);
    // Blocking variant for the CLI.
    void serve(const std::string &host, int port);
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace wavescope

#endif
