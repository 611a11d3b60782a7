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

#include "parallel.hpp"

#include <wavescope/digest.hpp>
#include <wavescope/errors.hpp>
#include <wavescope/localization.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace wavescope
{

namespace
{

std::vector<double> aligned(const RadioMap &map, const Observation &obs)
{
    bool ok = obs.rss.size() == map.streams.size();
    std::vector<double> v;
    if (ok)
        for (const auto &s : map.streams)
        {
            auto it = obs.rss.find(s);
            if (it == obs.rss.end())
            {
                ok = false;
                break;
            }
            v.push_back(it->second);
        }
    if (!ok)
    {
        std::vector<std::string> expected;
        for (const auto &s : map.streams)
            expected.push_back(s.label());
        std::string got;
        for (const auto &[s, value] : obs.rss)
            got += (got.empty() ? "" : ",") + s.label();
        throw StreamMismatchError("observation streams [" + got + "] do not match the radio map", expected);
    }
    for (double x : v)
        if (!std::isfinite(x))
            throw ArgumentError("observation contains a non-finite RSS value");
    return v;
}

} // namespace

NnMatch nearest_neighbor(const RadioMap &map, const Observation &obs)
{
    if (map.fingerprints.empty())
        throw ArgumentError("radio map is empty");
    const std::vector<double> v = aligned(map, obs);
    const Fingerprint *best = nullptr;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto &fp : map.fingerprints)
    {
        double d2 = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k)
            d2 += (fp.rss[k] - v[k]) * (fp.rss[k] - v[k]);
        // fingerprints may arrive in any order; ties resolve on the id
        if (d2 < best_d2 || (d2 == best_d2 && best && fp.location_id < best->location_id))
        {
            best_d2 = d2;
            best = &fp;
        }
    }
    NnMatch m;
    m.location_id = best->location_id;
    m.distance = std::sqrt(best_d2);
    if (auto it = map.locations.find(best->location_id); it != map.locations.end())
        m.position = it->second;
    return m;
}

int localize_nn(const RadioMap &map, const Observation &obs) { return nearest_neighbor(map, obs).location_id; }

LocalizationReport evaluate(const RadioMap &train, std::span<const Observation> test, int threads)
{
    if (test.empty())
        throw ArgumentError("test set is empty");
    for (std::size_t i = 0; i < test.size(); ++i)
        if (!test[i].truth_location)
            throw ArgumentError("test observation " + std::to_string(i) + " has no truth location");

    LocalizationReport r;
    r.per_observation.resize(test.size());
    detail::parallel_for(test.size(), threads, [&](std::size_t i) {
        NnMatch m = nearest_neighbor(train, test[i]);
        ObservationResult &o = r.per_observation[i];
        o.truth_id = test[i].truth_id;
        o.truth = *test[i].truth_location;
        o.estimated = m.location_id;
        o.rss_distance = m.distance;
        o.error = std::hypot(m.position.x - o.truth.x, m.position.y - o.truth.y);
    });

    std::map<int, LocationError> by_location;
    double sum = 0.0, sum_entity = 0.0;
    int entity = 0;
    const bool passive = train.kind == MapKind::passive;
    for (const auto &o : r.per_observation)
    {
        sum += o.error;
        if (o.truth_id)
        {
            auto &e = by_location[*o.truth_id];
            e.location_id = *o.truth_id;
            ++e.observations;
            e.mean_error += o.error;
            e.correct += o.estimated == *o.truth_id;
        }
        if (passive && o.truth_id == 0)
        {
            ++r.silence_observations;
            r.silence_detected += o.estimated == 0;
        }
        else
        {
            sum_entity += o.error;
            ++entity;
            r.false_silence += passive && o.estimated == 0;
        }
    }
    r.mean_error = sum / static_cast<double>(test.size());
    r.mean_error_without_silence = entity ? sum_entity / entity : 0.0;
    for (auto &[id, e] : by_location)
    {
        e.mean_error /= e.observations;
        r.per_location.push_back(e);
    }
    return r;
}

std::string write_localization_detail(const LocalizationReport &report)
{
    std::ostringstream os;
    os << "observation,truth_id,estimated_id,rss_distance_db,error_m\n";
    for (std::size_t i = 0; i < report.per_observation.size(); ++i)
    {
        const auto &o = report.per_observation[i];
        os << i << "," << (o.truth_id ? std::to_string(*o.truth_id) : "") << "," << o.estimated << ","
           << format_fixed(o.rss_distance, 3) << "," << format_fixed(o.error, 3) << "\n";
    }
    return os.str();
}

std::string write_location_errors(const LocalizationReport &report)
{
    std::ostringstream os;
    os << "location_id,observations,correct,mean_error_m\n";
    for (const auto &e : report.per_location)
        os << e.location_id << "," << e.observations << "," << e.correct << "," << format_fixed(e.mean_error, 3)
           << "\n";
    return os.str();
}

} // namespace wavescope
