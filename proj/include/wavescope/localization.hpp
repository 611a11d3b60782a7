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

#ifndef WAVESCOPE_LOCALIZATION_HPP
#define WAVESCOPE_LOCALIZATION_HPP

#include <wavescope/radiomap.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavescope
{

struct NnMatch
{
    int location_id = 0;
    double distance = 0.0;  // Euclidean, dB
    Vec3 position{};
};

// Nearest fingerprint in RSS space; ties go to the lowest location_id. Throws
// StreamMismatchError when the observation's stream set differs from the map's and
// ArgumentError on an empty map.
NnMatch nearest_neighbor(const RadioMap &map, const Observation &obs);
int localize_nn(const RadioMap &map, const Observation &obs);

struct ObservationResult
{
    std::optional<int> truth_id;
    Vec3 truth{};
    int estimated = 0;
    double rss_distance = 0.0;
    double error = 0.0;  // horizontal metres
};

struct LocationError
{
    int location_id = 0;
    int observations = 0;
    double mean_error = 0.0;
    int correct = 0;  // estimates equal to the true location id
};

struct LocalizationReport
{
    std::vector<ObservationResult> per_observation;
    double mean_error = 0.0;
    std::vector<LocationError> per_location;  // by truth id, ascending

    // Passive maps: silence observations and silence estimates are reported apart.
    int silence_observations = 0;
    int silence_detected = 0;        // silence observations classified as location 0
    int false_silence = 0;           // entity observations classified as location 0
    double mean_error_without_silence = 0.0;
};

// Throws ArgumentError on an empty test set or an observation without truth_location.
LocalizationReport evaluate(const RadioMap &train, std::span<const Observation> test, int threads = 0);

// "observation,truth_id,estimated_id,rss_distance_db,error_m" rows.
std::string write_localization_detail(const LocalizationReport &report);
// "location_id,observations,correct,mean_error_m" rows.
std::string write_location_errors(const LocalizationReport &report);

} // namespace wavescope

#endif
