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

#ifndef WAVESCOPE_SCENARIOS_HPP
#define WAVESCOPE_SCENARIOS_HPP

#include <wavescope/localization.hpp>
#include <wavescope/radiomap.hpp>
#include <wavescope/testbed.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wavescope
{

// Several patterns may be combined (crowds around both APs); empty means no crowd.
using CrowdCondition = std::vector<CrowdPattern>;

std::string describe(const CrowdCondition &condition);

struct ScenarioConfig
{
    std::string label;       // directory name, [a-z0-9_.-]
    std::string experiment;  // human-readable row title
    TestbedKind kind = TestbedKind::device_based;
    Mounting mounting = Mounting::wall;
    double frequency_hz = 2.4e9;
    CrowdCondition train_condition, test_condition;
    bool outsider = false;  // device-free only: seal the right-hand bedroom
    HumanCylinder entity{};
    PropagationConfig propagation{};
    double device_height = 1.2;
    bool include_carrier = true;
    int samples_per_location = 100;
    double noise_sigma_db = 3.0;
    std::uint64_t seed = 0;
    std::optional<double> paper_error_m;
    std::string paper_table;

    // Throws ArgumentError.
    void validate() const;
};

struct StreamDeviation
{
    StreamId stream;
    std::vector<int> attenuated;  // locations more than 3 dB below silence
    std::vector<int> corridor;    // locations whose entity intersects the stream's line of sight
};

struct ScenarioReport
{
    ScenarioConfig config;
    RadioMap train_map, test_map;
    std::optional<LocalizationReport> localization;  // absent for the outsider experiment
    double mean_error = 0.0;
    std::vector<std::string> crowd_notes;
    double rss_variance = 0.0;  // across locations (silence excluded), averaged over streams
    std::vector<StreamDeviation> deviations;  // passive maps only
};

// Locations whose entity cylinder (standing at the location) crosses the segment tx-rx.
std::vector<int> los_corridor(const Testbed &testbed, const Transceiver &tx, const Transceiver &rx,
                              const HumanCylinder &entity);

// Mean over streams of the population variance of RSS across map locations.
double rss_variance(const RadioMap &map);

// Shares radio maps between scenarios of one suite run (same inputs, same map).
class MapCache
{
  public:
    MapCache();
    ~MapCache();
    struct Entry;
    std::shared_ptr<const Entry> get(const std::string &key) const;
    void put(const std::string &key, std::shared_ptr<const Entry> entry);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct MapCache::Entry
{
    RadioMap map;
    std::vector<std::string> crowd_notes;
};

// Runs one scenario on the testbed (mounting and frequency are applied from the config).
ScenarioReport run_scenario(const ScenarioConfig &config, const Testbed &testbed, int threads = 0,
                            MapCache *cache = nullptr);

// Loads the fixture testbed for the config's kind; throws IoError when it is missing.
ScenarioReport run_scenario(const ScenarioConfig &config, int threads = 0, const std::string &fixtures = {});

struct SuiteOverrides
{
    std::optional<double> frequency_hz;  // keep only rows at this frequency
    std::optional<Mounting> mounting;    // keep only rows with this mounting
    std::uint64_t seed = 0;
    std::optional<double> noise_sigma_db;
    std::optional<int> samples_per_location;
    std::optional<int> ring_count;   // people per AP ring
    std::optional<int> party_count;
    std::optional<PropagationConfig> propagation;
    int threads = 0;
    std::string fixtures;  // empty = fixtures_directory()
};

std::vector<ScenarioConfig> device_based_suite(const SuiteOverrides &overrides = {});
std::vector<ScenarioConfig> device_free_suite(const SuiteOverrides &overrides = {});

std::vector<ScenarioReport> run_device_based_suite(const SuiteOverrides &overrides = {});
std::vector<ScenarioReport> run_device_free_suite(const SuiteOverrides &overrides = {});
ScenarioReport run_outsider_experiment(const ScenarioConfig &config, int threads = 0,
                                       const std::string &fixtures = {});

// Stream reported by the outsider experiment.
inline const StreamId outsider_stream{"AP2", "MP2"};

// Output tree: <dir>/<label>/{report.txt, rss_series.csv, train_radiomap.csv,
// test_radiomap.csv, localization.csv, location_errors.csv, manifest.txt}; suite level
// summary.tsv and manifest.txt. Returns the files written (relative, sorted).
std::vector<std::string> write_scenario_outputs(const ScenarioReport &report, const std::string &directory);
void write_suite_outputs(const std::vector<ScenarioReport> &reports, const std::string &directory);

std::string report_text(const ScenarioReport &report);
std::string summary_table(const std::vector<ScenarioReport> &reports);

// Scenario config documents (same JSON dialect as scenes).
ScenarioConfig parse_scenario_config(std::string_view document);
std::string serialize_scenario_config(const ScenarioConfig &config);
PropagationConfig parse_propagation_config(std::string_view document);

} // namespace wavescope

#endif
