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
#include <wavescope/scenarios.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

namespace wavescope
{

namespace fs = std::filesystem;

std::string describe(const CrowdCondition &condition)
{
    if (condition.empty())
        return "none";
    std::string out;
    for (const auto &p : condition)
        out += (out.empty() ? "" : "+") + p.describe();
    return out;
}

void ScenarioConfig::validate() const
{
    if (label.empty() || label.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_.-") != std::string::npos ||
        label == "." || label == "..")
        throw ArgumentError("scenario label '" + label + "' must be non-empty and use only [a-z0-9_.-]");
    if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
        throw ArgumentError("frequency must be positive");
    if (samples_per_location < 1)
        throw ArgumentError("samples_per_location must be >= 1");
    if (!(noise_sigma_db >= 0.0) || !std::isfinite(noise_sigma_db))
        throw ArgumentError("noise_sigma_db must be finite and non-negative");
    if (outsider && kind != TestbedKind::device_free)
        throw ArgumentError("the outsider experiment needs the device-free testbed");
    propagation.validate();
}

// ---------------------------------------------------------------------------

struct MapCache::Impl
{
    mutable std::mutex m;
    std::map<std::string, std::shared_ptr<const Entry>> entries;
};

MapCache::MapCache() : impl_(std::make_unique<Impl>()) {}
MapCache::~MapCache() = default;

std::shared_ptr<const MapCache::Entry> MapCache::get(const std::string &key) const
{
    std::lock_guard lock(impl_->m);
    auto it = impl_->entries.find(key);
    return it == impl_->entries.end() ? nullptr : it->second;
}

void MapCache::put(const std::string &key, std::shared_ptr<const Entry> entry)
{
    std::lock_guard lock(impl_->m);
    impl_->entries.emplace(key, std::move(entry));
}

// ---------------------------------------------------------------------------

std::vector<int> los_corridor(const Testbed &testbed, const Transceiver &tx, const Transceiver &rx,
                              const HumanCylinder &entity)
{
    std::vector<int> out;
    const Vec3 d = rx.position - tx.position;
    const double len = norm(d);
    if (len == 0.0)
        return out;
    for (const auto &l : testbed.locations)
    {
        HumanCylinder c = entity;
        c.center_base = {l.position.x, l.position.y, testbed.scene.bounds().lo.z};
        Scene alone(testbed.scene.bounds(), testbed.scene.ceiling_height(), {}, {}, {c}, {});
        if (intersect_ray(alone, tx.position, d / len, len))
            out.push_back(l.id);
    }
    return out;
}

double rss_variance(const RadioMap &map)
{
    double total = 0.0;
    for (std::size_t k = 0; k < map.streams.size(); ++k)
    {
        double sum = 0.0, sum2 = 0.0;
        int n = 0;
        for (const auto &fp : map.fingerprints)
            if (fp.location_id != 0)
            {
                sum += fp.rss[k];
                ++n;
            }
        double mean = n ? sum / n : 0.0;
        for (const auto &fp : map.fingerprints)
            if (fp.location_id != 0)
                sum2 += (fp.rss[k] - mean) * (fp.rss[k] - mean);
        total += n ? sum2 / n : 0.0;
    }
    return map.streams.empty() ? 0.0 : total / static_cast<double>(map.streams.size());
}

namespace
{

constexpr double attenuation_threshold_db = 3.0;
constexpr double crowd_keep_out_m = 0.45;

Testbed configured(const Testbed &base, const ScenarioConfig &config)
{
    Testbed tb = testbed_from_scene(base.scene, config.mounting);
    std::vector<Transceiver> nodes = tb.scene.transceivers();
    for (auto &t : nodes)
        t.frequency_hz = config.frequency_hz;
    Scene scene = tb.scene.with_transceivers(nodes);
    if (config.outsider)
        scene = seal_sub_area(scene);
    return testbed_from_scene(scene, config.mounting);
}

std::vector<Vec3> keep_out_points(const Testbed &tb, const ScenarioConfig &config)
{
    std::vector<Vec3> pts;
    for (const auto &l : tb.locations)
    {
        pts.push_back(l.position);
        if (config.kind == TestbedKind::device_based && config.include_carrier)
            pts.push_back(l.position + ActiveMapOptions{}.carrier_offset);
    }
    for (const auto &m : tb.monitoring_points)
        pts.push_back(m.position);
    return pts;
}

std::shared_ptr<const MapCache::Entry> build_map(const Testbed &tb, const ScenarioConfig &config,
                                                 const CrowdCondition &condition, int threads, MapCache *cache)
{
    std::ostringstream key;
    key << tb.scene.digest() << "|" << to_string(config.kind) << "|" << describe(condition) << "|"
        << canonical_config(config.propagation) << "|" << format_double(config.device_height) << "|"
        << config.include_carrier << "|" << format_double(config.entity.radius) << ","
        << format_double(config.entity.height) << "," << config.entity.material.name;
    if (cache)
        if (auto hit = cache->get(key.str()))
            return hit;

    auto entry = std::make_shared<MapCache::Entry>();
    Scene scene = tb.scene;
    for (CrowdPattern p : condition)
    {
        if (p.keep_out.empty())
        {
            p.keep_out = keep_out_points(tb, config);
            p.keep_out_radius = crowd_keep_out_m;
        }
        CrowdPlacement placed = apply_crowd(scene, p);
        scene = placed.scene;
        entry->crowd_notes.push_back(p.describe() + ": " + std::to_string(placed.placed.size()) + " placed");
        for (const auto &c : placed.placed)
            entry->crowd_notes.push_back("  person at (" + format_fixed(c.x, 3) + ", " + format_fixed(c.y, 3) + ")");
        for (const auto &s : placed.skipped)
            entry->crowd_notes.push_back("  " + s);
    }
    if (config.kind == TestbedKind::device_based)
    {
        ActiveMapOptions options;
        options.device_height = config.device_height;
        options.include_carrier = config.include_carrier;
        options.carrier = config.entity;
        options.threads = threads;
        entry->map = build_active_map(scene, tb.access_points, tb.locations, config.propagation, options);
    }
    else
        entry->map = build_passive_map(scene, tb.access_points, tb.monitoring_points, tb.locations, config.entity,
                                       config.propagation, threads);
    if (cache)
        cache->put(key.str(), entry);
    return entry;
}

} // namespace

ScenarioReport run_scenario(const ScenarioConfig &config, const Testbed &testbed, int threads, MapCache *cache)
{
    config.validate();
    const Testbed tb = configured(testbed, config);
    ScenarioReport r;
    r.config = config;

    auto train = build_map(tb, config, config.train_condition, threads, cache);
    auto test = describe(config.test_condition) == describe(config.train_condition)
                    ? train
                    : build_map(tb, config, config.test_condition, threads, cache);
    r.train_map = train->map;
    r.test_map = test->map;
    for (const auto &n : train->crowd_notes)
        r.crowd_notes.push_back("train " + n);
    if (test != train)
        for (const auto &n : test->crowd_notes)
            r.crowd_notes.push_back("test " + n);
    r.rss_variance = rss_variance(r.train_map);

    if (!config.outsider)
    {
        auto observations =
            sample_observations(r.test_map, config.samples_per_location, config.noise_sigma_db, config.seed);
        r.localization = evaluate(r.train_map, observations, threads);
        r.mean_error = r.localization->mean_error;
    }

    if (config.kind == TestbedKind::device_free)
    {
        const Fingerprint *silence = r.test_map.find(0);
        for (std::size_t k = 0; k < r.test_map.streams.size(); ++k)
        {
            StreamDeviation d;
            d.stream = r.test_map.streams[k];
            for (const auto &fp : r.test_map.fingerprints)
                if (fp.location_id != 0 && fp.rss[k] < silence->rss[k] - attenuation_threshold_db)
                    d.attenuated.push_back(fp.location_id);
            d.corridor = los_corridor(tb, tb.scene.transceiver(d.stream.tx_id), tb.scene.transceiver(d.stream.rx_id),
                                      config.entity);
            r.deviations.push_back(std::move(d));
        }
    }
    return r;
}

ScenarioReport run_scenario(const ScenarioConfig &config, int threads, const std::string &fixtures)
{
    return run_scenario(config, load_testbed(config.kind, config.mounting, fixtures.empty() ? fixtures_directory() : fixtures),
                        threads);
}

// ---------------------------------------------------------------------------
// Suites

namespace
{

ScenarioConfig row(const SuiteOverrides &o, TestbedKind kind, std::string label, std::string experiment,
                   Mounting mounting, double frequency, std::optional<double> paper, std::string table)
{
    ScenarioConfig c;
    c.kind = kind;
    c.label = std::move(label);
    c.experiment = std::move(experiment);
    c.mounting = mounting;
    c.frequency_hz = frequency;
    c.paper_error_m = paper;
    c.paper_table = std::move(table);
    c.seed = o.seed;
    if (o.noise_sigma_db)
        c.noise_sigma_db = *o.noise_sigma_db;
    if (o.samples_per_location)
        c.samples_per_location = *o.samples_per_location;
    if (o.propagation)
        c.propagation = *o.propagation;
    return c;
}

std::vector<ScenarioConfig> filtered(std::vector<ScenarioConfig> rows, const SuiteOverrides &o)
{
    std::erase_if(rows, [&](const ScenarioConfig &c) {
        return (o.frequency_hz && c.frequency_hz != *o.frequency_hz) || (o.mounting && c.mounting != *o.mounting);
    });
    return rows;
}

} // namespace

std::vector<ScenarioConfig> device_based_suite(const SuiteOverrides &o)
{
    const auto kind = TestbedKind::device_based;
    const int ring = o.ring_count.value_or(12), party = o.party_count.value_or(10);
    // the operating-phase party and the calibration-phase crowd are different draws
    const CrowdCondition test_party{CrowdPattern::party(party, o.seed + 1)};
    const CrowdCondition train_party{CrowdPattern::party(party, o.seed + 2)};
    const double f24 = 2.4e9, f57 = 5.7e9;
    using enum Mounting;

    std::vector<ScenarioConfig> rows;
    rows.push_back(row(o, kind, "db_base", "Base exp.", wall, f24, 1.84, "Table 2"));
    rows.push_back(row(o, kind, "db_ceiling", "Exp. 1: Ceiling-mounted APs", ceiling, f24, 1.00, "Table 2"));
    rows.push_back(row(o, kind, "db_freq_5.7ghz", "Exp. 2: Freq. 5.7 GHz", wall, f57, 1.55, "Table 2"));
    auto crowd = [&](std::string label, std::string title, double paper, CrowdCondition test) {
        auto c = row(o, kind, std::move(label), std::move(title), wall, f24, paper, "Table 2");
        c.test_condition = std::move(test);
        rows.push_back(std::move(c));
    };
    crowd("db_crowd_ap1", "Exp. 3: Crowd around AP1", 2.36, {CrowdPattern::around_ap("AP1", ring)});
    crowd("db_crowd_ap2", "Exp. 3: Crowd around AP2", 3.06, {CrowdPattern::around_ap("AP2", ring)});
    crowd("db_crowd_both", "Exp. 3: Crowd around both APs", 3.03,
          {CrowdPattern::around_ap("AP1", ring), CrowdPattern::around_ap("AP2", ring)});
    auto party_row = [&](std::string label, std::string title, Mounting m, double paper, std::string table,
                         bool trained_with_crowd) {
        auto c = row(o, kind, std::move(label), std::move(title), m, f24, paper, std::move(table));
        c.test_condition = test_party;
        if (trained_with_crowd)
            c.train_condition = train_party;
        rows.push_back(std::move(c));
    };
    party_row("db_party_wall", "Exp. 3: Party, wall-mounted APs", wall, 2.02, "Table 2", false);
    party_row("db_party_ceiling", "Exp. 3: Party, ceiling-mounted APs", ceiling, 1.64, "Table 2", false);
    party_row("db_party_wall_trained_crowd", "Party: wall APs, trained with crowd", wall, 2.35, "Table 3", true);
    party_row("db_party_wall_trained_no_crowd", "Party: wall APs, trained with no crowd", wall, 2.02, "Table 3", false);
    party_row("db_party_ceiling_trained_crowd", "Party: ceiling APs, trained with crowd", ceiling, 2.09, "Table 3",
              true);
    party_row("db_party_ceiling_trained_no_crowd", "Party: ceiling APs, trained with no crowd", ceiling, 1.64,
              "Table 3", false);
    return filtered(std::move(rows), o);
}

std::vector<ScenarioConfig> device_free_suite(const SuiteOverrides &o)
{
    const auto kind = TestbedKind::device_free;
    using enum Mounting;
    std::vector<ScenarioConfig> rows;
    rows.push_back(row(o, kind, "df_base", "Base exp.", wall, 2.4e9, 1.44, "Table 4"));
    rows.push_back(row(o, kind, "df_ceiling", "Exp. 1: Ceiling-mounted APs", ceiling, 2.4e9, 4.48, "Table 4"));
    rows.push_back(row(o, kind, "df_freq_5.7ghz", "Exp. 2: Freq. 5.7 GHz", wall, 5.7e9, 1.77, "Table 4"));
    auto outsider = row(o, kind, "df_outsider", "Exp. 3: Outsiders effect", wall, 2.4e9, std::nullopt, "");
    outsider.outsider = true;
    rows.push_back(std::move(outsider));
    return filtered(std::move(rows), o);
}

namespace
{

std::vector<ScenarioReport> run_rows(const std::vector<ScenarioConfig> &rows, const SuiteOverrides &o)
{
    std::vector<ScenarioReport> out;
    if (rows.empty())
        return out;
    const std::string dir = o.fixtures.empty() ? fixtures_directory() : o.fixtures;
    const Testbed tb = load_testbed(rows.front().kind, Mounting::wall, dir);
    MapCache cache;
    for (const auto &c : rows)
        out.push_back(run_scenario(c, tb, o.threads, &cache));
    return out;
}

} // namespace

std::vector<ScenarioReport> run_device_based_suite(const SuiteOverrides &o) { return run_rows(device_based_suite(o), o); }

std::vector<ScenarioReport> run_device_free_suite(const SuiteOverrides &o) { return run_rows(device_free_suite(o), o); }

ScenarioReport run_outsider_experiment(const ScenarioConfig &config, int threads, const std::string &fixtures)
{
    ScenarioConfig c = config;
    c.kind = TestbedKind::device_free;
    c.outsider = true;
    return run_scenario(c, threads, fixtures);
}

// ---------------------------------------------------------------------------
// Output

namespace
{

std::string join(const std::vector<int> &ids)
{
    std::string s;
    for (int id : ids)
        s += (s.empty() ? "" : " ") + std::to_string(id);
    return s.empty() ? "-" : s;
}

std::string paper_text(const ScenarioConfig &c)
{
    return c.paper_error_m ? format_fixed(*c.paper_error_m, 2) : "-";
}

std::string frequency_text(double hz) { return format_double(hz / 1e9) + " GHz"; }

void write_file(const fs::path &path, const std::string &content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot write " + path.string());
    f << content;
    if (!f)
        throw IoError("write failed: " + path.string());
}

std::string read_file(const fs::path &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string manifest_of(const fs::path &root, const std::vector<std::string> &files)
{
    std::string out;
    for (const auto &f : files)
        out += sha256_hex(read_file(root / f)) + "  " + f + "\n";
    return out;
}

std::string series_for(const RadioMap &map, const std::optional<StreamId> &only)
{
    if (!only)
        return write_rss_series(map);
    std::ostringstream os;
    os << "location_id,stream,rss_dbm\n";
    int k = map.stream_index(*only);
    if (k >= 0)
        for (const auto &fp : map.fingerprints)
            os << fp.location_id << "," << only->label() << "," << format_fixed(fp.rss[k], 3) << "\n";
    return os.str();
}

} // namespace

std::string report_text(const ScenarioReport &r)
{
    const ScenarioConfig &c = r.config;
    std::ostringstream os;
    os << "label: " << c.label << "\n"
       << "experiment: " << c.experiment << "\n"
       << "testbed: " << to_string(c.kind) << "\n"
       << "mounting: " << to_string(c.mounting) << "\n"
       << "frequency: " << frequency_text(c.frequency_hz) << "\n"
       << "train_condition: " << describe(c.train_condition) << "\n"
       << "test_condition: " << describe(c.test_condition) << "\n";
    if (c.outsider)
        os << "sub_area: sealed (" << sub_area_wall_prefix << " replaced by concrete)\n";
    os << "propagation: " << canonical_config(c.propagation) << "\n"
       << "samples_per_location: " << c.samples_per_location << "\n"
       << "noise_sigma_db: " << format_double(c.noise_sigma_db) << "\n"
       << "seed: " << c.seed << "\n";
    if (r.localization)
    {
        const auto &l = *r.localization;
        os << "mean_error_m: " << format_fixed(r.mean_error, 3) << "\n";
        if (r.train_map.kind == MapKind::passive)
            os << "mean_error_without_silence_m: " << format_fixed(l.mean_error_without_silence, 3) << "\n"
               << "silence_detected: " << l.silence_detected << "/" << l.silence_observations << "\n"
               << "false_silence: " << l.false_silence << "\n";
        os << "observations: " << l.per_observation.size() << "\n";
    }
    os << "paper_error_m: " << paper_text(c) << (c.paper_table.empty() ? "" : " (" + c.paper_table + ")") << "\n"
       << "rss_variance_db2: " << format_fixed(r.rss_variance, 3) << "\n";
    for (const auto &d : r.deviations)
        os << "attenuated " << d.stream.label() << ": " << join(d.attenuated) << "\n"
           << "los_corridor " << d.stream.label() << ": " << join(d.corridor) << "\n";
    for (const auto &n : r.crowd_notes)
        os << "crowd " << n << "\n";
    os << "train_map_digest: " << r.train_map.digest << "\n"
       << "test_map_digest: " << r.test_map.digest << "\n";
    return os.str();
}

std::vector<std::string> write_scenario_outputs(const ScenarioReport &r, const std::string &directory)
{
    const fs::path dir = fs::path(directory) / r.config.label;
    fs::create_directories(dir);
    std::map<std::string, std::string> files;
    files["report.txt"] = report_text(r);
    files["rss_series.csv"] =
        series_for(r.test_map, r.config.outsider ? std::optional<StreamId>(outsider_stream) : std::nullopt);
    files["train_radiomap.csv"] = write_radiomap(r.train_map, 3);
    files["test_radiomap.csv"] = write_radiomap(r.test_map, 3);
    if (r.localization)
    {
        files["localization.csv"] = write_localization_detail(*r.localization);
        files["location_errors.csv"] = write_location_errors(*r.localization);
    }
    std::vector<std::string> names;
    for (const auto &[name, content] : files)
    {
        write_file(dir / name, content);
        names.push_back(name);
    }
    write_file(dir / "manifest.txt", manifest_of(dir, names));
    names.push_back("manifest.txt");
    std::ranges::sort(names);
    return names;
}

std::string summary_table(const std::vector<ScenarioReport> &reports)
{
    std::ostringstream os;
    os << "label\texperiment\tmounting\tfrequency\ttrain\ttest\tsimulated_m\tpaper_m\n";
    for (const auto &r : reports)
    {
        const auto &c = r.config;
        os << c.label << "\t" << c.experiment << "\t" << to_string(c.mounting) << "\t" << frequency_text(c.frequency_hz)
           << "\t" << describe(c.train_condition) << "\t" << describe(c.test_condition) << "\t"
           << (r.localization ? format_fixed(r.mean_error, 3) : "-") << "\t" << paper_text(c) << "\n";
    }
    return os.str();
}

void write_suite_outputs(const std::vector<ScenarioReport> &reports, const std::string &directory)
{
    const fs::path root(directory);
    fs::create_directories(root);
    std::vector<std::string> all;
    for (const auto &r : reports)
        for (const auto &f : write_scenario_outputs(r, directory))
            all.push_back(r.config.label + "/" + f);
    write_file(root / "summary.tsv", summary_table(reports));
    all.push_back("summary.tsv");
    std::ranges::sort(all);
    write_file(root / "manifest.txt", manifest_of(root, all));
}

// ---------------------------------------------------------------------------

ScenarioConfig parse_scenario_config(std::string_view document)
{
    return doc::scenario_from_json(doc::parse(document), "");
}

std::string serialize_scenario_config(const ScenarioConfig &config)
{
    return doc::scenario_to_json(config).dump(2) + "\n";
}

PropagationConfig parse_propagation_config(std::string_view document)
{
    return doc::propagation_from_json(doc::parse(document), "");
}

} // namespace wavescope
