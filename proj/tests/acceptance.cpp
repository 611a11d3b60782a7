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

// Acceptance run: analytic oracles, trend checks on the testbed suites and determinism.
// Prints one PASS/FAIL line per criterion; exits non-zero when any criterion fails.

#include "support.hpp"

#include <wavescope/digest.hpp>
#include <wavescope/localization.hpp>
#include <wavescope/scenarios.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace wavescope;
using support::node;
namespace fs = std::filesystem;

namespace
{

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string sci(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string fmt(double v, int digits = 3)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int failures = 0;

void report(int id, bool pass, const std::string &detail)
{
    if (!pass)
        ++failures;
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
}

// 1, 2 -------------------------------------------------------------------------

void free_space()
{
    const Scene scene = support::empty_scene();
    PropagationConfig cfg;
    double worst = 0, worst_delta = 0;
    const auto t0 = clock_type::now();
    int n = 0;
    for (int i = 0; i <= 24; ++i)
    {
        const double d = 0.5 * std::pow(60.0, i / 24.0);  // 0.5 .. 30 m
        double rss[2];
        int k = 0;
        for (double f : {2.4e9, 5.7e9})
        {
            const Transceiver tx = node("AP", {0, 0, 1.5}, Role::access_point, f);
            const Transceiver rx = node("RX", {d * 0.8, d * 0.6, 1.5}, Role::monitoring_point, f);
            rss[k] = predict_rss(scene, tx, rx, cfg);
            worst = std::max(worst, std::abs(rss[k] - support::friis_dbm(d, f)));
            ++k;
            ++n;
        }
        worst_delta = std::max(worst_delta, std::abs((rss[0] - rss[1]) - 7.51));
    }
    const double elapsed = seconds_since(t0);
    report(1, worst < 0.5 && elapsed / n < 1.0,
           "max |RSS - Friis| " + fmt(worst) + " dB over " + std::to_string(n) + " cases, " +
               fmt(elapsed / n * 1000, 1) + " ms per case");
    report(2, worst_delta < 0.3, "max |delta(2.4, 5.7 GHz) - 7.51| " + fmt(worst_delta) + " dB");
}

// 3 ----------------------------------------------------------------------------

void pec_plane()
{
    const Scene scene = support::pec_floor_scene();
    PropagationConfig cfg;
    double worst = 0;
    int used = 0;
    const auto t0 = clock_type::now();
    for (double f : {2.4e9, 5.7e9})
        for (double d = 1.0; d <= 30.0; d += 0.5)
        {
            const Vec3 a{0, 0, 1.5}, b{d * 0.9, d * 0.2, 1.2};
            const double oracle = support::two_ray_pec_dbm(a, b, f);
            if (std::abs(oracle - support::friis_dbm(distance(a, b), f)) >= 10.0)
                continue;
            const double rss = predict_rss(scene, node("AP", a, Role::access_point, f),
                                           node("RX", b, Role::monitoring_point, f), cfg);
            worst = std::max(worst, std::abs(rss - oracle));
            ++used;
        }
    const double elapsed = seconds_since(t0);
    report(3, worst < 1.0 && elapsed < 5.0,
           "max |RSS - two-ray| " + fmt(worst) + " dB over " + std::to_string(used) + " positions in " +
               fmt(elapsed, 2) + " s");
}

// 4 ----------------------------------------------------------------------------

void fresnel()
{
    double conservation = 0, brewster = 0;
    bool pec_exact = true;
    for (double eps : {1.5, 2.8, 4.0, 6.5, 9.0})
    {
        Material m;
        m.name = "lossless";
        m.relative_permittivity = eps;
        for (double a = 0.0; a < 1.55; a += 0.01)
        {
            const auto c = fresnel_coefficients(a, m, 2.4e9);
            const double st = std::sin(a) / std::sqrt(eps);
            const double factor = std::sqrt(eps) * std::sqrt(1.0 - st * st) / std::cos(a);
            conservation = std::max(conservation, std::abs(std::norm(c.r_perpendicular) +
                                                           factor * std::norm(c.t_perpendicular) - 1.0));
            conservation = std::max(conservation,
                                    std::abs(std::norm(c.r_parallel) + factor * std::norm(c.t_parallel) - 1.0));
        }
        brewster = std::max(brewster, std::abs(fresnel_coefficients(std::atan(std::sqrt(eps)), m, 2.4e9).r_parallel));
    }
    for (double a = 0.0; a < std::numbers::pi / 2; a += 0.05)
        for (double f : {2.4e9, 5.7e9})
        {
            const auto c = fresnel_coefficients(a, Material::perfect_conductor(), f);
            pec_exact = pec_exact && std::abs(c.r_parallel) == 1.0 && std::abs(c.r_perpendicular) == 1.0;
        }
    report(4, conservation < 1e-6 && pec_exact && brewster < 1e-6,
           "power balance error " + sci(conservation) + ", PEC |R| = 1 " + (pec_exact ? "exact" : "broken") +
               ", Brewster |R_par| " + sci(brewster));
}

// 5 ----------------------------------------------------------------------------

void shadow_boundary()
{
    // Conducting sheet in the plane y = 0 for x >= 0 with its edge along z; the receiver
    // circles the edge across the incident shadow boundary.
    auto mats = default_materials();
    const int metal = support::material_id(mats, "metal");
    std::vector<Surface> sheet{make_surface("sheet", {{0, 0, 0}, {60, 0, 0}, {60, 0, 60}, {0, 0, 60}}, metal)};
    const Scene scene(Aabb{{-70, -70, 0}, {70, 70, 60}}, 60.0, mats, sheet, {}, {});
    const Transceiver tx = node("AP", {-3, 3, 30});
    const double boundary = -std::numbers::pi / 4, r = 2.0;
    PropagationConfig cfg;
    double worst = 0, prev = 0, lo = 1e9, hi = -1e9;
    for (int i = 0; i <= 40; ++i)
    {
        // Step 20 would sit exactly on the boundary; nudge it into the lit side.
        const double a = boundary + (-0.5 + 0.025 * i) * std::numbers::pi / 180 - (i == 20 ? 1e-6 : 0.0);
        const Transceiver rx = node("RX", {r * std::cos(a), r * std::sin(a), 30}, Role::monitoring_point);
        const double rss = predict_rss(scene, tx, rx, cfg);
        if (i)
            worst = std::max(worst, std::abs(rss - prev));
        prev = rss;
        lo = std::min(lo, rss);
        hi = std::max(hi, rss);
    }
    report(5, worst < 0.5,
           "largest step " + fmt(worst) + " dB over a +-0.5 deg sweep (range " + fmt(lo, 2) + " .. " + fmt(hi, 2) +
               " dBm)");
}

// 6 ----------------------------------------------------------------------------

void reciprocity()
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ux(0.3, 7.7), uy(0.3, 4.7), uz(0.3, 2.4), wx(1.5, 6.5);
    auto mats = default_materials();
    const int concrete = support::material_id(mats, "concrete"), plaster = support::material_id(mats, "plasterboard"),
              brick = support::material_id(mats, "brick"), glass = support::material_id(mats, "glass"),
              wood = support::material_id(mats, "wood");
    double worst = 0;
    int scenes = 0;
    while (scenes < 10)
    {
        std::vector<Surface> s{
            horizontal_rect("floor", 0, 0, 8, 5, 0.0, concrete),
            horizontal_rect("ceiling", 0, 0, 8, 5, 2.7, plaster),
            vertical_rect("w1", {0, 0, 0}, {8, 0, 0}, 0, 2.7, brick),
            vertical_rect("w2", {8, 0, 0}, {8, 5, 0}, 0, 2.7, glass),
            vertical_rect("w3", {8, 5, 0}, {0, 5, 0}, 0, 2.7, brick),
        };
        const double x = wx(rng);
        s.push_back(vertical_rect("part", {x, 0.5, 0}, {x, 3.5, 0}, 0, 2.1, wood));
        std::vector<HumanCylinder> cyl(2);
        for (auto &c : cyl)
            c.center_base = {ux(rng), uy(rng), 0};
        const Transceiver a = node("A", {ux(rng), uy(rng), uz(rng)}), b = node("B", {ux(rng), uy(rng), uz(rng)});
        bool clear = true;
        for (const auto &c : cyl)
            for (const auto &t : {a, b})
                clear = clear && std::hypot(t.position.x - c.center_base.x, t.position.y - c.center_base.y) > 0.3;
        if (!clear || std::abs(a.position.x - x) < 0.05 || std::abs(b.position.x - x) < 0.05)
            continue;
        const Scene scene(Aabb{{0, 0, 0}, {8, 5, 2.7}}, 2.7, mats, s, cyl, {});
        PropagationConfig cfg;
        worst = std::max(worst, std::abs(predict_rss(scene, a, b, cfg) - predict_rss(scene, b, a, cfg)));
        ++scenes;
    }
    report(6, worst < 0.1, "max |RSS(a->b) - RSS(b->a)| " + fmt(worst, 4) + " dB on " + std::to_string(scenes) +
                               " randomized scenes");
}

// 7 - 12 ---------------------------------------------------------------------

const ScenarioReport &find(const std::vector<ScenarioReport> &rs, const std::string &label)
{
    for (const auto &r : rs)
        if (r.config.label == label)
            return r;
    throw std::runtime_error("missing scenario " + label);
}

double stream_mean(const RadioMap &m, const std::string &tx)
{
    double s = 0;
    int n = 0;
    for (std::size_t k = 0; k < m.streams.size(); ++k)
        if (m.streams[k].tx_id == tx)
            for (const auto &fp : m.fingerprints)
            {
                s += fp.rss[k];
                ++n;
            }
    return s / n;
}

double location_mean(const Fingerprint &fp)
{
    double s = 0;
    for (double v : fp.rss)
        s += v;
    return s / fp.rss.size();
}

std::string err(const ScenarioReport &r) { return fmt(r.mean_error) + " m"; }

void trends(const std::vector<ScenarioReport> &db, const std::vector<ScenarioReport> &df, double suite_seconds)
{
    const std::string timing = " [suite " + fmt(suite_seconds, 1) + " s]";
    const bool in_time = suite_seconds < 600.0;

    {
        const auto &wall = find(db, "db_base"), &ceiling = find(db, "db_ceiling");
        const bool error_order = ceiling.mean_error < wall.mean_error;
        const bool variance_order = wall.rss_variance < ceiling.rss_variance;
        report(7, error_order && variance_order && in_time,
               std::string("error ceiling ") + err(ceiling) + (error_order ? " < " : " >= ") + "wall " + err(wall) +
                   "; RSS variance wall " + fmt(wall.rss_variance, 1) + (variance_order ? " < " : " >= ") +
                   "ceiling " + fmt(ceiling.rss_variance, 1) + " dB^2" + timing);
    }
    {
        const auto &base = find(db, "db_base"), &high = find(db, "db_freq_5.7ghz");
        const bool error_order = high.mean_error < base.mean_error;
        int lower = 0;
        for (const auto &fp : base.test_map.fingerprints)
            lower += location_mean(*high.test_map.find(fp.location_id)) < location_mean(fp);
        const int total = static_cast<int>(base.test_map.fingerprints.size());
        report(8, error_order && lower == total && in_time,
               "error 5.7 GHz " + err(high) + (error_order ? " < " : " >= ") + "2.4 GHz " + err(base) +
                   "; lower RSS at 5.7 GHz at " + std::to_string(lower) + "/" + std::to_string(total) + " locations");
    }
    {
        const auto &base = find(db, "db_base");
        std::string detail;
        bool ok = in_time;
        for (const char *label : {"db_crowd_ap1", "db_crowd_ap2", "db_crowd_both", "db_party_wall"})
        {
            const auto &r = find(db, label);
            const bool above = r.mean_error > base.mean_error;
            ok = ok && above;
            detail += std::string(label) + " " + err(r) + (above ? " > " : " <= ") + "base; ";
        }
        const auto &crowd = find(db, "db_crowd_ap1");
        const double drop1 = stream_mean(base.test_map, "AP1") - stream_mean(crowd.test_map, "AP1");
        const double drop2 = stream_mean(base.test_map, "AP2") - stream_mean(crowd.test_map, "AP2");
        ok = ok && drop1 > drop2;
        detail += "AP1 crowd drops AP1 " + fmt(drop1, 2) + " dB vs AP2 " + fmt(drop2, 2) + " dB; ";
        auto pair = [&](const char *a, const char *b) {
            const auto &x = find(db, a), &y = find(db, b);
            const bool less = x.mean_error < y.mean_error;
            ok = ok && less;
            detail += std::string(a) + " " + err(x) + (less ? " < " : " >= ") + b + " " + err(y) + "; ";
        };
        pair("db_party_wall_trained_no_crowd", "db_party_wall_trained_crowd");
        pair("db_party_ceiling_trained_no_crowd", "db_party_ceiling_trained_crowd");
        pair("db_party_ceiling", "db_party_wall");
        pair("db_party_ceiling_trained_crowd", "db_party_wall_trained_crowd");
        detail.resize(detail.size() - 2);
        report(9, ok, detail);
    }
    {
        const auto &wall = find(df, "df_base"), &ceiling = find(df, "df_ceiling");
        const bool error_order = wall.mean_error < ceiling.mean_error;
        const StreamDeviation *dev = nullptr;
        for (const auto &d : ceiling.deviations)
            if (d.stream == StreamId{"AP2", "MP1"})
                dev = &d;
        const bool corridor = dev && !dev->corridor.empty() && dev->attenuated == dev->corridor;
        auto ids = [](const std::vector<int> &v) {
            std::string s;
            for (int i : v)
                s += (s.empty() ? "" : ",") + std::to_string(i);
            return "{" + s + "}";
        };
        report(10, error_order && corridor && in_time,
               "error wall " + err(wall) + (error_order ? " < " : " >= ") + "ceiling " + err(ceiling) +
                   "; AP2>MP1 attenuated " + (dev ? ids(dev->attenuated) : "?") + (corridor ? " == " : " != ") +
                   "corridor " + (dev ? ids(dev->corridor) : "?"));
    }
    {
        const auto &base = find(df, "df_base"), &high = find(df, "df_freq_5.7ghz");
        const bool order = high.mean_error > base.mean_error;
        report(11, order && in_time,
               "error 5.7 GHz " + err(high) + (order ? " > " : " <= ") + "2.4 GHz " + err(base));
    }
    {
        const auto &out = find(df, "df_outsider");
        const RadioMap &m = out.test_map;
        const int k = m.stream_index(outsider_stream);
        const double silence = m.find(0)->rss[k];
        std::vector<int> corridor;
        for (const auto &d : out.deviations)
            if (d.stream == outsider_stream)
                corridor = d.corridor;
        double worst_outside = 0, best_inside = 0;
        int inside_los = 0;
        for (const auto &fp : m.fingerprints)
        {
            if (fp.location_id == 0)
                continue;
            const double dev = std::abs(fp.rss[k] - silence);
            if (!in_sub_area(m.locations.at(fp.location_id)))
                worst_outside = std::max(worst_outside, dev);
            else if (std::find(corridor.begin(), corridor.end(), fp.location_id) != corridor.end())
            {
                best_inside = std::max(best_inside, dev);
                ++inside_los;
            }
        }
        report(12, worst_outside < 1.0 && best_inside >= 3.0 && in_time,
               "outside max |RSS - silence| " + fmt(worst_outside) + " dB; inside LOS max " + fmt(best_inside) +
                   " dB over " + std::to_string(inside_los) + " locations");
    }
}

// 13 -----------------------------------------------------------------------

void localizer()
{
    std::mt19937_64 rng(13);
    int agree = 0, ties = 0;
    for (int trial = 0; trial < 1000; ++trial)
    {
        const int streams = 1 + trial % 6, locations = 1 + static_cast<int>(rng() % 60);
        const bool coarse = trial % 3 == 0;  // coarse values force equidistant fingerprints
        std::uniform_real_distribution<double> u(-95, -25);
        auto value = [&] { return coarse ? std::round(u(rng) / 15) * 15 : u(rng); };
        RadioMap m;
        for (int s = 0; s < streams; ++s)
            m.streams.push_back({"AP" + std::to_string(s), "MP"});
        std::sort(m.streams.begin(), m.streams.end());
        std::vector<int> ids(locations);
        for (int i = 0; i < locations; ++i)
            ids[i] = 1 + i * 3 + static_cast<int>(rng() % 3);
        std::shuffle(ids.begin(), ids.end(), rng);
        for (int id : ids)
        {
            Fingerprint fp{id, {}};
            for (int s = 0; s < streams; ++s)
                fp.rss.push_back(value());
            m.fingerprints.push_back(fp);
            m.locations[id] = {0, 0, 0};
        }
        std::sort(m.fingerprints.begin(), m.fingerprints.end(),
                  [](const Fingerprint &a, const Fingerprint &b) { return a.location_id < b.location_id; });
        Observation o;
        for (const auto &s : m.streams)
            o.rss[s] = value();

        // Exhaustive argmin over squared distances, lowest id on ties.
        double best = std::numeric_limits<double>::infinity();
        int best_id = std::numeric_limits<int>::max(), at_best = 0;
        for (const auto &fp : m.fingerprints)
        {
            double d = 0;
            for (std::size_t s = 0; s < m.streams.size(); ++s)
                d += (o.rss.at(m.streams[s]) - fp.rss[s]) * (o.rss.at(m.streams[s]) - fp.rss[s]);
            if (d < best)
            {
                best = d;
                best_id = fp.location_id;
                at_best = 1;
            }
            else if (d == best)
            {
                best_id = std::min(best_id, fp.location_id);
                ++at_best;
            }
        }
        ties += at_best > 1;
        agree += localize_nn(m, o) == best_id;
    }
    report(13, agree == 1000,
           std::to_string(agree) + "/1000 instances equal the brute-force argmin (" + std::to_string(ties) +
               " with ties)");
}

// 14 -----------------------------------------------------------------------

std::map<std::string, std::string> tree(const fs::path &root)
{
    std::map<std::string, std::string> files;
    for (const auto &e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
        {
            std::ifstream in(e.path(), std::ios::binary);
            std::ostringstream s;
            s << in.rdbuf();
            files[fs::relative(e.path(), root).generic_string()] = sha256_hex(s.str());
        }
    return files;
}

std::vector<ScenarioReport> run_all(int threads, std::vector<ScenarioReport> *db, std::vector<ScenarioReport> *df)
{
    SuiteOverrides o;
    o.threads = threads;
    *db = run_device_based_suite(o);
    *df = run_device_free_suite(o);
    std::vector<ScenarioReport> all = *db;
    all.insert(all.end(), df->begin(), df->end());
    return all;
}

} // namespace

int main(int argc, char **argv)
{
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance_out";
    try
    {
        free_space();
        pec_plane();
        fresnel();
        shadow_boundary();
        reciprocity();

        std::vector<ScenarioReport> db, df, db4, df4;
        auto t0 = clock_type::now();
        auto serial = run_all(1, &db, &df);
        const double suite_seconds = seconds_since(t0);
        std::cerr << "suites (1 thread): " << fmt(suite_seconds, 1) << " s\n" << summary_table(serial);
        trends(db, df, suite_seconds);

        localizer();

        fs::remove_all(out);
        write_suite_outputs(serial, (out / "serial").string());
        t0 = clock_type::now();
        auto parallel = run_all(4, &db4, &df4);
        std::cerr << "suites (4 threads): " << fmt(seconds_since(t0), 1) << " s\n";
        write_suite_outputs(parallel, (out / "parallel").string());
        const auto a = tree(out / "serial"), b = tree(out / "parallel");
        std::size_t differing = 0;
        for (const auto &[name, digest] : a)
            differing += !b.count(name) || b.at(name) != digest;
        differing += b.size() > a.size() ? b.size() - a.size() : 0;
        report(14, differing == 0 && !a.empty(),
               std::to_string(a.size()) + " files compared between serial and 4-thread runs, " +
                   std::to_string(differing) + " differ");
    }
    catch (const std::exception &e)
    {
        std::cout << "acceptance aborted: " << e.what() << std::endl;
        return 2;
    }
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
