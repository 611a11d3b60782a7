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

#include <wavescope/errors.hpp>
#include <wavescope/localization.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace wavescope;

namespace
{

RadioMap random_map(std::mt19937_64 &rng, int locations, int streams, bool integer_rss = false)
{
    std::uniform_real_distribution<double> rss(-90.0, -30.0), xy(0.0, 10.0);
    RadioMap m;
    for (int k = 0; k < streams; ++k)
        m.streams.push_back({"AP" + std::to_string(k / 2 + 1), "MP" + std::to_string(k % 2 + 1)});
    std::sort(m.streams.begin(), m.streams.end());
    for (int i = 1; i <= locations; ++i)
    {
        Fingerprint fp{i, {}};
        for (int k = 0; k < streams; ++k)
            fp.rss.push_back(integer_rss ? std::round(rss(rng) / 10) * 10 : rss(rng));
        m.fingerprints.push_back(fp);
        m.locations[i] = {xy(rng), xy(rng), 0.0};
    }
    return m;
}

Observation random_observation(std::mt19937_64 &rng, const RadioMap &m, bool integer_rss = false)
{
    std::uniform_real_distribution<double> rss(-95.0, -25.0);
    Observation o;
    for (const auto &s : m.streams)
        o.rss[s] = integer_rss ? std::round(rss(rng) / 10) * 10 : rss(rng);
    return o;
}

// Exhaustive scan, written independently of the library.
int brute_force(const RadioMap &m, const Observation &o)
{
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto &fp : m.fingerprints)
    {
        double d = 0;
        for (std::size_t k = 0; k < m.streams.size(); ++k)
        {
            double e = o.rss.at(m.streams[k]) - fp.rss[k];
            d += e * e;
        }
        if (d < best_d || (d == best_d && fp.location_id < best))
        {
            best_d = d;
            best = fp.location_id;
        }
    }
    return best;
}

} // namespace

TEST_CASE("nearest neighbour")
{
    std::mt19937_64 rng(3);
    RadioMap m = random_map(rng, 20, 4);
    SUBCASE("exact fingerprint")
    {
        NnMatch r = nearest_neighbor(m, observation_of(m, m.fingerprints[6]));
        CHECK(r.location_id == 7);
        CHECK(r.distance == 0.0);
        CHECK(r.position == m.locations.at(7));
    }
    SUBCASE("ties go to the lowest id")
    {
        RadioMap t = m;
        t.fingerprints[8].rss = {-40, -40, -40, -40};
        t.fingerprints[2].rss = {-40, -40, -40, -40};
        Observation o;
        for (const auto &s : t.streams)
            o.rss[s] = -41;
        CHECK(localize_nn(t, o) == 3);
        std::reverse(t.fingerprints.begin(), t.fingerprints.end());
        CHECK(localize_nn(t, o) == 3);
    }
    SUBCASE("matches an exhaustive scan")
    {
        for (int i = 0; i < 100; ++i)
        {
            Observation o = random_observation(rng, m);
            CHECK(localize_nn(m, o) == brute_force(m, o));
        }
    }
    SUBCASE("stream mismatch names the expected streams")
    {
        Observation o = observation_of(m, m.fingerprints[0]);
        o.rss.erase(o.rss.begin());
        try
        {
            nearest_neighbor(m, o);
            FAIL("expected a mismatch");
        }
        catch (const StreamMismatchError &e)
        {
            REQUIRE(e.expected().size() == m.streams.size());
            for (std::size_t k = 0; k < m.streams.size(); ++k)
                CHECK(e.expected()[k] == m.streams[k].label());
        }
        Observation extra = observation_of(m, m.fingerprints[0]);
        extra.rss[{"AP9", "MP9"}] = -50;
        CHECK_THROWS_AS(nearest_neighbor(m, extra), StreamMismatchError);
    }
    SUBCASE("empty map")
    {
        RadioMap empty;
        empty.streams = m.streams;
        CHECK_THROWS_AS(nearest_neighbor(empty, random_observation(rng, m)), ArgumentError);
    }
}

TEST_CASE("nearest neighbour properties")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial)
    {
        const bool coarse = trial % 2 == 1;  // quantized values force frequent ties
        RadioMap m = random_map(rng, 15, 4, coarse);
        Observation o = random_observation(rng, m, coarse);
        const int id = localize_nn(m, o);
        CHECK(id == brute_force(m, o));

        RadioMap shuffled = m;
        std::shuffle(shuffled.fingerprints.begin(), shuffled.fingerprints.end(), rng);
        CHECK(localize_nn(shuffled, o) == id);

        if (!coarse)
        {
            // A common offset on map and observation leaves the distances unchanged.
            RadioMap shifted = m;
            Observation o2 = o;
            for (auto &fp : shifted.fingerprints)
                for (auto &v : fp.rss)
                    v += 7.25;
            for (auto &[s, v] : o2.rss)
                v += 7.25;
            CHECK(localize_nn(shifted, o2) == id);
        }
    }
}

TEST_CASE("evaluation")
{
    std::mt19937_64 rng(9);
    RadioMap m = random_map(rng, 12, 4);
    SUBCASE("self evaluation is exact")
    {
        std::vector<Observation> obs;
        for (const auto &fp : m.fingerprints)
            obs.push_back(observation_of(m, fp));
        LocalizationReport r = evaluate(m, obs);
        CHECK(r.mean_error == 0.0);
        CHECK(r.per_observation.size() == 12);
        CHECK(r.per_location.size() == 12);
        for (const auto &l : r.per_location)
            CHECK(l.correct == 1);
    }
    SUBCASE("mismatched test map is no better than self evaluation")
    {
        RadioMap perturbed = m;
        std::normal_distribution<double> n(0, 6);
        for (auto &fp : perturbed.fingerprints)
            for (auto &v : fp.rss)
                v += n(rng);
        LocalizationReport r = evaluate(m, sample_observations(perturbed, 5, 0.0, 1));
        CHECK(r.mean_error >= 0.0);
        CHECK(r.mean_error > 0.0);
    }
    SUBCASE("errors are horizontal distances")
    {
        RadioMap two;
        two.streams = {{"AP1", "device"}};
        two.fingerprints = {{1, {-40}}, {2, {-60}}};
        two.locations = {{1, {0, 0, 0}}, {2, {3, 4, 5}}};
        Observation o;
        o.rss[{"AP1", "device"}] = -41;
        o.truth_location = Vec3{3, 4, 0};
        o.truth_id = 2;
        LocalizationReport r = evaluate(two, std::span(&o, 1));
        CHECK(r.per_observation[0].estimated == 1);
        CHECK(r.mean_error == doctest::Approx(5.0));
    }
    SUBCASE("threading does not change the report")
    {
        auto obs = sample_observations(m, 30, 4.0, 2);
        auto a = evaluate(m, obs, 1), b = evaluate(m, obs, 4);
        CHECK(a.mean_error == b.mean_error);
        CHECK(write_localization_detail(a) == write_localization_detail(b));
        CHECK(write_location_errors(a) == write_location_errors(b));
    }
}
