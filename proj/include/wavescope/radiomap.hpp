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

#ifndef WAVESCOPE_RADIOMAP_HPP
#define WAVESCOPE_RADIOMAP_HPP

#include <wavescope/propagation.hpp>
#include <wavescope/scene.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavescope
{

struct StreamId
{
    std::string tx_id, rx_id;

    auto operator<=>(const StreamId &) const = default;
    std::string label() const { return tx_id + ">" + rx_id; }
    static StreamId parse(std::string_view label);  // "AP1>MP2"; throws ArgumentError
};

enum class MapKind
{
    active,
    passive
};

std::string_view to_string(MapKind kind);
MapKind parse_map_kind(std::string_view text);

struct Fingerprint
{
    int location_id = 0;
    std::vector<double> rss;  // dBm, aligned with RadioMap::streams
};

struct RadioMap
{
    MapKind kind = MapKind::active;
    std::vector<StreamId> streams;          // canonical (sorted) order
    std::vector<Fingerprint> fingerprints;  // ascending location_id
    std::map<int, Vec3> locations;          // passive location 0 = centroid of the others
    std::string digest;                     // provenance: scene, transceivers, locations, config

    // Throws SchemaError when an invariant is broken (stream arity, ids, silence entry).
    void validate() const;

    const Fingerprint *find(int location_id) const;
    std::optional<double> rss(int location_id, const StreamId &stream) const;
    int stream_index(const StreamId &stream) const;  // -1 when absent
};

inline constexpr const char *device_receiver_id = "device";

struct ActiveMapOptions
{
    double device_height = 1.2;
    bool include_carrier = true;
    HumanCylinder carrier{};
    // The carrier stands just behind the hand-held device.
    Vec3 carrier_offset{0.0, -0.3, 0.0};
    int threads = 0;  // 0 = hardware concurrency
};

// One stream per AP: AP -> device at (x, y, device_height) for every location.
// Location ids must be unique and >= 1; throws ArgumentError otherwise or when a
// location lies outside the scene bounds.
RadioMap build_active_map(const Scene &scene, std::span<const Transceiver> aps,
                          std::span<const RadioLocation> locations, const PropagationConfig &config,
                          const ActiveMapOptions &options = {});
// Locations numbered 1..N in list order.
RadioMap build_active_map(const Scene &scene, std::span<const Transceiver> aps, std::span<const Vec3> locations,
                          double device_height, const PropagationConfig &config);

// Streams AP x MP; location 0 is the silence profile (no entity), location l > 0 has one
// entity standing at l.
RadioMap build_passive_map(const Scene &scene, std::span<const Transceiver> aps, std::span<const Transceiver> mps,
                           std::span<const RadioLocation> locations, const HumanCylinder &entity,
                           const PropagationConfig &config, int threads = 0);

// ---------------------------------------------------------------------------
// Crowds

struct CrowdPattern
{
    enum class Kind
    {
        none,
        around_ap,
        party,
        explicit_list
    };

    Kind kind = Kind::none;
    std::string ap_id;          // around_ap
    int count = 0;              // around_ap, party
    double ring_radius = 0.6;   // around_ap
    std::uint64_t seed = 0;     // party
    std::vector<Vec3> positions;  // explicit_list
    HumanCylinder person{};
    // Positions closer than keep_out_radius (horizontally) to any keep_out point are
    // rejected, so that people never stand on a receiver or radio-map location.
    std::vector<Vec3> keep_out;
    double keep_out_radius = 0.5;

    static CrowdPattern around_ap(std::string ap_id, int count = 12, double ring_radius = 0.6);
    static CrowdPattern party(int count = 10, std::uint64_t seed = 0);
    static CrowdPattern explicit_positions(std::vector<Vec3> positions);

    std::string describe() const;
};

struct CrowdPlacement
{
    Scene scene;
    std::vector<Vec3> placed;
    std::vector<std::string> skipped;  // one line per rejected ring position / unmet party slot
};

// Deterministic placement. around_ap: evenly spaced ring at the AP's floor projection,
// positions colliding with walls, furniture, other cylinders, the scene bounds or a
// keep-out point are skipped and reported. party: seeded uniform rejection sampling.
// explicit_list: placed as given.
CrowdPlacement apply_crowd(const Scene &scene, const CrowdPattern &pattern);

// ---------------------------------------------------------------------------
// Test observations

struct Observation
{
    std::map<StreamId, double> rss;
    std::optional<Vec3> truth_location;
    std::optional<int> truth_id;
};

// samples_per_location noisy copies of every fingerprint (Gaussian, sigma_db), drawn
// from one seeded generator in (location, sample, stream) order. sigma_db = 0 returns
// the fingerprints themselves.
std::vector<Observation> sample_observations(const RadioMap &map, int samples_per_location, double sigma_db,
                                             std::uint64_t seed);

Observation observation_of(const RadioMap &map, const Fingerprint &fp);

// ---------------------------------------------------------------------------
// File format

// Header lines start with '#': kind, streams, digest. rss_digits < 0 writes the shortest
// round-trip representation, otherwise fixed fraction digits.
std::string write_radiomap(const RadioMap &map, int rss_digits = -1);
RadioMap parse_radiomap(std::string_view text);  // SchemaError
void save_radiomap(const RadioMap &map, const std::string &path);
RadioMap load_radiomap(const std::string &path);  // IoError, SchemaError

// RSS series: "location_id,stream,rss_dbm" rows, fixed 3 fraction digits.
std::string write_rss_series(const RadioMap &map);

std::string canonical_config(const PropagationConfig &config);

} // namespace wavescope

#endif
