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
#include <wavescope/radiomap.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace wavescope
{

StreamId StreamId::parse(std::string_view label)
{
    auto gt = label.find('>');
    if (gt == std::string_view::npos || gt == 0 || gt + 1 == label.size() ||
        label.find('>', gt + 1) != std::string_view::npos)
        throw ArgumentError("malformed stream '" + std::string(label) + "' (expected TX>RX)");
    return {std::string(label.substr(0, gt)), std::string(label.substr(gt + 1))};
}

std::string_view to_string(MapKind kind) { return kind == MapKind::active ? "active" : "passive"; }

MapKind parse_map_kind(std::string_view text)
{
    if (text == "active")
        return MapKind::active;
    if (text == "passive")
        return MapKind::passive;
    throw ArgumentError("unknown map kind '" + std::string(text) + "' (expected active or passive)");
}

void RadioMap::validate() const
{
    if (streams.empty())
        throw SchemaError("/streams", "radio map has no streams");
    if (!std::ranges::is_sorted(streams) || std::ranges::adjacent_find(streams) != streams.end())
        throw SchemaError("/streams", "streams must be unique and in canonical order");
    int silence = 0;
    for (std::size_t i = 0; i < fingerprints.size(); ++i)
    {
        const auto &fp = fingerprints[i];
        std::string p = "/fingerprints/" + std::to_string(i);
        if (fp.rss.size() != streams.size())
            throw SchemaError(p + "/rss", "fingerprint stream count differs from the map's");
        if (i > 0 && fp.location_id <= fingerprints[i - 1].location_id)
            throw SchemaError(p + "/location_id", "location ids must be unique and ascending");
        if (fp.location_id < 0)
            throw SchemaError(p + "/location_id", "negative location id");
        if (fp.location_id == 0)
            ++silence;
        if (!locations.contains(fp.location_id))
            throw SchemaError(p + "/location_id", "fingerprint without location coordinates");
        for (double v : fp.rss)
            if (!std::isfinite(v))
                throw SchemaError(p + "/rss", "non-finite RSS");
    }
    if (kind == MapKind::active && silence != 0)
        throw SchemaError("/fingerprints", "active maps cannot contain location 0");
    if (kind == MapKind::passive && silence != 1)
        throw SchemaError("/fingerprints", "passive maps need exactly one silence fingerprint (location 0)");
}

const Fingerprint *RadioMap::find(int location_id) const
{
    auto it = std::ranges::lower_bound(fingerprints, location_id, {}, &Fingerprint::location_id);
    return it != fingerprints.end() && it->location_id == location_id ? &*it : nullptr;
}

int RadioMap::stream_index(const StreamId &stream) const
{
    auto it = std::ranges::lower_bound(streams, stream);
    return it != streams.end() && *it == stream ? static_cast<int>(it - streams.begin()) : -1;
}

std::optional<double> RadioMap::rss(int location_id, const StreamId &stream) const
{
    const Fingerprint *fp = find(location_id);
    int k = stream_index(stream);
    if (!fp || k < 0)
        return std::nullopt;
    return fp->rss[k];
}

std::string canonical_config(const PropagationConfig &c)
{
    std::ostringstream os;
    os << "max_depth=" << c.max_depth << ";min_power_dbm=" << format_double(c.min_power_dbm)
       << ";tessellation_order=" << c.tessellation_order << ";max_diffraction_order=" << c.max_diffraction_order
       << ";noise_floor_dbm=" << format_double(c.noise_floor_dbm) << ";quantize_rss=" << c.quantize_rss
       << ";bidirectional=" << c.bidirectional;
    return os.str();
}

namespace
{

std::string vec_text(const Vec3 &v)
{
    return format_double(v.x) + "," + format_double(v.y) + "," + format_double(v.z);
}

std::string node_text(const Transceiver &t)
{
    return t.id + "@" + vec_text(t.position) + ";" + std::string(to_string(t.role)) + ";" +
           format_double(t.transmit_power_mw) + ";" + format_double(t.antenna_gain_dbi) + ";" +
           format_double(t.frequency_hz) + ";" + t.pattern;
}

std::string cylinder_text(const HumanCylinder &c)
{
    return vec_text(c.center_base) + ";" + format_double(c.radius) + ";" + format_double(c.height) + ";" +
           c.material.name + ";" + format_double(c.material.relative_permittivity) + ";" +
           format_double(c.material.conductivity) + ";" + std::to_string(c.material.is_perfect_conductor);
}

void check_ids(std::span<const Transceiver> nodes, const char *what)
{
    std::set<std::string> seen;
    for (const auto &t : nodes)
    {
        if (t.id.empty() || t.id.find_first_of(">,#\n") != std::string::npos)
            throw ArgumentError(std::string(what) + " id '" + t.id + "' is empty or contains a reserved character");
        if (!seen.insert(t.id).second)
            throw ArgumentError(std::string("duplicate ") + what + " id '" + t.id + "'");
    }
}

std::vector<RadioLocation> checked_locations(const Scene &scene, std::span<const RadioLocation> locations)
{
    if (locations.empty())
        throw ArgumentError("at least one radio-map location is required");
    std::vector<RadioLocation> out(locations.begin(), locations.end());
    std::ranges::sort(out, {}, &RadioLocation::id);
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        if (out[i].id < 1)
            throw ArgumentError("radio-map location ids must be >= 1 (got " + std::to_string(out[i].id) + ")");
        if (i > 0 && out[i].id == out[i - 1].id)
            throw ArgumentError("duplicate radio-map location id " + std::to_string(out[i].id));
        if (!out[i].position.finite() || !scene.bounds().contains(out[i].position, 1e-9))
            throw ArgumentError("radio-map location " + std::to_string(out[i].id) + " (" +
                                vec_text(out[i].position) + ") is outside the scene bounds");
    }
    return out;
}

std::vector<Transceiver> sorted_nodes(std::span<const Transceiver> nodes)
{
    std::vector<Transceiver> out(nodes.begin(), nodes.end());
    std::ranges::sort(out, {}, &Transceiver::id);
    return out;
}

} // namespace

RadioMap build_active_map(const Scene &scene, std::span<const Transceiver> aps_in,
                          std::span<const RadioLocation> locations_in, const PropagationConfig &config,
                          const ActiveMapOptions &options)
{
    config.validate();
    if (aps_in.empty())
        throw ArgumentError("at least one access point is required");
    check_ids(aps_in, "access point");
    for (const auto &ap : aps_in)
        if (!ap.is_transmitter())
            throw ArgumentError("'" + ap.id + "' is not an access point");
    if (!(options.device_height >= 0.0) || !std::isfinite(options.device_height))
        throw ArgumentError("device height must be finite and non-negative");
    auto aps = sorted_nodes(aps_in);
    auto locations = checked_locations(scene, locations_in);

    RadioMap map;
    map.kind = MapKind::active;
    for (const auto &ap : aps)
        map.streams.push_back({ap.id, device_receiver_id});
    for (const auto &l : locations)
    {
        map.locations[l.id] = l.position;
        map.fingerprints.push_back({l.id, std::vector<double>(aps.size())});
        if (options.include_carrier && !scene.bounds().contains(l.position + options.carrier_offset, 1e-9))
            throw ArgumentError("carrier of location " + std::to_string(l.id) + " falls outside the scene bounds");
    }

    detail::parallel_for(locations.size(), options.threads, [&](std::size_t i) {
        const RadioLocation &l = locations[i];
        Scene variant = scene;
        if (options.include_carrier)
        {
            Vec3 base = l.position + options.carrier_offset;
            base.z = scene.bounds().lo.z;
            variant = place_entities(scene, std::span(&base, 1), options.carrier);
        }
        for (std::size_t a = 0; a < aps.size(); ++a)
        {
            Transceiver device;
            device.id = device_receiver_id;
            device.role = Role::tracked_device;
            device.position = {l.position.x, l.position.y, options.device_height};
            device.frequency_hz = aps[a].frequency_hz;
            map.fingerprints[i].rss[a] = predict_rss(variant, aps[a], device, config);
        }
    });

    std::ostringstream prov;
    prov << "active\n" << scene.digest() << "\n" << canonical_config(config) << "\n";
    for (const auto &ap : aps)
        prov << node_text(ap) << "\n";
    for (const auto &l : locations)
        prov << l.id << ":" << vec_text(l.position) << "\n";
    prov << "device_height=" << format_double(options.device_height) << ";carrier=" << options.include_carrier
         << ";" << cylinder_text(options.carrier) << ";" << vec_text(options.carrier_offset) << "\n";
    map.digest = sha256_hex(prov.str());
    return map;
}

RadioMap build_active_map(const Scene &scene, std::span<const Transceiver> aps, std::span<const Vec3> locations,
                          double device_height, const PropagationConfig &config)
{
    std::vector<RadioLocation> ls;
    for (std::size_t i = 0; i < locations.size(); ++i)
        ls.push_back({static_cast<int>(i) + 1, locations[i]});
    ActiveMapOptions options;
    options.device_height = device_height;
    return build_active_map(scene, aps, ls, config, options);
}

RadioMap build_passive_map(const Scene &scene, std::span<const Transceiver> aps_in, std::span<const Transceiver> mps_in,
                           std::span<const RadioLocation> locations_in, const HumanCylinder &entity,
                           const PropagationConfig &config, int threads)
{
    config.validate();
    if (aps_in.empty() || mps_in.empty())
        throw ArgumentError("a passive map needs at least one access point and one monitoring point");
    check_ids(aps_in, "access point");
    check_ids(mps_in, "monitoring point");
    for (const auto &ap : aps_in)
        if (!ap.is_transmitter())
            throw ArgumentError("'" + ap.id + "' is not an access point");
    auto aps = sorted_nodes(aps_in);
    auto mps = sorted_nodes(mps_in);
    auto locations = checked_locations(scene, locations_in);

    RadioMap map;
    map.kind = MapKind::passive;
    for (const auto &ap : aps)
        for (const auto &mp : mps)
            map.streams.push_back({ap.id, mp.id});
    Vec3 centroid{};
    for (const auto &l : locations)
        centroid = centroid + l.position;
    map.locations[0] = centroid / static_cast<double>(locations.size());
    map.fingerprints.push_back({0, {}});
    for (const auto &l : locations)
    {
        map.locations[l.id] = l.position;
        map.fingerprints.push_back({l.id, {}});
    }

    // slot 0 is the silence profile
    detail::parallel_for(locations.size() + 1, threads, [&](std::size_t i) {
        Scene variant = scene;
        if (i > 0)
        {
            Vec3 base = locations[i - 1].position;
            base.z = scene.bounds().lo.z;
            variant = place_entities(scene, std::span(&base, 1), entity);
        }
        std::vector<double> &rss = map.fingerprints[i].rss;
        for (const auto &ap : aps)
        {
            std::vector<Transceiver> rx = mps;
            for (auto &m : rx)
                m.frequency_hz = ap.frequency_hz;
            auto values = predict_rss_many(variant, ap, rx, config);
            rss.insert(rss.end(), values.begin(), values.end());
        }
    });

    std::ostringstream prov;
    prov << "passive\n" << scene.digest() << "\n" << canonical_config(config) << "\n";
    for (const auto &t : aps)
        prov << node_text(t) << "\n";
    for (const auto &t : mps)
        prov << node_text(t) << "\n";
    for (const auto &l : locations)
        prov << l.id << ":" << vec_text(l.position) << "\n";
    prov << "entity=" << cylinder_text(entity) << "\n";
    map.digest = sha256_hex(prov.str());
    return map;
}

// ---------------------------------------------------------------------------
// Crowds

CrowdPattern CrowdPattern::around_ap(std::string ap_id, int count, double ring_radius)
{
    CrowdPattern p;
    p.kind = Kind::around_ap;
    p.ap_id = std::move(ap_id);
    p.count = count;
    p.ring_radius = ring_radius;
    return p;
}

CrowdPattern CrowdPattern::party(int count, std::uint64_t seed)
{
    CrowdPattern p;
    p.kind = Kind::party;
    p.count = count;
    p.seed = seed;
    return p;
}

CrowdPattern CrowdPattern::explicit_positions(std::vector<Vec3> positions)
{
    CrowdPattern p;
    p.kind = Kind::explicit_list;
    p.positions = std::move(positions);
    return p;
}

std::string CrowdPattern::describe() const
{
    switch (kind)
    {
    case Kind::none:
        return "none";
    case Kind::around_ap:
        return "around_ap(" + ap_id + "," + std::to_string(count) + "," + format_double(ring_radius) + ")";
    case Kind::party:
        return "party(" + std::to_string(count) + "," + std::to_string(seed) + ")";
    case Kind::explicit_list:
        return "explicit(" + std::to_string(positions.size()) + ")";
    }
    return "none";
}

namespace
{

double segment_distance_2d(double px, double py, double ax, double ay, double bx, double by)
{
    double dx = bx - ax, dy = by - ay, len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0) : 0.0;
    return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

// Reason a person at floor point c cannot stand there, or empty.
std::string obstruction(const Scene &scene, const Vec3 &c, const HumanCylinder &person,
                        const std::vector<Vec3> &others, const CrowdPattern &pattern)
{
    const Aabb &b = scene.bounds();
    double r = person.radius, z0 = b.lo.z, z1 = b.lo.z + person.height;
    if (c.x - r < b.lo.x || c.x + r > b.hi.x || c.y - r < b.lo.y || c.y + r > b.hi.y)
        return "outside the scene bounds";
    for (const auto &s : scene.surfaces())
    {
        if (s.box.hi.z <= z0 + 1e-9 || s.box.lo.z >= z1)
            continue;
        if (std::abs(s.normal.z) < 1e-9)
        {
            // vertical polygon: footprint is the segment between its extreme vertices
            Vec3 u = normalized(cross(s.normal, Vec3{0, 0, 1}));
            auto [lo, hi] = std::ranges::minmax_element(s.vertices, {}, [&](const Vec3 &v) { return dot(v, u); });
            if (segment_distance_2d(c.x, c.y, lo->x, lo->y, hi->x, hi->y) < r)
                return "collides with " + s.id;
        }
        else if (s.contains({c.x, c.y, s.box.lo.z}, 1e-9))
            return "collides with " + s.id;
    }
    for (const auto &cyl : scene.cylinders())
        if (std::hypot(c.x - cyl.center_base.x, c.y - cyl.center_base.y) < r + cyl.radius)
            return "overlaps an existing cylinder";
    for (const auto &o : others)
        if (std::hypot(c.x - o.x, c.y - o.y) < 2.0 * r)
            return "overlaps another person";
    for (const auto &k : pattern.keep_out)
        if (std::hypot(c.x - k.x, c.y - k.y) < pattern.keep_out_radius)
            return "inside the keep-out zone of (" + format_fixed(k.x, 2) + ", " + format_fixed(k.y, 2) + ")";
    return {};
}

} // namespace

CrowdPlacement apply_crowd(const Scene &scene, const CrowdPattern &pattern)
{
    CrowdPlacement out;
    const double floor_z = scene.bounds().lo.z;
    switch (pattern.kind)
    {
    case CrowdPattern::Kind::none:
        break;
    case CrowdPattern::Kind::explicit_list:
        for (const auto &p : pattern.positions)
            out.placed.push_back({p.x, p.y, floor_z});
        break;
    case CrowdPattern::Kind::around_ap: {
        if (pattern.count < 0 || !(pattern.ring_radius >= 0.0))
            throw ArgumentError("around_ap needs count >= 0 and ring_radius >= 0");
        const Vec3 ap = scene.transceiver(pattern.ap_id).position;
        for (int k = 0; k < pattern.count; ++k)
        {
            double theta = 2.0 * std::numbers::pi * k / pattern.count;
            Vec3 c{ap.x + pattern.ring_radius * std::cos(theta), ap.y + pattern.ring_radius * std::sin(theta), floor_z};
            std::string why = obstruction(scene, c, pattern.person, out.placed, pattern);
            if (why.empty())
                out.placed.push_back(c);
            else
                out.skipped.push_back("ring position " + std::to_string(k) + " (" + format_fixed(c.x, 2) + ", " +
                                      format_fixed(c.y, 2) + ") skipped: " + why);
        }
        break;
    }
    case CrowdPattern::Kind::party: {
        if (pattern.count < 0)
            throw ArgumentError("party needs count >= 0");
        // raw 53-bit draws keep the sequence identical across standard libraries
        std::mt19937_64 rng(pattern.seed);
        auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        const Aabb &b = scene.bounds();
        const int max_attempts = 1000 * std::max(1, pattern.count);
        int attempts = 0;
        while (static_cast<int>(out.placed.size()) < pattern.count && attempts++ < max_attempts)
        {
            Vec3 c{b.lo.x + uniform() * (b.hi.x - b.lo.x), b.lo.y + uniform() * (b.hi.y - b.lo.y), floor_z};
            if (obstruction(scene, c, pattern.person, out.placed, pattern).empty())
                out.placed.push_back(c);
        }
        for (auto k = out.placed.size(); k < static_cast<std::size_t>(pattern.count); ++k)
            out.skipped.push_back("party slot " + std::to_string(k) + " unfilled after " +
                                  std::to_string(max_attempts) + " attempts");
        break;
    }
    }
    out.scene = place_entities(scene, out.placed, pattern.person);
    return out;
}

// ---------------------------------------------------------------------------
// Observations

Observation observation_of(const RadioMap &map, const Fingerprint &fp)
{
    Observation o;
    for (std::size_t k = 0; k < map.streams.size(); ++k)
        o.rss[map.streams[k]] = fp.rss[k];
    if (auto it = map.locations.find(fp.location_id); it != map.locations.end())
        o.truth_location = it->second;
    o.truth_id = fp.location_id;
    return o;
}

std::vector<Observation> sample_observations(const RadioMap &map, int samples_per_location, double sigma_db,
                                             std::uint64_t seed)
{
    if (samples_per_location < 1)
        throw ArgumentError("samples per location must be >= 1");
    if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db))
        throw ArgumentError("noise sigma must be finite and non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma_db > 0.0 ? sigma_db : 1.0);
    std::vector<Observation> out;
    for (const auto &fp : map.fingerprints)
        for (int s = 0; s < samples_per_location; ++s)
        {
            Observation o = observation_of(map, fp);
            if (sigma_db > 0.0)
                for (auto &[stream, v] : o.rss)
                    v += noise(rng);
            out.push_back(std::move(o));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Files

std::string write_radiomap(const RadioMap &map, int rss_digits)
{
    auto num = [&](double v) { return rss_digits < 0 ? format_double(v) : format_fixed(v, rss_digits); };
    std::ostringstream os;
    os << "# wavescope radiomap\n# kind: " << to_string(map.kind) << "\n# streams: ";
    for (std::size_t k = 0; k < map.streams.size(); ++k)
        os << (k ? "," : "") << map.streams[k].label();
    os << "\n# digest: " << map.digest << "\nlocation_id,x,y,z";
    for (const auto &s : map.streams)
        os << "," << s.label();
    os << "\n";
    for (const auto &fp : map.fingerprints)
    {
        const Vec3 &p = map.locations.at(fp.location_id);
        os << fp.location_id << "," << format_double(p.x) << "," << format_double(p.y) << "," << format_double(p.z);
        for (double v : fp.rss)
            os << "," << num(v);
        os << "\n";
    }
    return os.str();
}

namespace
{

std::vector<std::string> split(std::string_view line, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i)
        if (i == line.size() || line[i] == sep)
        {
            out.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    return out;
}

double parse_number(const std::string &text, const std::string &pointer)
{
    try
    {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v))
            throw SchemaError(pointer, "not a finite number: '" + text + "'");
        return v;
    }
    catch (const std::logic_error &)
    {
        throw SchemaError(pointer, "not a number: '" + text + "'");
    }
}

} // namespace

RadioMap parse_radiomap(std::string_view text)
{
    RadioMap map;
    std::istringstream is{std::string(text)};
    std::string line;
    bool have_kind = false, have_columns = false;
    std::vector<StreamId> declared;
    int row = 0;
    while (std::getline(is, line))
    {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#')
        {
            auto colon = line.find(':');
            if (colon == std::string::npos)
                continue;
            std::string key = line.substr(1, colon - 1), value = line.substr(colon + 1);
            key.erase(0, key.find_first_not_of(' '));
            value.erase(0, value.find_first_not_of(' '));
            try
            {
                if (key == "kind")
                    map.kind = parse_map_kind(value), have_kind = true;
                else if (key == "streams")
                    for (const auto &s : split(value, ','))
                        declared.push_back(StreamId::parse(s));
                else if (key == "digest")
                    map.digest = value;
            }
            catch (const ArgumentError &e)
            {
                throw SchemaError("/" + key, e.what());
            }
            continue;
        }
        auto cells = split(line, ',');
        if (!have_columns)
        {
            if (cells.size() < 5 || cells[0] != "location_id" || cells[1] != "x" || cells[2] != "y" || cells[3] != "z")
                throw SchemaError("/columns", "expected header location_id,x,y,z,<streams>");
            for (std::size_t k = 4; k < cells.size(); ++k)
            {
                try
                {
                    map.streams.push_back(StreamId::parse(cells[k]));
                }
                catch (const ArgumentError &e)
                {
                    throw SchemaError("/columns/" + std::to_string(k), e.what());
                }
            }
            if (!declared.empty() && declared != map.streams)
                throw SchemaError("/streams", "stream header and column header disagree");
            have_columns = true;
            continue;
        }
        std::string p = "/fingerprints/" + std::to_string(row++);
        if (cells.size() != map.streams.size() + 4)
            throw SchemaError(p, "expected " + std::to_string(map.streams.size() + 4) + " columns");
        Fingerprint fp;
        double id = parse_number(cells[0], p + "/location_id");
        if (id != std::floor(id) || std::abs(id) > 1e9)
            throw SchemaError(p + "/location_id", "location id must be an integer");
        fp.location_id = static_cast<int>(id);
        Vec3 pos{parse_number(cells[1], p + "/x"), parse_number(cells[2], p + "/y"), parse_number(cells[3], p + "/z")};
        for (std::size_t k = 4; k < cells.size(); ++k)
            fp.rss.push_back(parse_number(cells[k], p + "/rss/" + std::to_string(k - 4)));
        if (map.locations.contains(fp.location_id))
            throw SchemaError(p + "/location_id", "duplicate location id");
        map.locations[fp.location_id] = pos;
        map.fingerprints.push_back(std::move(fp));
    }
    if (!have_kind)
        throw SchemaError("/kind", "missing '# kind:' header");
    if (!have_columns)
        throw SchemaError("/columns", "missing column header");
    std::ranges::sort(map.fingerprints, {}, &Fingerprint::location_id);
    map.validate();
    return map;
}

void save_radiomap(const RadioMap &map, const std::string &path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot write " + path);
    f << write_radiomap(map);
    if (!f)
        throw IoError("write failed: " + path);
}

RadioMap load_radiomap(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_radiomap(ss.str());
}

std::string write_rss_series(const RadioMap &map)
{
    std::ostringstream os;
    os << "location_id,stream,rss_dbm\n";
    for (std::size_t k = 0; k < map.streams.size(); ++k)
        for (const auto &fp : map.fingerprints)
            os << fp.location_id << "," << map.streams[k].label() << "," << format_fixed(fp.rss[k], 3) << "\n";
    return os.str();
}

} // namespace wavescope
