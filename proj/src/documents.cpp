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

#include <wavescope/scenarios.hpp>

namespace wavescope::doc
{

json parse(std::string_view document)
{
    json j;
    try
    {
        j = json::parse(document);
    }
    catch (const json::parse_error &e)
    {
        throw SchemaError("", std::string("malformed document: ") + e.what());
    }
    if (!j.is_object())
        throw SchemaError("", "document must be an object");
    return j;
}

namespace
{

std::uint64_t unsigned_or(const json &obj, const char *key, std::uint64_t fallback, const std::string &pointer)
{
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
        throw SchemaError(pointer + "/" + key, "expected a non-negative integer");
    return it->get<std::uint64_t>();
}

std::string text_or(const json &obj, const char *key, const std::string &fallback, const std::string &pointer)
{
    auto it = obj.find(key);
    return it == obj.end() ? fallback : text(*it, pointer + "/" + key);
}

int small_int(long long v, const std::string &pointer)
{
    if (v < -1000000 || v > 1000000)
        throw SchemaError(pointer, "integer out of range");
    return static_cast<int>(v);
}

} // namespace

PropagationConfig propagation_from_json(const json &j, const std::string &p)
{
    if (!j.is_object())
        throw SchemaError(p, "expected an object");
    PropagationConfig c;
    c.max_depth = small_int(integer_or(j, "max_depth", c.max_depth, p), p + "/max_depth");
    c.min_power_dbm = number_or(j, "min_power_dbm", c.min_power_dbm, p);
    c.tessellation_order = small_int(integer_or(j, "tessellation_order", c.tessellation_order, p),
                                     p + "/tessellation_order");
    c.max_diffraction_order = small_int(integer_or(j, "max_diffraction_order", c.max_diffraction_order, p),
                                        p + "/max_diffraction_order");
    c.noise_floor_dbm = number_or(j, "noise_floor_dbm", c.noise_floor_dbm, p);
    c.quantize_rss = boolean_or(j, "quantize_rss", c.quantize_rss, p);
    c.bidirectional = boolean_or(j, "bidirectional", c.bidirectional, p);
    at(p, [&] {
        c.validate();
        return 0;
    });
    return c;
}

json propagation_to_json(const PropagationConfig &c)
{
    return {{"max_depth", c.max_depth},
            {"min_power_dbm", c.min_power_dbm},
            {"tessellation_order", c.tessellation_order},
            {"max_diffraction_order", c.max_diffraction_order},
            {"noise_floor_dbm", c.noise_floor_dbm},
            {"quantize_rss", c.quantize_rss},
            {"bidirectional", c.bidirectional}};
}

HumanCylinder cylinder_from_json(const json &j, const std::string &p, HumanCylinder c)
{
    if (!j.is_object())
        throw SchemaError(p, "expected an object");
    c.radius = number_or(j, "radius", c.radius, p);
    c.height = number_or(j, "height", c.height, p);
    if (!(c.radius > 0.0) || !(c.height > 0.0))
        throw SchemaError(p, "cylinder radius and height must be positive");
    if (auto it = j.find("material"); it != j.end())
    {
        std::string name = text(*it, p + "/material");
        try
        {
            c.material = name == Material::perfect_conductor().name ? Material::perfect_conductor()
                                                                    : default_material(name);
        }
        catch (const NotFoundError &e)
        {
            throw SchemaError(p + "/material", e.what());
        }
    }
    return c;
}

json cylinder_to_json(const HumanCylinder &c)
{
    return {{"radius", c.radius}, {"height", c.height}, {"material", c.material.name}};
}

CrowdPattern crowd_from_json(const json &j, const std::string &p)
{
    std::string kind = text(require(j, "pattern", p), p + "/pattern");
    CrowdPattern c;
    if (kind == "around_ap")
        c = CrowdPattern::around_ap(text(require(j, "ap", p), p + "/ap"),
                                    small_int(integer_or(j, "count", 12, p), p + "/count"),
                                    number_or(j, "ring_radius", 0.6, p));
    else if (kind == "party")
        c = CrowdPattern::party(small_int(integer_or(j, "count", 10, p), p + "/count"), unsigned_or(j, "seed", 0, p));
    else if (kind == "explicit")
    {
        std::vector<Vec3> pos;
        const json &list = require(j, "positions", p);
        if (!list.is_array())
            throw SchemaError(p + "/positions", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i)
            pos.push_back(vec3(list[i], p + "/positions/" + std::to_string(i)));
        c = CrowdPattern::explicit_positions(std::move(pos));
    }
    else
        throw SchemaError(p + "/pattern", "unknown crowd pattern '" + kind + "' (around_ap, party, explicit)");
    if (c.count < 0)
        throw SchemaError(p + "/count", "count must be >= 0");
    if (auto it = j.find("person"); it != j.end())
        c.person = cylinder_from_json(*it, p + "/person");
    return c;
}

json crowd_to_json(const CrowdPattern &c)
{
    json j;
    switch (c.kind)
    {
    case CrowdPattern::Kind::around_ap:
        j = {{"pattern", "around_ap"}, {"ap", c.ap_id}, {"count", c.count}, {"ring_radius", c.ring_radius}};
        break;
    case CrowdPattern::Kind::party:
        j = {{"pattern", "party"}, {"count", c.count}, {"seed", c.seed}};
        break;
    case CrowdPattern::Kind::explicit_list: {
        json pos = json::array();
        for (const auto &v : c.positions)
            pos.push_back(to_json(v));
        j = {{"pattern", "explicit"}, {"positions", pos}};
        break;
    }
    case CrowdPattern::Kind::none:
        j = {{"pattern", "none"}};
        break;
    }
    j["person"] = cylinder_to_json(c.person);
    return j;
}

namespace
{

CrowdCondition condition_from_json(const json &j, const char *key, const std::string &p)
{
    CrowdCondition out;
    const json &list = array_or_empty(j, key, p + "/");
    for (std::size_t i = 0; i < list.size(); ++i)
        out.push_back(crowd_from_json(list[i], p + "/" + key + "/" + std::to_string(i)));
    return out;
}

json condition_to_json(const CrowdCondition &c)
{
    json out = json::array();
    for (const auto &p : c)
        out.push_back(crowd_to_json(p));
    return out;
}

} // namespace

ScenarioConfig scenario_from_json(const json &j, const std::string &p)
{
    if (!j.is_object())
        throw SchemaError(p, "expected an object");
    ScenarioConfig c;
    c.label = text_or(j, "label", "scenario", p);
    c.experiment = text_or(j, "experiment", c.label, p);
    c.kind = at(p + "/kind", [&] { return parse_testbed_kind(text(require(j, "kind", p), p + "/kind")); });
    c.mounting = at(p + "/mounting", [&] { return parse_mounting(text_or(j, "mounting", "wall", p)); });
    c.frequency_hz = number_or(j, "frequency_hz", c.frequency_hz, p);
    c.train_condition = condition_from_json(j, "train_condition", p);
    c.test_condition = condition_from_json(j, "test_condition", p);
    c.outsider = boolean_or(j, "outsider", false, p);
    if (auto it = j.find("entity"); it != j.end())
        c.entity = cylinder_from_json(*it, p + "/entity");
    if (auto it = j.find("propagation"); it != j.end())
        c.propagation = propagation_from_json(*it, p + "/propagation");
    c.device_height = number_or(j, "device_height", c.device_height, p);
    c.include_carrier = boolean_or(j, "include_carrier", c.include_carrier, p);
    c.samples_per_location =
        small_int(integer_or(j, "samples_per_location", c.samples_per_location, p), p + "/samples_per_location");
    c.noise_sigma_db = number_or(j, "noise_sigma_db", c.noise_sigma_db, p);
    c.seed = unsigned_or(j, "seed", c.seed, p);
    if (auto it = j.find("paper_error_m"); it != j.end() && !it->is_null())
        c.paper_error_m = number(*it, p + "/paper_error_m");
    c.paper_table = text_or(j, "paper_table", "", p);
    at(p, [&] {
        c.validate();
        return 0;
    });
    return c;
}

json scenario_to_json(const ScenarioConfig &c)
{
    json j = {{"label", c.label},
              {"experiment", c.experiment},
              {"kind", std::string(to_string(c.kind))},
              {"mounting", std::string(to_string(c.mounting))},
              {"frequency_hz", c.frequency_hz},
              {"train_condition", condition_to_json(c.train_condition)},
              {"test_condition", condition_to_json(c.test_condition)},
              {"outsider", c.outsider},
              {"entity", cylinder_to_json(c.entity)},
              {"propagation", propagation_to_json(c.propagation)},
              {"device_height", c.device_height},
              {"include_carrier", c.include_carrier},
              {"samples_per_location", c.samples_per_location},
              {"noise_sigma_db", c.noise_sigma_db},
              {"seed", c.seed},
              {"paper_table", c.paper_table}};
    j["paper_error_m"] = c.paper_error_m ? json(*c.paper_error_m) : json(nullptr);
    return j;
}

} // namespace wavescope::doc
