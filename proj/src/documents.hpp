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

#ifndef WAVESCOPE_DOCUMENTS_HPP
#define WAVESCOPE_DOCUMENTS_HPP

#include <wavescope/errors.hpp>
#include <wavescope/geometry.hpp>
#include <wavescope/propagation.hpp>
#include <wavescope/radiomap.hpp>

#include <json.hpp>

#include <cmath>
#include <string>

namespace wavescope
{
struct ScenarioConfig;
}

// JSON document helpers shared by the scene, scenario and service parsers. Every
// failure is a SchemaError carrying the JSON pointer of the offending element.
namespace wavescope::doc
{

using json = nlohmann::json;

inline const json &require(const json &obj, const char *key, const std::string &pointer)
{
    if (!obj.is_object())
        throw SchemaError(pointer, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(pointer + "/" + key, "missing required field");
    return *it;
}

inline double number(const json &v, const std::string &pointer)
{
    if (!v.is_number())
        throw SchemaError(pointer, "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d))
        throw SchemaError(pointer, "expected a finite number");
    return d;
}

inline double number_or(const json &obj, const char *key, double fallback, const std::string &pointer)
{
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, pointer + "/" + key);
}

inline long long integer(const json &v, const std::string &pointer)
{
    if (!v.is_number_integer())
        throw SchemaError(pointer, "expected an integer");
    return v.get<long long>();
}

inline long long integer_or(const json &obj, const char *key, long long fallback, const std::string &pointer)
{
    auto it = obj.find(key);
    return it == obj.end() ? fallback : integer(*it, pointer + "/" + key);
}

inline bool boolean_or(const json &obj, const char *key, bool fallback, const std::string &pointer)
{
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_boolean())
        throw SchemaError(pointer + "/" + key, "expected true or false");
    return it->get<bool>();
}

inline std::string text(const json &v, const std::string &pointer)
{
    if (!v.is_string())
        throw SchemaError(pointer, "expected a string");
    return v.get<std::string>();
}

inline Vec3 vec3(const json &v, const std::string &pointer)
{
    if (!v.is_array() || v.size() != 3)
        throw SchemaError(pointer, "expected [x, y, z]");
    return {number(v[0], pointer + "/0"), number(v[1], pointer + "/1"), number(v[2], pointer + "/2")};
}

inline json to_json(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }

inline const json &array_or_empty(const json &doc, const char *key, const std::string &pointer)
{
    static const json empty = json::array();
    auto it = doc.find(key);
    if (it == doc.end())
        return empty;
    if (!it->is_array())
        throw SchemaError(pointer + key, "expected an array");
    return *it;
}

// Parses `document`, turning syntax errors into a SchemaError at the root.
json parse(std::string_view document);

// Calls f, re-raising an ArgumentError as a SchemaError at `pointer`.
template <class F> auto at(const std::string &pointer, F &&f)
{
    try
    {
        return f();
    }
    catch (const ArgumentError &e)
    {
        throw SchemaError(pointer, e.what());
    }
}

PropagationConfig propagation_from_json(const json &j, const std::string &pointer);
json propagation_to_json(const PropagationConfig &c);

CrowdPattern crowd_from_json(const json &j, const std::string &pointer);
json crowd_to_json(const CrowdPattern &p);

HumanCylinder cylinder_from_json(const json &j, const std::string &pointer, HumanCylinder base = {});
json cylinder_to_json(const HumanCylinder &c);

ScenarioConfig scenario_from_json(const json &j, const std::string &pointer);
json scenario_to_json(const ScenarioConfig &c);

} // namespace wavescope::doc

#endif
