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

#ifndef WAVESCOPE_TESTBED_HPP
#define WAVESCOPE_TESTBED_HPP

#include <wavescope/scene.hpp>

#include <string>
#include <vector>

namespace wavescope
{

enum class TestbedKind
{
    device_based,
    device_free
};

enum class Mounting
{
    wall,
    ceiling
};

std::string_view to_string(TestbedKind kind);
std::string_view to_string(Mounting mounting);
TestbedKind parse_testbed_kind(std::string_view text);  // ArgumentError
Mounting parse_mounting(std::string_view text);         // ArgumentError

inline constexpr double wall_mount_height = 1.5;
inline constexpr double monitoring_point_height = 0.5;

struct Testbed
{
    Scene scene;  // geometry plus transceivers and radio-map locations
    std::vector<Transceiver> access_points;
    std::vector<Transceiver> monitoring_points;  // device-free only
    std::vector<RadioLocation> locations;
};

// 11 m x 6 m apartment replica: living room, open kitchen/hall, two bedrooms and a bath.
// Device-based: AP1, AP2 and 11 locations. Device-free: AP1, AP2, MP1, MP2 and 44
// locations (8-14 and 31-35 inside the right-hand bedroom).
Testbed build_testbed(TestbedKind kind, Mounting mounting);

// Surface id prefix of the wall between the hall and the right-hand bedroom.
inline constexpr std::string_view sub_area_wall_prefix = "wall_x8";

// The right-hand bedroom sealed off: the partition wall and its door are replaced by a
// solid concrete wall.
Scene seal_sub_area(const Scene &scene);

bool in_sub_area(const Vec3 &p);

// Repackages a scene document (fixture file) as a Testbed with the given mounting.
Testbed testbed_from_scene(const Scene &scene, Mounting mounting);

std::string fixture_file_name(TestbedKind kind);

// Fixture directory: $WAVESCOPE_FIXTURES when set, otherwise the compiled-in default.
std::string fixtures_directory();

// Loads the shipped fixture (wall mounting as stored) and applies `mounting`.
// Throws IoError when the file is missing.
Testbed load_testbed(TestbedKind kind, Mounting mounting, const std::string &directory = fixtures_directory());

// Writes both fixture files into `directory`.
void write_fixtures(const std::string &directory);

} // namespace wavescope

#endif
