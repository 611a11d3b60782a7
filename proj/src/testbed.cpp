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
#include <wavescope/testbed.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#ifndef WAVESCOPE_FIXTURES_DIR
#define WAVESCOPE_FIXTURES_DIR "fixtures"
#endif

namespace wavescope
{

std::string_view to_string(TestbedKind kind)
{
    return kind == TestbedKind::device_based ? "device_based" : "device_free";
}

std::string_view to_string(Mounting mounting) { return mounting == Mounting::wall ? "wall" : "ceiling"; }

TestbedKind parse_testbed_kind(std::string_view text)
{
    if (text == "device_based" || text == "device-based")
        return TestbedKind::device_based;
    if (text == "device_free" || text == "device-free")
        return TestbedKind::device_free;
    throw ArgumentError("unknown testbed kind '" + std::string(text) + "' (expected device_based or device_free)");
}

Mounting parse_mounting(std::string_view text)
{
    if (text == "wall")
        return Mounting::wall;
    if (text == "ceiling")
        return Mounting::ceiling;
    throw ArgumentError("unknown mounting '" + std::string(text) + "' (expected wall or ceiling)");
}

namespace
{

constexpr double width = 11.0, depth = 6.0, ceiling = 2.7;

struct Opening
{
    double s0, s1, z0, z1;
    bool door;  // doors are empty, windows are glass
};

enum Mat
{
    brick,
    concrete,
    wood,
    glass,
    plasterboard,
    metal
};

// Splits a wall into a grid at every opening boundary, so each tile edge is either shared
// with a neighbouring tile or a free edge of an opening.
void add_wall(std::vector<Surface> &out, const std::string &prefix, Vec3 a, Vec3 b, int material,
              const std::vector<Opening> &openings = {})
{
    double len = norm(b - a);
    Vec3 u = (b - a) / len;
    std::vector<double> ss{0.0, len}, zs{0.0, ceiling};
    for (const auto &o : openings)
    {
        ss.insert(ss.end(), {o.s0, o.s1});
        zs.insert(zs.end(), {o.z0, o.z1});
    }
    std::ranges::sort(ss);
    std::ranges::sort(zs);
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    for (std::size_t i = 0; i + 1 < ss.size(); ++i)
        for (std::size_t j = 0; j + 1 < zs.size(); ++j)
        {
            double sm = 0.5 * (ss[i] + ss[i + 1]), zm = 0.5 * (zs[j] + zs[j + 1]);
            int m = material;
            bool skip = false;
            for (const auto &o : openings)
                if (sm > o.s0 && sm < o.s1 && zm > o.z0 && zm < o.z1)
                {
                    skip = o.door;
                    m = glass;
                }
            if (skip)
                continue;
            std::string id = prefix;
            if (ss.size() > 2 || zs.size() > 2)
                id += "_" + std::to_string(i) + "_" + std::to_string(j);
            out.push_back(vertical_rect(id, a + u * ss[i], a + u * ss[i + 1], zs[j], zs[j + 1], m));
        }
}

// Open-bottomed box standing on the floor.
void add_box(std::vector<Surface> &out, const std::string &prefix, double x0, double y0, double x1, double y1,
             double h, int material)
{
    Vec3 c[4] = {{x0, y0, 0}, {x1, y0, 0}, {x1, y1, 0}, {x0, y1, 0}};
    for (int k = 0; k < 4; ++k)
        out.push_back(vertical_rect(prefix + "_side" + std::to_string(k), c[k], c[(k + 1) % 4], 0.0, h, material));
    out.push_back(horizontal_rect(prefix + "_top", x0, y0, x1, y1, h, material));
}

std::vector<Material> testbed_materials()
{
    std::vector<Material> m;
    for (const char *name : {"brick", "concrete", "wood", "glass", "plasterboard", "metal"})
        m.push_back(default_material(name));
    return m;
}

std::vector<Surface> testbed_surfaces()
{
    std::vector<Surface> s;
    s.push_back(horizontal_rect("floor", 0, 0, width, depth, 0.0, concrete));
    s.push_back(horizontal_rect("ceiling", 0, 0, width, depth, ceiling, concrete));

    auto window = [](double s0, double s1) { return Opening{s0, s1, 0.9, 2.1, false}; };
    auto door = [](double s0, double s1) { return Opening{s0, s1, 0.0, 2.1, true}; };

    add_wall(s, "wall_y0", {0, 0, 0}, {width, 0, 0}, brick, {window(1.5, 3.5), window(9.0, 10.5)});
    add_wall(s, "wall_y6", {0, depth, 0}, {width, depth, 0}, brick, {window(0.8, 2.2), window(9.0, 10.5)});
    add_wall(s, "wall_x0", {0, 0, 0}, {0, depth, 0}, brick, {window(4.2, 5.2)});
    add_wall(s, "wall_x11", {width, 0, 0}, {width, depth, 0}, brick, {window(0.8, 1.8)});

    add_wall(s, std::string(sub_area_wall_prefix), {8, 0, 0}, {8, depth, 0}, brick, {door(2.5, 3.4)});
    add_wall(s, "wall_y3.5", {0, 3.5, 0}, {5, 3.5, 0}, plasterboard, {door(1.8, 2.7), door(3.8, 4.6)});
    add_wall(s, "wall_x3", {3, 3.5, 0}, {3, depth, 0}, plasterboard);
    add_wall(s, "wall_x5", {5, 3.5, 0}, {5, depth, 0}, plasterboard);

    add_box(s, "sofa", 0.4, 0.2, 2.3, 1.0, 0.8, wood);
    add_box(s, "table", 2.6, 1.3, 3.6, 2.0, 0.75, wood);
    add_box(s, "fridge", 5.2, 5.2, 5.9, 5.9, 1.8, metal);
    add_box(s, "counter", 6.2, 5.45, 7.9, 5.95, 0.9, wood);
    add_box(s, "bed", 1.4, 4.4, 2.9, 5.9, 0.5, wood);
    add_box(s, "wardrobe", 8.1, 4.8, 8.7, 5.9, 2.0, wood);
    add_box(s, "desk", 10.3, 5.0, 10.9, 5.9, 0.75, wood);
    return s;
}

Transceiver node(std::string id, double x, double y, double z, Role role)
{
    Transceiver t;
    t.id = std::move(id);
    t.position = {x, y, z};
    t.role = role;
    return t;
}

std::vector<RadioLocation> floor_points(const std::vector<std::pair<int, std::pair<double, double>>> &pts)
{
    std::vector<RadioLocation> out;
    for (const auto &[id, xy] : pts)
        out.push_back({id, {xy.first, xy.second, 0.0}});
    std::ranges::sort(out, {}, &RadioLocation::id);
    return out;
}

} // namespace

bool in_sub_area(const Vec3 &p) { return p.x > 8.0; }

Testbed build_testbed(TestbedKind kind, Mounting mounting)
{
    std::vector<Transceiver> nodes;
    std::vector<RadioLocation> locations;
    double h = wall_mount_height;
    if (kind == TestbedKind::device_based)
    {
        nodes = {node("AP1", 0.1, 1.5, h, Role::access_point), node("AP2", 10.9, 4.5, h, Role::access_point)};
        locations = floor_points({{1, {1.0, 2.2}},
                                  {2, {3.0, 0.8}},
                                  {3, {4.2, 2.6}},
                                  {4, {0.7, 4.6}},
                                  {5, {4.0, 4.9}},
                                  {6, {6.2, 1.0}},
                                  {7, {6.5, 3.2}},
                                  {8, {7.0, 4.8}},
                                  {9, {9.0, 1.2}},
                                  {10, {9.8, 3.0}},
                                  {11, {9.6, 4.9}}});
    }
    else
    {
        double m = monitoring_point_height;
        nodes = {node("AP1", 0.1, 0.8, h, Role::access_point), node("AP2", 10.9, 3.0, h, Role::access_point),
                 node("MP1", 1.0, 3.0, m, Role::monitoring_point),
                 node("MP2", 8.5, 0.6, m, Role::monitoring_point)};
        locations = floor_points({
            // along the AP2-MP1 line of sight
            {1, {1.6, 3.0}}, {2, {2.3, 3.0}}, {3, {3.0, 3.0}}, {4, {3.7, 3.0}}, {5, {4.4, 3.0}},
            {6, {5.1, 3.0}}, {7, {5.8, 3.0}},
            // right-hand bedroom; 8-10 on the AP2-MP2 diagonal
            {8, {9.1, 1.2}}, {9, {9.7, 1.8}}, {10, {10.3, 2.4}}, {11, {8.6, 2.0}}, {12, {9.2, 3.9}},
            {13, {10.2, 4.4}}, {14, {9.3, 5.2}},
            {31, {10.5, 0.8}}, {32, {8.7, 4.2}}, {33, {9.9, 5.4}}, {34, {10.5, 1.6}}, {35, {9.0, 2.2}},
            // living room
            {15, {0.8, 1.6}}, {16, {2.0, 1.7}}, {17, {4.3, 1.2}}, {18, {3.0, 0.6}}, {19, {4.4, 2.2}},
            {20, {3.9, 0.4}}, {40, {2.3, 2.2}}, {41, {1.3, 2.2}},
            // kitchen and hall
            {21, {5.7, 0.6}}, {22, {6.9, 0.7}}, {23, {5.8, 1.8}}, {24, {7.2, 1.9}}, {25, {6.4, 4.1}},
            {26, {7.4, 4.7}}, {27, {5.6, 4.6}}, {28, {6.8, 5.0}}, {42, {6.3, 2.2}}, {43, {5.4, 3.9}},
            {44, {7.5, 3.9}},
            // bedroom and bath
            {29, {0.6, 4.4}}, {30, {0.7, 5.5}}, {36, {2.1, 3.95}}, {37, {3.6, 4.5}}, {38, {4.4, 5.4}},
            {39, {4.3, 4.0}},
        });
    }
    Scene scene(Aabb{{0, 0, 0}, {width, depth, ceiling}}, ceiling, testbed_materials(), testbed_surfaces(), {},
                nodes, locations);
    return testbed_from_scene(scene, mounting);
}

Testbed testbed_from_scene(const Scene &scene, Mounting mounting)
{
    Testbed tb;
    std::vector<Transceiver> nodes = scene.transceivers();
    for (auto &t : nodes)
    {
        if (t.role == Role::access_point)
            t.position.z = mounting == Mounting::wall ? wall_mount_height : scene.ceiling_height();
    }
    tb.scene = scene.with_transceivers(nodes);
    for (const auto &t : nodes)
    {
        if (t.role == Role::access_point)
            tb.access_points.push_back(t);
        else if (t.role == Role::monitoring_point)
            tb.monitoring_points.push_back(t);
    }
    auto by_id = [](const Transceiver &a, const Transceiver &b) { return a.id < b.id; };
    std::ranges::sort(tb.access_points, by_id);
    std::ranges::sort(tb.monitoring_points, by_id);
    tb.locations = scene.locations();
    return tb;
}

Scene seal_sub_area(const Scene &scene)
{
    // material index 0 refers to the first entry of the extra list
    int c = scene.material_index("concrete");
    std::vector<Material> extra{c >= 0 ? scene.materials()[c] : default_material("concrete")};
    std::vector<Surface> wall{vertical_rect(std::string(sub_area_wall_prefix) + "_sealed", {8, 0, 0}, {8, depth, 0},
                                            0.0, scene.ceiling_height(), 0)};
    return scene.with_surfaces_replaced(sub_area_wall_prefix, std::move(wall), std::move(extra));
}

std::string fixture_file_name(TestbedKind kind)
{
    return kind == TestbedKind::device_based ? "testbed_device_based.scene" : "testbed_device_free.scene";
}

std::string fixtures_directory()
{
    if (const char *env = std::getenv("WAVESCOPE_FIXTURES"); env && *env)
        return env;
    return WAVESCOPE_FIXTURES_DIR;
}

Testbed load_testbed(TestbedKind kind, Mounting mounting, const std::string &directory)
{
    auto path = std::filesystem::path(directory) / fixture_file_name(kind);
    if (!std::filesystem::exists(path))
        throw IoError("fixture not found: " + path.string());
    return testbed_from_scene(load_scene_file(path.string()), mounting);
}

void write_fixtures(const std::string &directory)
{
    std::filesystem::create_directories(directory);
    for (auto kind : {TestbedKind::device_based, TestbedKind::device_free})
        save_scene_file(build_testbed(kind, Mounting::wall).scene,
                        (std::filesystem::path(directory) / fixture_file_name(kind)).string());
}

} // namespace wavescope
