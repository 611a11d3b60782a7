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

#ifndef WAVESCOPE_SCENE_HPP
#define WAVESCOPE_SCENE_HPP

#include <wavescope/geometry.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wavescope
{

struct Material
{
    std::string name;
    double relative_permittivity = 1.0;  // real part, >= 1
    double conductivity = 0.0;           // S/m at 1 GHz
    double thickness = 0.1;              // m, used by the slab transmission model
    bool is_perfect_conductor = false;
    // Conductivity scales as sigma(f) = conductivity * (f / 1 GHz)^conductivity_exponent.
    double conductivity_exponent = 0.0;

    double conductivity_at(double frequency_hz) const;

    // Complex relative permittivity eps_r - j sigma / (omega eps0).
    cplx complex_permittivity(double frequency_hz) const;

    static Material perfect_conductor();
};

// Built-in database: brick, concrete, wood, glass, plasterboard, metal.
const std::vector<Material> &default_materials();

// Looks up a built-in material by name; throws NotFoundError.
const Material &default_material(std::string_view name);

// Planar polygon. Geometry is fixed at construction; see Scene for validation.
struct Surface
{
    std::string id;
    std::vector<Vec3> vertices;
    int material = 0;  // index into Scene::materials()

    // Derived
    Vec3 normal{};
    double plane_offset = 0.0;  // dot(normal, p) for p on the plane
    Aabb box{};
    int drop_axis = 2;  // axis discarded when projecting to 2D

    bool contains(const Vec3 &p, double tol = 0.0) const;  // p assumed on the plane
};

struct HumanCylinder
{
    Vec3 center_base{};
    double radius = 0.15;
    double height = 1.7;
    Material material = Material::perfect_conductor();
};

enum class Role
{
    access_point,
    monitoring_point,
    tracked_device
};

std::string_view to_string(Role role);

struct Transceiver
{
    std::string id;
    Vec3 position{};
    Role role = Role::access_point;
    double transmit_power_mw = 2.0;
    double antenna_gain_dbi = 3.0;
    double frequency_hz = 2.4e9;
    std::string pattern = "isotropic";

    bool is_transmitter() const { return role == Role::access_point; }
};

// Free edge of a thin polygon; diffracts as a half-plane (exterior wedge angle 2 pi).
struct DiffractionEdge
{
    Vec3 start{}, end{};
    Vec3 direction{};     // unit, start -> end; equals face_tangent x face_normal
    double length = 0.0;
    int surface = -1;
    Vec3 face_tangent{};  // unit, in the surface plane, pointing from the edge into the polygon
    Vec3 face_normal{};
    double wedge_n = 2.0;
};

struct RadioLocation
{
    int id = 0;
    Vec3 position{};
};

enum class ElementKind
{
    surface,
    cylinder,
    edge
};

struct Hit
{
    ElementKind kind = ElementKind::surface;
    int index = -1;
    int part = 0;  // cylinder: 0 side, 1 top cap, 2 bottom cap
    Vec3 point{};
    double distance = 0.0;
    double incidence_angle = 0.0;  // from the element normal, [0, pi/2]
    Vec3 normal{};                 // unit, facing the incoming ray
};

class Scene
{
  public:
    Scene() = default;

    // Validates all geometry. Throws SchemaError with a JSON pointer naming the bad element.
    Scene(Aabb bounds, double ceiling_height, std::vector<Material> materials,
          std::vector<Surface> surfaces, std::vector<HumanCylinder> cylinders,
          std::vector<Transceiver> transceivers, std::vector<RadioLocation> locations = {});

    const Aabb &bounds() const { return bounds_; }
    double ceiling_height() const { return ceiling_height_; }
    const std::vector<Material> &materials() const { return materials_; }
    const std::vector<Surface> &surfaces() const { return surfaces_; }
    const std::vector<HumanCylinder> &cylinders() const { return cylinders_; }
    const std::vector<Transceiver> &transceivers() const { return transceivers_; }
    const std::vector<RadioLocation> &locations() const { return locations_; }
    const std::vector<DiffractionEdge> &edges() const { return edges_; }

    const Material &material_of(const Surface &s) const { return materials_[s.material]; }

    // Throws NotFoundError.
    const Transceiver &transceiver(std::string_view id) const;
    const Transceiver *find_transceiver(std::string_view id) const;

    // Total floor area of horizontal surfaces at z = 0 (m^2).
    double floor_area() const;

    // Copies sharing geometry but with a different entity/transceiver set.
    Scene with_cylinders(std::vector<HumanCylinder> cylinders) const;
    Scene with_transceivers(std::vector<Transceiver> transceivers) const;

    // Replaces every surface whose id starts with `id_prefix` by `replacement`.
    Scene with_surfaces_replaced(std::string_view id_prefix, std::vector<Surface> replacement,
                                 std::vector<Material> extra_materials = {}) const;

    int material_index(std::string_view name) const;  // -1 when absent

    // Stable content digest (hex SHA-256 of the canonical serialization).
    std::string digest() const;

  private:
    void derive_edges();

    Aabb bounds_{};
    double ceiling_height_ = 2.7;
    std::vector<Material> materials_;
    std::vector<Surface> surfaces_;
    std::vector<HumanCylinder> cylinders_;
    std::vector<Transceiver> transceivers_;
    std::vector<RadioLocation> locations_;
    std::vector<DiffractionEdge> edges_;
};

// Builds a validated Surface (normal, plane, bounding box). Throws SchemaError on
// fewer than 3 vertices, non-coplanar or self-intersecting polygons.
Surface make_surface(std::string id, std::vector<Vec3> vertices, int material,
                     const std::string &pointer = "/surfaces");

// Axis-aligned rectangle helpers used by fixture builders.
Surface vertical_rect(std::string id, Vec3 a, Vec3 b, double z0, double z1, int material);
Surface horizontal_rect(std::string id, double x0, double y0, double x1, double y1, double z,
                        int material);

// Scene document parsing/serialization (JSON dialect; see README for the schema).
Scene parse_scene(std::string_view document);
std::string serialize_scene(const Scene &scene);
Scene load_scene_file(const std::string &path);
void save_scene_file(const Scene &scene, const std::string &path);

// Nearest intersection with distance in (eps, max_distance]; surfaces and cylinders only.
std::optional<Hit> intersect_ray(const Scene &scene, const Vec3 &origin, const Vec3 &direction,
                                 double max_distance);

// Adds one copy of `entity` per location (base at the location). Throws ArgumentError
// for locations outside the scene bounds.
Scene place_entities(const Scene &scene, std::span<const Vec3> locations,
                     const HumanCylinder &entity);

inline constexpr double ray_epsilon = 1e-7;

} // namespace wavescope

#endif
