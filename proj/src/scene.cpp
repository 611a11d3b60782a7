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

#include <wavescope/scene.hpp>

#include "documents.hpp"

#include <wavescope/digest.hpp>
#include <wavescope/errors.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace wavescope
{

using json = nlohmann::json;
using doc::array_or_empty;
using doc::number;
using doc::number_or;
using doc::require;
using doc::text;
using doc::to_json;
using doc::vec3;

namespace
{
constexpr double coplanar_tolerance = 1e-6;

struct P2
{
    double u, v;
};

P2 project(const Vec3 &p, int drop_axis)
{
    switch (drop_axis)
    {
    case 0:
        return {p.y, p.z};
    case 1:
        return {p.z, p.x};
    default:
        return {p.x, p.y};
    }
}

double orient(P2 a, P2 b, P2 c) { return (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u); }

bool segments_intersect(P2 a, P2 b, P2 c, P2 d)
{
    double d1 = orient(c, d, a), d2 = orient(c, d, b), d3 = orient(a, b, c), d4 = orient(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](P2 p, P2 q, P2 r) {
        return std::min(p.u, q.u) <= r.u && r.u <= std::max(p.u, q.u) && std::min(p.v, q.v) <= r.v &&
               r.v <= std::max(p.v, q.v);
    };
    const double eps = 1e-14;
    return (std::abs(d1) < eps && on_segment(c, d, a)) || (std::abs(d2) < eps && on_segment(c, d, b)) ||
           (std::abs(d3) < eps && on_segment(a, b, c)) || (std::abs(d4) < eps && on_segment(a, b, d));
}

double point_segment_distance(const Vec3 &p, const Vec3 &a, const Vec3 &b)
{
    Vec3 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return distance(p, a + ab * t);
}

std::string ptr(const std::string &base, std::size_t index) { return base + "/" + std::to_string(index); }

} // namespace

// ---------------------------------------------------------------------------
// Materials

double Material::conductivity_at(double frequency_hz) const
{
    if (conductivity_exponent == 0.0)
        return conductivity;
    return conductivity * std::pow(frequency_hz / 1e9, conductivity_exponent);
}

cplx Material::complex_permittivity(double frequency_hz) const
{
    double omega = 2.0 * pi * frequency_hz;
    return {relative_permittivity, -conductivity_at(frequency_hz) / (omega * vacuum_permittivity)};
}

Material Material::perfect_conductor()
{
    return Material{"pec", 1.0, 0.0, 0.01, true, 0.0};
}

const std::vector<Material> &default_materials()
{
    // Conductivity at 1 GHz with the frequency exponent of the ITU-R P.2040 fits.
    static const std::vector<Material> table = {
        {"brick", 4.44, 0.0238, 0.20, false, 0.16},
        {"concrete", 6.5, 0.0462, 0.20, false, 0.7822},
        {"wood", 2.1, 0.0047, 0.04, false, 1.0718},
        {"glass", 6.0, 0.0036, 0.006, false, 1.3394},
        {"plasterboard", 2.8, 0.0085, 0.03, false, 0.9395},
        {"metal", 1.0, 0.0, 0.002, true, 0.0},
    };
    return table;
}

const Material &default_material(std::string_view name)
{
    for (const auto &m : default_materials())
        if (m.name == name)
            return m;
    throw NotFoundError("unknown built-in material '" + std::string(name) + "'");
}

std::string_view to_string(Role role)
{
    switch (role)
    {
    case Role::access_point:
        return "access_point";
    case Role::monitoring_point:
        return "monitoring_point";
    case Role::tracked_device:
        return "tracked_device";
    }
    return "access_point";
}

// ---------------------------------------------------------------------------
// Surfaces

bool Surface::contains(const Vec3 &p, double tol) const
{
    const P2 q = project(p, drop_axis);
    bool inside = false;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    {
        P2 a = project(vertices[i], drop_axis), b = project(vertices[j], drop_axis);
        if ((a.v > q.v) != (b.v > q.v))
        {
            double u = a.u + (q.v - a.v) * (b.u - a.u) / (b.v - a.v);
            if (q.u < u)
                inside = !inside;
        }
    }
    if (inside || tol <= 0.0)
        return inside;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        if (point_segment_distance(p, vertices[j], vertices[i]) <= tol)
            return true;
    return false;
}

Surface make_surface(std::string id, std::vector<Vec3> vertices, int material, const std::string &pointer)
{
    if (vertices.size() < 3)
        throw SchemaError(pointer + "/vertices", "polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (!vertices[i].finite())
            throw SchemaError(ptr(pointer + "/vertices", i), "non-finite vertex");

    // Newell normal
    Vec3 n{};
    for (std::size_t i = 0; i < vertices.size(); ++i)
    {
        const Vec3 &a = vertices[i];
        const Vec3 &b = vertices[(i + 1) % vertices.size()];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    double len = norm(n);
    if (len < 1e-12)
        throw SchemaError(pointer + "/vertices", "degenerate polygon (zero area)");
    n = n / len;

    Vec3 centroid{};
    for (const auto &v : vertices)
        centroid += v;
    centroid = centroid / static_cast<double>(vertices.size());
    double d = dot(n, centroid);

    for (std::size_t i = 0; i < vertices.size(); ++i)
    {
        double off = std::abs(dot(n, vertices[i]) - d);
        if (off > coplanar_tolerance)
            throw SchemaError(ptr(pointer + "/vertices", i),
                              "vertex is " + format_double(off) + " m off the polygon plane (surface '" +
                                  id + "' is not coplanar)");
    }

    Surface s;
    s.id = std::move(id);
    s.material = material;
    s.normal = n;
    s.plane_offset = d;
    s.drop_axis = std::abs(n.x) >= std::abs(n.y) && std::abs(n.x) >= std::abs(n.z)
                      ? 0
                      : (std::abs(n.y) >= std::abs(n.z) ? 1 : 2);

    // Simple polygon: no two non-adjacent edges intersect.
    const std::size_t m = vertices.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
        {
            if (j == i + 1 || (i == 0 && j == m - 1))
                continue;
            P2 a = project(vertices[i], s.drop_axis), b = project(vertices[(i + 1) % m], s.drop_axis);
            P2 c = project(vertices[j], s.drop_axis), e = project(vertices[(j + 1) % m], s.drop_axis);
            if (segments_intersect(a, b, c, e))
                throw SchemaError(pointer + "/vertices", "polygon '" + s.id + "' self-intersects");
        }

    s.box.lo = s.box.hi = vertices.front();
    for (const auto &v : vertices)
    {
        s.box.lo = {std::min(s.box.lo.x, v.x), std::min(s.box.lo.y, v.y), std::min(s.box.lo.z, v.z)};
        s.box.hi = {std::max(s.box.hi.x, v.x), std::max(s.box.hi.y, v.y), std::max(s.box.hi.z, v.z)};
    }
    s.vertices = std::move(vertices);
    return s;
}

Surface vertical_rect(std::string id, Vec3 a, Vec3 b, double z0, double z1, int material)
{
    return make_surface(std::move(id), {{a.x, a.y, z0}, {b.x, b.y, z0}, {b.x, b.y, z1}, {a.x, a.y, z1}},
                        material);
}

Surface horizontal_rect(std::string id, double x0, double y0, double x1, double y1, double z, int material)
{
    return make_surface(std::move(id), {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}}, material);
}

// ---------------------------------------------------------------------------
// Scene

Scene::Scene(Aabb bounds, double ceiling_height, std::vector<Material> materials, std::vector<Surface> surfaces,
             std::vector<HumanCylinder> cylinders, std::vector<Transceiver> transceivers,
             std::vector<RadioLocation> locations)
    : bounds_(bounds), ceiling_height_(ceiling_height), materials_(std::move(materials)),
      surfaces_(std::move(surfaces)), cylinders_(std::move(cylinders)), transceivers_(std::move(transceivers)),
      locations_(std::move(locations))
{
    if (!bounds_.lo.finite() || !bounds_.hi.finite() || !(bounds_.lo.x < bounds_.hi.x) ||
        !(bounds_.lo.y < bounds_.hi.y) || !(bounds_.lo.z < bounds_.hi.z))
        throw SchemaError("/bounds", "bounds must be a finite box with min < max");
    if (!(ceiling_height_ > 0.0) || !std::isfinite(ceiling_height_))
        throw SchemaError("/ceiling_height_m", "ceiling height must be positive");

    std::set<std::string> names;
    for (std::size_t i = 0; i < materials_.size(); ++i)
    {
        const auto &m = materials_[i];
        const std::string p = ptr("/materials", i);
        if (m.name.empty() || !names.insert(m.name).second)
            throw SchemaError(p + "/name", "material names must be unique and non-empty");
        if (!m.is_perfect_conductor && !(m.relative_permittivity >= 1.0))
            throw SchemaError(p + "/eps_r", "relative permittivity must be >= 1");
        if (!(m.conductivity >= 0.0))
            throw SchemaError(p + "/sigma", "conductivity must be >= 0");
        if (!(m.thickness > 0.0))
            throw SchemaError(p + "/thickness_m", "thickness must be > 0");
    }

    for (std::size_t i = 0; i < surfaces_.size(); ++i)
    {
        const auto &s = surfaces_[i];
        const std::string p = ptr("/surfaces", i);
        if (s.material < 0 || s.material >= static_cast<int>(materials_.size()))
            throw SchemaError(p + "/material", "surface references an undeclared material");
        for (std::size_t k = 0; k < s.vertices.size(); ++k)
            if (!bounds_.contains(s.vertices[k], 1e-6))
                throw SchemaError(ptr(p + "/vertices", k), "vertex outside scene bounds");
    }

    for (std::size_t i = 0; i < cylinders_.size(); ++i)
    {
        const auto &c = cylinders_[i];
        const std::string p = ptr("/cylinders", i);
        if (!(c.radius > 0.0) || !(c.height > 0.0))
            throw SchemaError(p, "cylinder radius and height must be positive");
        if (!bounds_.contains(c.center_base, 1e-6))
            throw SchemaError(p + "/base", "cylinder base outside scene bounds");
    }

    std::set<std::string> ids;
    for (std::size_t i = 0; i < transceivers_.size(); ++i)
    {
        const auto &t = transceivers_[i];
        const std::string p = ptr("/transceivers", i);
        if (t.id.empty() || !ids.insert(t.id).second)
            throw SchemaError(p + "/id", "transceiver ids must be unique and non-empty");
        if (!t.position.finite())
            throw SchemaError(p + "/position", "non-finite position");
        if (t.is_transmitter() && !(t.transmit_power_mw > 0.0))
            throw SchemaError(p + "/power_mw", "transmit power must be > 0");
        if (!(t.frequency_hz > 0.0))
            throw SchemaError(p + "/freq_hz", "frequency must be > 0");
        if (t.pattern != "isotropic")
            throw SchemaError(p + "/pattern", "unsupported antenna pattern '" + t.pattern + "'");
    }

    derive_edges();
}

void Scene::derive_edges()
{
    edges_.clear();
    constexpr double tol = 1e-6;
    for (std::size_t si = 0; si < surfaces_.size(); ++si)
    {
        const Surface &s = surfaces_[si];
        const std::size_t m = s.vertices.size();
        for (std::size_t i = 0; i < m; ++i)
        {
            const Vec3 a = s.vertices[i], b = s.vertices[(i + 1) % m];
            const Vec3 mid = (a + b) * 0.5;
            bool covered = false;
            for (std::size_t sj = 0; sj < surfaces_.size() && !covered; ++sj)
            {
                if (sj == si)
                    continue;
                const Surface &o = surfaces_[sj];
                if (std::abs(dot(o.normal, a) - o.plane_offset) > tol ||
                    std::abs(dot(o.normal, b) - o.plane_offset) > tol)
                    continue;
                covered = o.contains(mid, tol);
            }
            if (covered)
                continue;

            DiffractionEdge e;
            e.start = a;
            e.end = b;
            e.length = distance(a, b);
            if (e.length < 1e-6)
                continue;
            const Vec3 along = (b - a) / e.length;
            Vec3 t = normalized(cross(s.normal, along));
            if (!s.contains(mid + t * 1e-4))
                t = -t;
            e.surface = static_cast<int>(si);
            e.face_tangent = t;
            e.face_normal = s.normal;
            e.direction = cross(t, s.normal);
            if (dot(e.direction, along) < 0)
                std::swap(e.start, e.end);
            edges_.push_back(e);
        }
    }
}

const Transceiver *Scene::find_transceiver(std::string_view id) const
{
    for (const auto &t : transceivers_)
        if (t.id == id)
            return &t;
    return nullptr;
}

const Transceiver &Scene::transceiver(std::string_view id) const
{
    if (const auto *t = find_transceiver(id))
        return *t;
    throw NotFoundError("unknown transceiver id '" + std::string(id) + "'");
}

double Scene::floor_area() const
{
    double area = 0.0;
    for (const auto &s : surfaces_)
    {
        if (std::abs(std::abs(s.normal.z) - 1.0) > 1e-9 || std::abs(s.box.lo.z - bounds_.lo.z) > 1e-9 ||
            std::abs(s.box.hi.z - bounds_.lo.z) > 1e-9)
            continue;
        double a2 = 0.0;
        for (std::size_t i = 0, n = s.vertices.size(); i < n; ++i)
        {
            const Vec3 &p = s.vertices[i], &q = s.vertices[(i + 1) % n];
            a2 += p.x * q.y - q.x * p.y;
        }
        area += std::abs(a2) * 0.5;
    }
    return area;
}

Scene Scene::with_cylinders(std::vector<HumanCylinder> cylinders) const
{
    Scene out = *this;
    for (std::size_t i = 0; i < cylinders.size(); ++i)
    {
        const auto &c = cylinders[i];
        if (!(c.radius > 0.0) || !(c.height > 0.0))
            throw ArgumentError("cylinder radius and height must be positive");
        if (!bounds_.contains(c.center_base, 1e-6))
            throw ArgumentError("entity location (" + format_double(c.center_base.x) + ", " +
                                format_double(c.center_base.y) + ", " + format_double(c.center_base.z) +
                                ") is outside the scene bounds");
    }
    out.cylinders_ = std::move(cylinders);
    return out;
}

Scene Scene::with_transceivers(std::vector<Transceiver> transceivers) const
{
    return Scene(bounds_, ceiling_height_, materials_, surfaces_, cylinders_, std::move(transceivers), locations_);
}

Scene Scene::with_surfaces_replaced(std::string_view id_prefix, std::vector<Surface> replacement,
                                    std::vector<Material> extra_materials) const
{
    std::vector<Material> materials = materials_;
    std::vector<int> remap;
    for (auto &m : extra_materials)
    {
        int existing = material_index(m.name);
        if (existing >= 0)
            remap.push_back(existing);
        else
        {
            remap.push_back(static_cast<int>(materials.size()));
            materials.push_back(std::move(m));
        }
    }
    std::vector<Surface> surfaces;
    for (const auto &s : surfaces_)
        if (!std::string_view(s.id).starts_with(id_prefix))
            surfaces.push_back(s);
    for (auto &s : replacement)
    {
        if (!remap.empty() && s.material >= 0 && s.material < static_cast<int>(remap.size()))
            s.material = remap[s.material];
        surfaces.push_back(std::move(s));
    }
    return Scene(bounds_, ceiling_height_, std::move(materials), std::move(surfaces), cylinders_, transceivers_,
                 locations_);
}

int Scene::material_index(std::string_view name) const
{
    for (std::size_t i = 0; i < materials_.size(); ++i)
        if (materials_[i].name == name)
            return static_cast<int>(i);
    return -1;
}

std::string Scene::digest() const { return sha256_hex(serialize_scene(*this)); }

// ---------------------------------------------------------------------------
// Document IO

namespace
{

Role role_from(const std::string &s, const std::string &pointer)
{
    if (s == "access_point")
        return Role::access_point;
    if (s == "monitoring_point")
        return Role::monitoring_point;
    if (s == "tracked_device")
        return Role::tracked_device;
    throw SchemaError(pointer, "unknown role '" + s + "'");
}

Material material_from(const json &m, const std::string &p)
{
    Material mat;
    mat.name = text(require(m, "name", p), p + "/name");
    mat.is_perfect_conductor = m.value("pec", false);
    mat.relative_permittivity = mat.is_perfect_conductor ? number_or(m, "eps_r", 1.0, p)
                                                         : number(require(m, "eps_r", p), p + "/eps_r");
    mat.conductivity = number_or(m, "sigma", 0.0, p);
    mat.conductivity_exponent = number_or(m, "sigma_exponent", 0.0, p);
    mat.thickness = number_or(m, "thickness_m", 0.1, p);
    return mat;
}

json material_to_json(const Material &m)
{
    json j = {{"name", m.name},          {"eps_r", m.relative_permittivity}, {"sigma", m.conductivity},
              {"thickness_m", m.thickness}, {"pec", m.is_perfect_conductor}};
    if (m.conductivity_exponent != 0.0)
        j["sigma_exponent"] = m.conductivity_exponent;
    return j;
}

} // namespace

Scene parse_scene(std::string_view document)
{
    json doc;
    try
    {
        doc = json::parse(document);
    }
    catch (const json::parse_error &e)
    {
        throw SchemaError("", std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object())
        throw SchemaError("", "scene document must be an object");

    const json &b = require(doc, "bounds", "");
    Aabb bounds{vec3(require(b, "min", "/bounds"), "/bounds/min"), vec3(require(b, "max", "/bounds"), "/bounds/max")};
    double ceiling = number(require(doc, "ceiling_height_m", ""), "/ceiling_height_m");

    // Without a materials list the built-in database applies.
    std::vector<Material> materials;
    if (!doc.contains("materials"))
        materials = default_materials();
    const json &mats = array_or_empty(doc, "materials", "/");
    for (std::size_t i = 0; i < mats.size(); ++i)
        materials.push_back(material_from(mats[i], ptr("/materials", i)));

    auto find_material = [&](const std::string &name) -> int {
        for (std::size_t i = 0; i < materials.size(); ++i)
            if (materials[i].name == name)
                return static_cast<int>(i);
        return -1;
    };

    std::vector<Surface> surfaces;
    const json &surfs = array_or_empty(doc, "surfaces", "/");
    for (std::size_t i = 0; i < surfs.size(); ++i)
    {
        const std::string p = ptr("/surfaces", i);
        const json &s = surfs[i];
        std::string id = s.is_object() && s.contains("id") ? text(s["id"], p + "/id") : "surface" + std::to_string(i);
        std::string mname = text(require(s, "material", p), p + "/material");
        int mi = find_material(mname);
        if (mi < 0)
            throw SchemaError(p + "/material", "unknown material '" + mname + "' in surface '" + id + "'");
        const json &verts = require(s, "vertices", p);
        if (!verts.is_array())
            throw SchemaError(p + "/vertices", "expected an array of [x, y, z]");
        std::vector<Vec3> vs;
        for (std::size_t k = 0; k < verts.size(); ++k)
            vs.push_back(vec3(verts[k], ptr(p + "/vertices", k)));
        surfaces.push_back(make_surface(std::move(id), std::move(vs), mi, p));
    }

    std::vector<HumanCylinder> cylinders;
    const json &cyls = array_or_empty(doc, "cylinders", "/");
    for (std::size_t i = 0; i < cyls.size(); ++i)
    {
        const std::string p = ptr("/cylinders", i);
        const json &c = cyls[i];
        HumanCylinder h;
        h.center_base = vec3(require(c, "base", p), p + "/base");
        h.radius = number_or(c, "radius", h.radius, p);
        h.height = number_or(c, "height", h.height, p);
        if (c.contains("material"))
        {
            std::string mname = text(c["material"], p + "/material");
            int mi = find_material(mname);
            if (mi < 0)
                throw SchemaError(p + "/material", "unknown material '" + mname + "'");
            h.material = materials[mi];
        }
        cylinders.push_back(h);
    }

    std::vector<Transceiver> transceivers;
    const json &txs = array_or_empty(doc, "transceivers", "/");
    for (std::size_t i = 0; i < txs.size(); ++i)
    {
        const std::string p = ptr("/transceivers", i);
        const json &t = txs[i];
        Transceiver tr;
        tr.id = text(require(t, "id", p), p + "/id");
        tr.role = role_from(text(require(t, "role", p), p + "/role"), p + "/role");
        tr.position = vec3(require(t, "position", p), p + "/position");
        tr.transmit_power_mw = number_or(t, "power_mw", tr.transmit_power_mw, p);
        tr.antenna_gain_dbi = number_or(t, "gain_dbi", tr.antenna_gain_dbi, p);
        tr.frequency_hz = number_or(t, "freq_hz", tr.frequency_hz, p);
        if (t.contains("pattern"))
            tr.pattern = text(t["pattern"], p + "/pattern");
        transceivers.push_back(tr);
    }

    std::vector<RadioLocation> locations;
    const json &locs = array_or_empty(doc, "radiomap_locations", "/");
    for (std::size_t i = 0; i < locs.size(); ++i)
    {
        const std::string p = ptr("/radiomap_locations", i);
        const json &l = locs[i];
        const json &idv = require(l, "id", p);
        if (!idv.is_number_integer() || idv.get<int>() < 1)
            throw SchemaError(p + "/id", "location id must be a positive integer");
        locations.push_back({idv.get<int>(), vec3(require(l, "position", p), p + "/position")});
    }

    return Scene(bounds, ceiling, std::move(materials), std::move(surfaces), std::move(cylinders),
                 std::move(transceivers), std::move(locations));
}

std::string serialize_scene(const Scene &scene)
{
    json doc;
    doc["format"] = "wavescope-scene";
    doc["version"] = 1;
    doc["bounds"] = {{"min", to_json(scene.bounds().lo)}, {"max", to_json(scene.bounds().hi)}};
    doc["ceiling_height_m"] = scene.ceiling_height();

    json mats = json::array();
    for (const auto &m : scene.materials())
        mats.push_back(material_to_json(m));
    doc["materials"] = mats;

    json surfs = json::array();
    for (const auto &s : scene.surfaces())
    {
        json verts = json::array();
        for (const auto &v : s.vertices)
            verts.push_back(to_json(v));
        surfs.push_back({{"id", s.id}, {"material", scene.materials()[s.material].name}, {"vertices", verts}});
    }
    doc["surfaces"] = surfs;

    json cyls = json::array();
    for (const auto &c : scene.cylinders())
    {
        json j = {{"base", to_json(c.center_base)}, {"radius", c.radius}, {"height", c.height}};
        if (!c.material.is_perfect_conductor || c.material.name != "pec")
            j["material"] = c.material.name;
        cyls.push_back(j);
    }
    doc["cylinders"] = cyls;

    json txs = json::array();
    for (const auto &t : scene.transceivers())
        txs.push_back({{"id", t.id},
                       {"role", std::string(to_string(t.role))},
                       {"position", to_json(t.position)},
                       {"power_mw", t.transmit_power_mw},
                       {"gain_dbi", t.antenna_gain_dbi},
                       {"freq_hz", t.frequency_hz},
                       {"pattern", t.pattern}});
    doc["transceivers"] = txs;

    if (!scene.locations().empty())
    {
        json locs = json::array();
        for (const auto &l : scene.locations())
            locs.push_back({{"id", l.id}, {"position", to_json(l.position)}});
        doc["radiomap_locations"] = locs;
    }
    return doc.dump(1) + "\n";
}

Scene load_scene_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open scene file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

void save_scene_file(const Scene &scene, const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write scene file '" + path + "'");
    out << serialize_scene(scene);
}

// ---------------------------------------------------------------------------
// Queries

namespace
{

void consider_cylinder(const HumanCylinder &c, int index, const Vec3 &o, const Vec3 &d, double &best,
                       std::optional<Hit> &hit)
{
    const double zb = c.center_base.z, zt = c.center_base.z + c.height;
    const double ox = o.x - c.center_base.x, oy = o.y - c.center_base.y;

    auto accept = [&](double t, int part, Vec3 normal) {
        Hit h;
        h.kind = ElementKind::cylinder;
        h.index = index;
        h.part = part;
        h.distance = t;
        h.point = o + d * t;
        double cosi = dot(normal, d);
        if (cosi > 0)
            normal = -normal;
        h.normal = normal;
        h.incidence_angle = std::acos(std::min(1.0, std::abs(cosi)));
        best = t;
        hit = h;
    };

    const double a = d.x * d.x + d.y * d.y;
    if (a > 1e-15)
    {
        const double b = 2.0 * (ox * d.x + oy * d.y);
        const double cc = ox * ox + oy * oy - c.radius * c.radius;
        const double disc = b * b - 4.0 * a * cc;
        if (disc >= 0.0)
        {
            const double sq = std::sqrt(disc);
            // Numerically stable roots.
            const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
            double t1 = q / a, t2 = q != 0.0 ? cc / q : t1;
            if (t1 > t2)
                std::swap(t1, t2);
            for (double t : {t1, t2})
            {
                if (t <= ray_epsilon || t >= best)
                    continue;
                double z = o.z + d.z * t;
                if (z < zb || z > zt)
                    continue;
                Vec3 p = o + d * t;
                accept(t, 0, normalized(Vec3{p.x - c.center_base.x, p.y - c.center_base.y, 0.0}));
                break;
            }
        }
    }
    if (std::abs(d.z) > 1e-15)
    {
        for (int part : {1, 2})
        {
            double zc = part == 1 ? zt : zb;
            double t = (zc - o.z) / d.z;
            if (t <= ray_epsilon || t >= best)
                continue;
            double px = ox + d.x * t, py = oy + d.y * t;
            if (px * px + py * py <= c.radius * c.radius)
                accept(t, part, Vec3{0, 0, part == 1 ? 1.0 : -1.0});
        }
    }
}

} // namespace

std::optional<Hit> intersect_ray(const Scene &scene, const Vec3 &origin, const Vec3 &direction, double max_distance)
{
    std::optional<Hit> hit;
    double best = max_distance;
    // Admit hits exactly at max_distance.
    best = std::nextafter(best, std::numeric_limits<double>::infinity());

    const auto &surfaces = scene.surfaces();
    for (std::size_t i = 0; i < surfaces.size(); ++i)
    {
        const Surface &s = surfaces[i];
        const double denom = dot(s.normal, direction);
        if (std::abs(denom) < 1e-15)
            continue;
        const double t = (s.plane_offset - dot(s.normal, origin)) / denom;
        if (!(t > ray_epsilon) || !(t < best))
            continue;
        const Vec3 p = origin + direction * t;
        if (!s.box.contains(p, 1e-9) || !s.contains(p))
            continue;
        Hit h;
        h.kind = ElementKind::surface;
        h.index = static_cast<int>(i);
        h.point = p;
        h.distance = t;
        h.normal = denom < 0 ? s.normal : -s.normal;
        h.incidence_angle = std::acos(std::min(1.0, std::abs(denom)));
        best = t;
        hit = h;
    }

    const auto &cyls = scene.cylinders();
    for (std::size_t i = 0; i < cyls.size(); ++i)
        consider_cylinder(cyls[i], static_cast<int>(i), origin, direction, best, hit);
    return hit;
}

Scene place_entities(const Scene &scene, std::span<const Vec3> locations, const HumanCylinder &entity)
{
    std::vector<HumanCylinder> cyls = scene.cylinders();
    for (const auto &l : locations)
    {
        if (!l.finite() || !scene.bounds().contains(l, 1e-9))
            throw ArgumentError("entity location (" + format_double(l.x) + ", " + format_double(l.y) + ", " +
                                format_double(l.z) + ") is outside the scene bounds");
        HumanCylinder c = entity;
        c.center_base = l;
        cyls.push_back(c);
    }
    return scene.with_cylinders(std::move(cyls));
}

} // namespace wavescope
