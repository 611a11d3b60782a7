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

#ifndef WAVESCOPE_TESTS_SUPPORT_HPP
#define WAVESCOPE_TESTS_SUPPORT_HPP

#include <wavescope/propagation.hpp>
#include <wavescope/scene.hpp>

#include <complex>
#include <random>

namespace support
{

using namespace wavescope;

inline Transceiver node(std::string id, Vec3 p, Role role = Role::access_point, double f = 2.4e9)
{
    Transceiver t;
    t.id = std::move(id);
    t.position = p;
    t.role = role;
    t.frequency_hz = f;
    return t;
}

inline Scene empty_scene()
{
    return Scene(Aabb{{-50, -50, 0}, {50, 50, 10}}, 3.0, default_materials(), {}, {}, {});
}

// Large perfectly conducting floor at z = 0.
inline Scene pec_floor_scene()
{
    auto mats = default_materials();
    int metal = -1;
    for (std::size_t i = 0; i < mats.size(); ++i)
        if (mats[i].name == "metal")
            metal = static_cast<int>(i);
    std::vector<Surface> s{horizontal_rect("floor", -100, -100, 100, 100, 0.0, metal)};
    return Scene(Aabb{{-100, -100, 0}, {100, 100, 10}}, 3.0, mats, std::move(s), {}, {});
}

inline int material_id(const std::vector<Material> &mats, std::string_view name)
{
    for (std::size_t i = 0; i < mats.size(); ++i)
        if (mats[i].name == name)
            return static_cast<int>(i);
    return -1;
}

// Independent Friis oracle.
inline double friis_dbm(double d, double f, double pt_mw = 2.0, double gains_db = 6.0)
{
    const double c = 299792458.0;
    return 10.0 * std::log10(pt_mw) + gains_db - 20.0 * std::log10(4.0 * std::acos(-1.0) * d * f / c);
}

// Image-method oracle over a PEC plane z = 0 for vertically polarized antennas.
inline double two_ray_pec_dbm(Vec3 a, Vec3 b, double f)
{
    const double c = 299792458.0, k = 2.0 * std::acos(-1.0) * f / c;
    const std::complex<double> j{0, 1};
    auto vpol = [](Vec3 d) {
        Vec3 v = Vec3{0, 0, 1} - d * d.z;
        return v / norm(v);
    };
    const Vec3 d_los = normalized(b - a);
    const double l1 = distance(a, b);
    const std::complex<double> direct = dot(vpol(d_los), vpol(d_los)) * std::exp(-j * (k * l1)) / l1;

    const Vec3 image{a.x, a.y, -a.z};
    const double l2 = distance(image, b);
    const double t = a.z / (a.z + b.z);
    const Vec3 p = a + (Vec3{b.x, b.y, -b.z} - a) * t;
    const Vec3 d_in = normalized(p - a), d_out = normalized(b - p);
    const Vec3 e_in = vpol(d_in);
    // Perfect conductor: tangential field flips, normal field kept.
    const Vec3 e_out = e_in * -1.0 + Vec3{0, 0, 2.0 * e_in.z};
    const std::complex<double> bounce = dot(e_out, vpol(d_out)) * std::exp(-j * (k * l2)) / l2;

    const double lambda = c / f;
    const double scale = 2.0 * std::pow(10.0, 0.6) * std::pow(lambda / (4.0 * std::acos(-1.0)), 2);
    return 10.0 * std::log10(scale * std::norm(direct + bounce));
}

} // namespace support

#endif
