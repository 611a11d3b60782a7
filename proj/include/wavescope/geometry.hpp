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

#ifndef WAVESCOPE_GEOMETRY_HPP
#define WAVESCOPE_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace wavescope
{

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m

// Position or direction in meters; right-handed, z up, floor at z = 0.
struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3 &) const = default;

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3 &v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3 &a, const Vec3 &b) { return norm(a - b); }
inline Vec3 normalized(const Vec3 &v) { return v / norm(v); }

// Any unit vector perpendicular to v (v must be unit-length).
inline Vec3 any_perpendicular(const Vec3 &v)
{
    Vec3 helper = std::abs(v.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    return normalized(cross(v, helper));
}

// Complex field vector (V/m per Cartesian axis).
struct CVec3
{
    cplx x{}, y{}, z{};

    CVec3 operator+(const CVec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    CVec3 operator*(cplx s) const { return {x * s, y * s, z * s}; }
    CVec3 &operator+=(const CVec3 &o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }

    static CVec3 from(const Vec3 &v, cplx amplitude = 1.0)
    {
        return {v.x * amplitude, v.y * amplitude, v.z * amplitude};
    }

    // Projection onto a real unit vector.
    cplx along(const Vec3 &u) const { return x * u.x + y * u.y + z * u.z; }

    double power() const { return std::norm(x) + std::norm(y) + std::norm(z); }

    bool finite() const
    {
        return std::isfinite(x.real()) && std::isfinite(x.imag()) && std::isfinite(y.real()) &&
               std::isfinite(y.imag()) && std::isfinite(z.real()) && std::isfinite(z.imag());
    }
};

// Polarization vector of a vertically polarized isotropic antenna seen along `dir`.
inline Vec3 vertical_polarization(const Vec3 &dir)
{
    Vec3 v = Vec3{0, 0, 1} - dir * dir.z;
    double n = norm(v);
    if (n < 1e-12)
        return any_perpendicular(dir);
    return v / n;
}

struct Aabb
{
    Vec3 lo{}, hi{};

    bool contains(const Vec3 &p, double tol = 1e-9) const
    {
        return p.x >= lo.x - tol && p.y >= lo.y - tol && p.z >= lo.z - tol && p.x <= hi.x + tol &&
               p.y <= hi.y + tol && p.z <= hi.z + tol;
    }

    // Slab test; returns false when the ray misses or the entry lies beyond tmax.
    bool hit_by(const Vec3 &origin, const Vec3 &inv_dir, double tmax) const
    {
        double t0 = 0.0, t1 = tmax;
        for (int a = 0; a < 3; ++a)
        {
            double tn = (lo[a] - origin[a]) * inv_dir[a];
            double tf = (hi[a] - origin[a]) * inv_dir[a];
            if (tn > tf)
                std::swap(tn, tf);
            if (std::isnan(tn) || std::isnan(tf))
            {
                // Ray parallel to the slab with origin on a face.
                if (origin[a] < lo[a] || origin[a] > hi[a])
                    return false;
                continue;
            }
            t0 = tn > t0 ? tn : t0;
            t1 = tf < t1 ? tf : t1;
            if (t0 > t1 * (1 + 1e-12) + 1e-12)
                return false;
        }
        return true;
    }
};

} // namespace wavescope

#endif
