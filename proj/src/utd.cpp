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
#include <wavescope/propagation.hpp>

#include <algorithm>

namespace wavescope
{

namespace
{

constexpr cplx j{0.0, 1.0};

// erfc(z) for z on the ray arg(z) = pi/4.
cplx erfc_diagonal(cplx z)
{
    const double sqrt_pi = std::sqrt(pi);
    if (std::abs(z) < 2.5)
    {
        // erf Maclaurin series
        cplx sum = z, term = z;
        const cplx z2 = z * z;
        for (int k = 1; k < 200; ++k)
        {
            term *= -z2 / static_cast<double>(k);
            cplx add = term / static_cast<double>(2 * k + 1);
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum))
                break;
        }
        return 1.0 - 2.0 / sqrt_pi * sum;
    }
    // Laplace continued fraction z + (1/2)/(z + 1/(z + (3/2)/(z + ...))), modified Lentz.
    const double tiny = 1e-300;
    cplx f = z, c = z, d = 0.0;
    for (int k = 1; k < 2000; ++k)
    {
        const double a = 0.5 * k;
        d = z + a * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = z + a / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const cplx delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            break;
    }
    return std::exp(-z * z) / (sqrt_pi * f);
}

// cot((pi + sign * beta) / 2n) F(k L a(beta)) with the small-argument limit near
// shadow/reflection boundaries.
cplx cot_transition(int sign, double beta, double n, double kl)
{
    const double big_n = std::round((beta + sign * pi) / (2.0 * pi * n));
    // Boundary offset: vanishes where the cotangent is singular.
    const double eps = pi + sign * (beta - 2.0 * pi * n * big_n);
    if (std::abs(eps) < 1e-7)
    {
        const double sgn = eps >= 0 ? 1.0 : -1.0;
        const cplx e4 = std::exp(j * (pi / 4));
        return n * (std::sqrt(2.0 * pi * kl) * sgn - 2.0 * kl * eps * e4) * e4;
    }
    const double a = 2.0 * std::pow(std::cos((2.0 * pi * n * big_n - beta) / 2.0), 2);
    const double angle = (pi + sign * beta) / (2.0 * n);
    return std::cos(angle) / std::sin(angle) * utd_transition(kl * a);
}

// phi measured from face tangent toward face normal, in [0, 2 pi).
double wedge_angle(const Vec3 &v, const Wedge &w)
{
    const Vec3 p = v - w.edge_direction * dot(v, w.edge_direction);
    double a = std::atan2(dot(p, w.face_normal), dot(p, w.face_tangent));
    if (a < 0)
        a += 2.0 * pi;
    return a;
}

FaceResponse face_response(const Material &m, double cos_incidence, double frequency_hz)
{
    const double theta = std::acos(std::clamp(std::abs(cos_incidence), 0.0, 1.0));
    const FresnelCoefficients c = slab_coefficients(theta, m, frequency_hz);
    FaceResponse r;
    r.r_soft = c.r_perpendicular;
    r.r_hard = -c.r_parallel;
    r.t_soft = c.t_perpendicular;
    r.t_hard = c.t_parallel;
    return r;
}

} // namespace

cplx utd_transition(double x)
{
    if (!(x >= 0.0))
        throw ArgumentError("UTD transition function needs X >= 0");
    if (x == 0.0)
        return 0.0;
    const double sx = std::sqrt(x);
    const cplx e4 = std::exp(j * (pi / 4));
    const cplx tail = std::sqrt(pi) / 2.0 * std::conj(e4) * erfc_diagonal(sx * e4);  // int_sqrt(x)^inf e^{-j t^2}
    return 2.0 * j * sx * std::exp(j * x) * tail;
}

UtdCoefficients utd_coefficients(double phi, double phi_prime, double beta0, double n, double distance_param,
                                 double wavenumber, const FaceResponse &face0, const FaceResponse &face_n)
{
    const double sb = std::sin(beta0);
    if (std::abs(sb) < 1e-12)
        return {0.0, 0.0};
    const double kl = wavenumber * distance_param;
    const cplx pref = -std::exp(-j * (pi / 4)) / (2.0 * n * std::sqrt(2.0 * pi * wavenumber) * sb);

    const double bm = phi - phi_prime, bp = phi + phi_prime;
    const cplx t1 = cot_transition(+1, bm, n, kl);
    const cplx t2 = cot_transition(-1, bm, n, kl);
    const cplx t3 = cot_transition(+1, bp, n, kl);
    const cplx t4 = cot_transition(-1, bp, n, kl);

    UtdCoefficients d;
    d.soft = pref * ((1.0 - face0.t_soft) * (t1 + t2) + face_n.r_soft * t3 + face0.r_soft * t4);
    d.hard = pref * ((1.0 - face0.t_hard) * (t1 + t2) + face_n.r_hard * t3 + face0.r_hard * t4);
    return d;
}

DiffractedField utd_diffraction(const Wedge &wedge, const RayTube &incident, const Vec3 &observation_dir, double s,
                                double frequency_hz)
{
    if (!(s > 0.0))
        throw ArgumentError("diffraction observation distance must be positive");
    if (!(frequency_hz > 0.0))
        throw ArgumentError("frequency must be positive");

    DiffractedField out{};
    const Vec3 &e = wedge.edge_direction;
    const Vec3 &si = incident.direction;
    const double n = wedge.n;

    const double phi_p = wedge_angle(-si, wedge);
    const double phi = wedge_angle(observation_dir, wedge);
    const double exterior = n * pi + 1e-12;
    if (phi > exterior || phi_p > exterior)
        return out;

    const Vec3 ei_cross = cross(e, si), es_cross = cross(e, observation_dir);
    if (norm(ei_cross) < 1e-12 || norm(es_cross) < 1e-12)
        return out;  // grazing along the edge

    const double beta0 = std::acos(std::clamp(dot(si, e), -1.0, 1.0));
    const double sp = incident.unfolded_length;
    const bool plane_wave = !std::isfinite(sp);
    const double sin2 = std::sin(beta0) * std::sin(beta0);
    const double dist_param = plane_wave ? s * sin2 : s * sp * sin2 / (s + sp);
    const double k = 2.0 * pi / wavelength(frequency_hz);

    FaceResponse f0, fn;
    if (!wedge.material.is_perfect_conductor)
    {
        // Face n tangent/normal obtained by rotating face 0 by n*pi about the edge.
        const Vec3 tn = wedge.face_tangent * std::cos(n * pi) + wedge.face_normal * std::sin(n * pi);
        const Vec3 nn = cross(e, tn);
        // Each face is evaluated at the mean of the incident and observation angles. This
        // equals the specular angle on the reflection boundary and keeps the coefficient
        // symmetric under source/observer exchange.
        auto mean_cos = [&](const Vec3 &normal) {
            return 0.5 * (std::abs(dot(si, normal)) + std::abs(dot(observation_dir, normal)));
        };
        f0 = face_response(wedge.material, mean_cos(wedge.face_normal), frequency_hz);
        fn = face_response(wedge.material, mean_cos(nn), frequency_hz);
        if (std::abs(n - 2.0) > 1e-9)
        {
            // Solid wedge: nothing is transmitted across the shadow boundary.
            f0.t_soft = f0.t_hard = 0.0;
        }
    }

    const UtdCoefficients d = utd_coefficients(phi, phi_p, beta0, n, dist_param, k, f0, fn);

    const Vec3 phi_hat_i = -ei_cross / norm(ei_cross);
    const Vec3 beta_hat_i = cross(phi_hat_i, si);
    const Vec3 phi_hat = es_cross / norm(es_cross);
    const Vec3 beta_hat = cross(phi_hat, observation_dir);

    const double spread = plane_wave ? 1.0 / std::sqrt(s) : std::sqrt(sp / (s * (s + sp)));
    const cplx propagate = spread * std::exp(-j * (k * s));

    out.soft = -d.soft * incident.field.along(beta_hat_i) * propagate;
    out.hard = -d.hard * incident.field.along(phi_hat_i) * propagate;
    out.field = CVec3::from(beta_hat, out.soft) + CVec3::from(phi_hat, out.hard);
    return out;
}

} // namespace wavescope
