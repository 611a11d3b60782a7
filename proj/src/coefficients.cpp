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

namespace wavescope
{

namespace
{

constexpr double grazing_limit = pi / 2 - 1e-9;

void check_inputs(double incidence_angle, double frequency_hz)
{
    if (!(incidence_angle >= 0.0) || incidence_angle > pi / 2)
        throw ArgumentError("incidence angle must lie in [0, pi/2]");
    if (!(frequency_hz > 0.0))
        throw ArgumentError("frequency must be positive");
}

FresnelCoefficients conductor_or_grazing() { return {-1.0, -1.0, 0.0, 0.0}; }

} // namespace

double wavelength(double frequency_hz) { return speed_of_light / frequency_hz; }

FresnelCoefficients fresnel_coefficients(double incidence_angle, const Material &material, double frequency_hz)
{
    check_inputs(incidence_angle, frequency_hz);
    if (material.is_perfect_conductor || incidence_angle >= grazing_limit)
        return conductor_or_grazing();

    const cplx eps = material.complex_permittivity(frequency_hz);
    const double c = std::cos(incidence_angle), s = std::sin(incidence_angle);
    const cplx root = std::sqrt(eps - s * s);

    FresnelCoefficients out;
    out.r_perpendicular = (c - root) / (c + root);
    out.r_parallel = (root - eps * c) / (root + eps * c);
    out.t_perpendicular = 2.0 * c / (c + root);
    out.t_parallel = 2.0 * std::sqrt(eps) * c / (eps * c + root);
    return out;
}

FresnelCoefficients slab_coefficients(double incidence_angle, const Material &material, double frequency_hz)
{
    check_inputs(incidence_angle, frequency_hz);
    if (material.is_perfect_conductor || incidence_angle >= grazing_limit)
        return conductor_or_grazing();

    const FresnelCoefficients face = fresnel_coefficients(incidence_angle, material, frequency_hz);
    const cplx eps = material.complex_permittivity(frequency_hz);
    const double c = std::cos(incidence_angle), s = std::sin(incidence_angle);
    const double k0 = 2.0 * pi / wavelength(frequency_hz);
    const cplx q = k0 * material.thickness * std::sqrt(eps - s * s);
    const cplx j{0.0, 1.0};
    const cplx e1 = std::exp(-j * q), e2 = e1 * e1;
    const cplx insertion = std::exp(j * (k0 * material.thickness * c));

    auto pair = [&](cplx r) {
        cplx denom = 1.0 - r * r * e2;
        return std::pair{r * (1.0 - e2) / denom, (1.0 - r * r) * e1 / denom * insertion};
    };
    auto [rpar, tpar] = pair(face.r_parallel);
    auto [rper, tper] = pair(face.r_perpendicular);
    return {rpar, rper, tpar, tper};
}

} // namespace wavescope
