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

#ifndef WAVESCOPE_PROPAGATION_HPP
#define WAVESCOPE_PROPAGATION_HPP

#include <wavescope/scene.hpp>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace wavescope
{

struct PropagationConfig
{
    int max_depth = 4;               // interactions per path (reflection, transmission, diffraction)
    double min_power_dbm = -100.0;   // tubes/paths weaker than this are dropped
    int tessellation_order = 4;      // icosahedron subdivision level (2562 launch directions)
    int max_diffraction_order = 1;   // 0 disables edge diffraction
    double noise_floor_dbm = -100.0; // RSS clamp
    bool quantize_rss = false;       // round reported RSS to integer dBm
    // Also launch tubes from every receiver and merge the path candidates, so that the
    // candidate set (and the RSS) does not depend on which end transmits.
    bool bidirectional = true;

    // Throws ArgumentError on out-of-range values.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Ray launcher

struct LaunchSet
{
    std::vector<Vec3> directions;
    double angular_spacing = 0.0;  // max angle between mesh-adjacent directions (rad)
};

// Vertices of an icosahedron subdivided `order` times (10 * 4^order + 2 directions).
// Orders above 8 are rejected.
LaunchSet launch_directions(int order);

// ---------------------------------------------------------------------------
// Interface coefficients

// Parallel coefficients use the sign convention in which both polarizations agree at
// normal incidence (R_par = R_perp = (1 - n) / (1 + n)); a perfect conductor gives -1.
struct FresnelCoefficients
{
    cplx r_parallel, r_perpendicular, t_parallel, t_perpendicular;
};

// Single air/material interface (half-space).
FresnelCoefficients fresnel_coefficients(double incidence_angle, const Material &material, double frequency_hz);

// Thin slab of `material.thickness` with internal multiple reflections. Transmission is
// an insertion coefficient: the free-space phase across the slab is excluded.
FresnelCoefficients slab_coefficients(double incidence_angle, const Material &material, double frequency_hz);

// ---------------------------------------------------------------------------
// Uniform theory of diffraction

// Kouyoumjian-Pathak transition function F(X).
cplx utd_transition(double x);

// Reflection/transmission of one wedge face, expressed for the soft (E along the edge
// plane) and hard components. Perfect conductor: r_soft = -1, r_hard = +1, t = 0.
struct FaceResponse
{
    cplx r_soft{-1.0}, r_hard{1.0}, t_soft{0.0}, t_hard{0.0};
};

struct UtdCoefficients
{
    cplx soft, hard;
};

// Wedge diffraction coefficients. Angles are measured from face 0 into the exterior
// region [0, n pi]; beta0 is the angle between incident ray and edge; distance_param is
// the UTD L parameter. Lossy faces follow Luebbers' heuristic: reflection terms scaled by
// the face reflection coefficients, incident-shadow terms by (1 - T).
UtdCoefficients utd_coefficients(double phi, double phi_prime, double beta0, double n, double distance_param,
                                 double wavenumber, const FaceResponse &face0, const FaceResponse &face_n);

struct Wedge
{
    Vec3 edge_point{};      // diffraction point
    Vec3 edge_direction{};  // unit; equals face_tangent x face_normal
    Vec3 face_tangent{};    // face 0, pointing away from the edge into the material
    Vec3 face_normal{};     // face 0 normal; phi grows from face_tangent toward it
    double n = 2.0;         // exterior angle / pi (2 = half-plane)
    Material material = Material::perfect_conductor();
};

struct RayTube
{
    Vec3 origin{};
    Vec3 direction{};  // unit
    CVec3 field{};     // complex field at the current end of the tube (V/m, 1 m reference)
    int depth = 0;
    double unfolded_length = 0.0;
    double angular_spacing = 0.0;
};

struct DiffractedField
{
    cplx soft, hard;  // components along beta0_hat and phi_hat at the observer
    CVec3 field;      // full vector, including spreading and propagation phase along s
};

// Diffracts `incident` (field given at the edge point, arriving along incident.direction
// after travelling incident.unfolded_length) toward `observation_dir` over distance s.
// Zero field when the observation direction lies inside the wedge material.
DiffractedField utd_diffraction(const Wedge &wedge, const RayTube &incident, const Vec3 &observation_dir,
                                double s, double frequency_hz);

// ---------------------------------------------------------------------------
// Tracing and reception

enum class InteractionKind
{
    reflection,
    transmission,
    diffraction
};

struct PathVertex
{
    InteractionKind kind = InteractionKind::reflection;
    ElementKind element = ElementKind::surface;
    int index = -1;
    int part = 0;
    Vec3 point{};
    double field_magnitude = 0.0;  // |E| just after the interaction (1 m reference amplitude)
};

struct ReceivedRay
{
    std::string receiver_id;
    cplx field_co, field_cross;  // co-/cross-polarized amplitude at the receiver, propagation phase included
    double unfolded_length = 0.0;
    int depth = 0;
    std::vector<PathVertex> interactions;
    std::string path_key;          // canonical identity of the path (reflection/diffraction sequence)
    int launch_index = -1;         // capturing tube (-1 for deterministic LOS/diffraction paths)
    double capture_distance = 0.0; // receiver offset from the capturing tube axis
    double sphere_radius = 0.0;    // angular_spacing * unfolded length / sqrt(3)
};

using TraceResult = std::map<std::string, std::vector<ReceivedRay>>;

// Traces `tx` against every receiver. Receivers are matched by id in the result map.
TraceResult trace(const Scene &scene, const Transceiver &tx, std::span<const Transceiver> receivers,
                  const PropagationConfig &config);

// Coherent sum of received rays in dBm, clamped at config.noise_floor_dbm.
double receive(std::span<const ReceivedRay> rays, const Transceiver &rx, const Transceiver &tx,
               const PropagationConfig &config = {});

double predict_rss(const Scene &scene, const Transceiver &tx, const Transceiver &rx,
                   const PropagationConfig &config);

// One RSS value per receiver, same order as `receivers`.
std::vector<double> predict_rss_many(const Scene &scene, const Transceiver &tx,
                                     std::span<const Transceiver> receivers, const PropagationConfig &config);

// Friis free-space RSS. Throws ArgumentError when tx and rx coincide.
double free_space_rss(const Transceiver &tx, const Transceiver &rx);

// One line per received ray: receiver, depth, length, |E|, phase, interaction points.
std::string dump_paths(const TraceResult &result);

double wavelength(double frequency_hz);
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

} // namespace wavescope

#endif
