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

#include <wavescope/digest.hpp>
#include <wavescope/errors.hpp>
#include <wavescope/propagation.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

namespace wavescope
{

void PropagationConfig::validate() const
{
    if (max_depth < 0 || max_depth > 16)
        throw ArgumentError("max_depth must lie in [0, 16]");
    if (!(min_power_dbm < 0.0) || !std::isfinite(min_power_dbm))
        throw ArgumentError("min_power_dbm must be negative");
    if (tessellation_order < 0 || tessellation_order > 8)
        throw ArgumentError("tessellation_order must lie in [0, 8]");
    if (max_diffraction_order < 0 || max_diffraction_order > 1)
        throw ArgumentError("max_diffraction_order must be 0 or 1");
    if (!std::isfinite(noise_floor_dbm))
        throw ArgumentError("noise_floor_dbm must be finite");
}

namespace
{

constexpr cplx j{0.0, 1.0};

struct Ref
{
    ElementKind kind = ElementKind::surface;
    int index = -1;
    int part = 0;

    auto operator<=>(const Ref &) const = default;
};

using Signature = std::vector<Ref>;

struct Candidate
{
    std::vector<Vec3> seeds;  // reflection points found by the tube
    std::vector<Vec3> reverse_seeds;  // same sequence found from the receiver side
    double capture_distance = 0.0;
    double sphere_radius = 0.0;
    int launch = -1;
};

using CandidateMap = std::map<Signature, Candidate>;

// Received power scale: P_t G_t G_r (lambda / 4 pi)^2 in mW.
double power_scale(const Transceiver &tx, const Transceiver &rx)
{
    const double lambda = wavelength(tx.frequency_hz);
    const double g = std::pow(10.0, (tx.antenna_gain_dbi + rx.antenna_gain_dbi) / 10.0);
    const double f = lambda / (4.0 * pi);
    return tx.transmit_power_mw * g * f * f;
}

const Material &material_of(const Scene &scene, const Ref &r)
{
    if (r.kind == ElementKind::cylinder)
        return scene.cylinders()[r.index].material;
    return scene.material_of(scene.surfaces()[r.index]);
}

bool is_planar(const Ref &r) { return r.kind == ElementKind::surface || r.part != 0; }

void plane_of(const Scene &scene, const Ref &r, Vec3 &n, double &d)
{
    if (r.kind == ElementKind::surface)
    {
        n = scene.surfaces()[r.index].normal;
        d = scene.surfaces()[r.index].plane_offset;
        return;
    }
    const HumanCylinder &c = scene.cylinders()[r.index];
    n = {0, 0, 1};
    d = r.part == 1 ? c.center_base.z + c.height : c.center_base.z;
}

Vec3 normal_at(const Scene &scene, const Ref &r, const Vec3 &p)
{
    if (is_planar(r))
    {
        Vec3 n;
        double d;
        plane_of(scene, r, n, d);
        return n;
    }
    const HumanCylinder &c = scene.cylinders()[r.index];
    return normalized(Vec3{p.x - c.center_base.x, p.y - c.center_base.y, 0.0});
}

bool on_element(const Scene &scene, const Ref &r, const Vec3 &p)
{
    constexpr double tol = 1e-9;
    if (r.kind == ElementKind::surface)
    {
        const Surface &s = scene.surfaces()[r.index];
        return s.box.contains(p, 1e-9) && s.contains(p, tol);
    }
    const HumanCylinder &c = scene.cylinders()[r.index];
    const double dx = p.x - c.center_base.x, dy = p.y - c.center_base.y;
    if (r.part == 0)
        return p.z >= c.center_base.z - tol && p.z <= c.center_base.z + c.height + tol;
    return dx * dx + dy * dy <= (c.radius + tol) * (c.radius + tol);
}

Vec3 mirror(const Vec3 &p, const Vec3 &n, double d) { return p - n * (2.0 * (dot(n, p) - d)); }

// Applies one reflection or transmission to `e` travelling along unit `k` and hitting a
// face with unit normal `n`; returns the outgoing direction through `k_out`.
CVec3 interact(const CVec3 &e, const Vec3 &k, const Vec3 &n, const FresnelCoefficients &c, bool reflect,
               Vec3 &k_out)
{
    const Vec3 raw = cross(k, n);
    const double len = norm(raw);
    const Vec3 e_perp = len > 1e-12 ? raw / len : any_perpendicular(k);
    const Vec3 e_par_i = cross(e_perp, k);
    const cplx a_perp = e.along(e_perp), a_par = e.along(e_par_i);
    if (reflect)
    {
        k_out = normalized(k - n * (2.0 * dot(k, n)));
        const Vec3 e_par_r = cross(k_out, e_perp);
        return CVec3::from(e_perp, c.r_perpendicular * a_perp) + CVec3::from(e_par_r, c.r_parallel * a_par);
    }
    k_out = k;
    return CVec3::from(e_perp, c.t_perpendicular * a_perp) + CVec3::from(e_par_i, c.t_parallel * a_par);
}

FresnelCoefficients coefficients_at(const Scene &scene, const Ref &r, const Vec3 &k, const Vec3 &n,
                                    double frequency_hz)
{
    const double theta = std::acos(std::clamp(std::abs(dot(k, n)), 0.0, 1.0));
    return slab_coefficients(theta, material_of(scene, r), frequency_hz);
}

// ---------------------------------------------------------------------------
// Tube launching

struct Tube
{
    Vec3 origin, dir;
    CVec3 field;
    int depth = 0;
    double length = 0.0;
    Signature signature;
    std::vector<Vec3> seeds;
};

struct Target
{
    Vec3 position;
    CandidateMap *candidates;
};

void capture(const Tube &t, double seg_len, double spacing, std::span<Target> targets, int launch)
{
    for (auto &tg : targets)
    {
        const Vec3 v = tg.position - t.origin;
        const double along = dot(v, t.dir);
        if (!(along > 0.0) || along > seg_len)
            continue;
        const double d2 = std::max(0.0, dot(v, v) - along * along);
        const double total = t.length + along;
        const double radius = spacing * total / std::sqrt(3.0);
        if (d2 > radius * radius)
            continue;
        const double dist = std::sqrt(d2);
        auto [it, inserted] = tg.candidates->try_emplace(t.signature);
        if (inserted || dist < it->second.capture_distance)
            it->second = Candidate{t.seeds, {}, dist, radius, launch};
    }
}

void launch_tubes(const Scene &scene, const Vec3 &source, const Transceiver &emitter, const Transceiver &sink,
                  std::span<Target> targets, const PropagationConfig &config)
{
    const LaunchSet launch = launch_directions(config.tessellation_order);
    const double scale = power_scale(emitter, sink);
    const double min_mw = dbm_to_mw(config.min_power_dbm);
    const double f = emitter.frequency_hz;

    std::vector<Tube> stack;
    for (std::size_t li = 0; li < launch.directions.size(); ++li)
    {
        const Vec3 &d0 = launch.directions[li];
        stack.push_back(Tube{source, d0, CVec3::from(vertical_polarization(d0)), 0, 0.0, {}, {}});
        while (!stack.empty())
        {
            Tube t = std::move(stack.back());
            stack.pop_back();
            const auto hit = intersect_ray(scene, t.origin, t.dir, std::numeric_limits<double>::infinity());
            const double seg = hit ? hit->distance : std::numeric_limits<double>::infinity();
            capture(t, seg, launch.angular_spacing, targets, static_cast<int>(li));
            if (!hit || t.depth >= config.max_depth)
                continue;

            const Ref ref{hit->kind, hit->index, hit->part};
            const double len = t.length + hit->distance;
            const FresnelCoefficients c = coefficients_at(scene, ref, t.dir, hit->normal, f);
            for (bool reflect : {false, true})
            {
                Vec3 k_out;
                CVec3 e = interact(t.field, t.dir, hit->normal, c, reflect, k_out);
                if (scale * e.power() / (len * len) < min_mw)
                    continue;
                Tube child{hit->point, k_out, e, t.depth + 1, len, t.signature, t.seeds};
                if (reflect)
                {
                    child.signature.push_back(ref);
                    child.seeds.push_back(hit->point);
                }
                stack.push_back(std::move(child));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Exact path construction

// Specular point on a vertical cylinder side between p and q, or nullopt when no
// mutually visible arc exists.
std::optional<Vec3> cylinder_specular(const HumanCylinder &c, const Vec3 &p, const Vec3 &q)
{
    const double cx = c.center_base.x, cy = c.center_base.y, r = c.radius;
    auto arc = [&](const Vec3 &v, double &center, double &half) {
        const double dx = v.x - cx, dy = v.y - cy, rho = std::hypot(dx, dy);
        if (!(rho > r))
            return false;
        center = std::atan2(dy, dx);
        half = std::acos(r / rho);
        return true;
    };
    double ap, wp, aq, wq;
    if (!arc(p, ap, wp) || !arc(q, aq, wq))
        return std::nullopt;
    double delta = std::remainder(aq - ap, 2.0 * pi);
    double lo = std::max(-wp, delta - wq), hi = std::min(wp, delta + wq);
    if (!(lo < hi))
        return std::nullopt;

    auto at = [&](double a) { return Vec3{cx + r * std::cos(ap + a), cy + r * std::sin(ap + a), 0.0}; };
    // Derivative of the horizontal path length along the arc; zero at the specular point.
    auto slope = [&](double a) {
        const Vec3 s = at(a);
        const double tx = -std::sin(ap + a), ty = std::cos(ap + a);
        const double dp = std::hypot(s.x - p.x, s.y - p.y), dq = std::hypot(s.x - q.x, s.y - q.y);
        return tx * ((s.x - p.x) / dp + (s.x - q.x) / dq) + ty * ((s.y - p.y) / dp + (s.y - q.y) / dq);
    };
    double a = lo, b = hi;
    if (!(slope(a) < 0.0 && slope(b) > 0.0))
        return std::nullopt;
    for (int it = 0; it < 200 && b - a > 1e-16; ++it)
    {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b)
            break;
        (slope(m) < 0.0 ? a : b) = m;
    }
    Vec3 s = at(0.5 * (a + b));
    const double dp = std::hypot(p.x - s.x, p.y - s.y), dq = std::hypot(q.x - s.x, q.y - s.y);
    s.z = p.z + (q.z - p.z) * dp / (dp + dq);
    return s;
}

std::optional<Vec3> planar_specular(const Scene &scene, const Ref &r, const Vec3 &p, const Vec3 &q)
{
    Vec3 n;
    double d;
    plane_of(scene, r, n, d);
    const double sp = dot(n, p) - d, sq = dot(n, q) - d;
    if (sp * sq <= 0.0)
        return std::nullopt;
    const Vec3 qm = mirror(q, n, d);
    const Vec3 dir = qm - p;
    const double t = -sp / dot(n, dir);
    return p + dir * t;
}

std::optional<std::vector<Vec3>> solve_points(const Scene &scene, const Vec3 &a, const Vec3 &b,
                                              const Signature &sig, const std::vector<Vec3> &seeds)
{
    const std::size_t m = sig.size();
    std::vector<Vec3> pts(m);
    if (std::all_of(sig.begin(), sig.end(), is_planar))
    {
        std::vector<Vec3> images{a};
        std::vector<Vec3> normals(m);
        std::vector<double> offsets(m);
        for (std::size_t k = 0; k < m; ++k)
        {
            plane_of(scene, sig[k], normals[k], offsets[k]);
            images.push_back(mirror(images.back(), normals[k], offsets[k]));
        }
        Vec3 target = b;
        for (std::size_t k = m; k-- > 0;)
        {
            const Vec3 dir = target - images[k + 1];
            const double denom = dot(normals[k], dir);
            if (std::abs(denom) < 1e-15)
                return std::nullopt;
            const double t = (offsets[k] - dot(normals[k], images[k + 1])) / denom;
            if (!(t > 1e-12 && t < 1.0 - 1e-12))
                return std::nullopt;
            pts[k] = images[k + 1] + dir * t;
            target = pts[k];
        }
    }
    else
    {
        pts = seeds;
        double move = 0.0;
        for (int it = 0; it < 500; ++it)
        {
            move = 0.0;
            for (std::size_t k = 0; k < m; ++k)
            {
                const Vec3 &prev = k == 0 ? a : pts[k - 1];
                const Vec3 &next = k + 1 == m ? b : pts[k + 1];
                const auto s = is_planar(sig[k]) ? planar_specular(scene, sig[k], prev, next)
                                                 : cylinder_specular(scene.cylinders()[sig[k].index], prev, next);
                if (!s)
                    return std::nullopt;
                move = std::max(move, distance(*s, pts[k]));
                pts[k] = *s;
            }
            if (move < 1e-12)
                break;
        }
        if (move > 1e-9)
            return std::nullopt;
    }

    // Each point must lie on its element and see both neighbours from the same side.
    for (std::size_t k = 0; k < m; ++k)
    {
        if (!on_element(scene, sig[k], pts[k]))
            return std::nullopt;
        const Vec3 &prev = k == 0 ? a : pts[k - 1];
        const Vec3 &next = k + 1 == m ? b : pts[k + 1];
        const Vec3 n = normal_at(scene, sig[k], pts[k]);
        const double sp = dot(n, prev - pts[k]), sn = dot(n, next - pts[k]);
        if (sp * sn <= 0.0 || (!is_planar(sig[k]) && sp <= 0.0))
            return std::nullopt;
    }
    return pts;
}

struct Event
{
    InteractionKind kind;
    Ref ref;
    Vec3 point;
    Vec3 normal;  // unit, facing the incoming ray
};

// Transmissions strictly between a and b. False when a perfect conductor blocks.
bool crossings(const Scene &scene, const Vec3 &a, const Vec3 &b, std::vector<Event> &out, double margin)
{
    const Vec3 dir = normalized(b - a);
    Vec3 o = a;
    double remaining = distance(a, b) - margin;
    for (int guard = 0; guard < 10000; ++guard)
    {
        const auto hit = intersect_ray(scene, o, dir, remaining);
        if (!hit)
            return true;
        const Ref ref{hit->kind, hit->index, hit->part};
        if (material_of(scene, ref).is_perfect_conductor)
            return false;
        out.push_back({InteractionKind::transmission, ref, hit->point, hit->normal});
        o = hit->point;
        remaining -= hit->distance;
    }
    return false;
}

std::string ref_key(const Ref &r)
{
    switch (r.kind)
    {
    case ElementKind::surface: return "s" + std::to_string(r.index);
    case ElementKind::cylinder: return "c" + std::to_string(r.index) + "." + std::to_string(r.part);
    case ElementKind::edge: return "e" + std::to_string(r.index);
    }
    return {};
}

std::string path_key(const Signature &sig)
{
    if (sig.empty())
        return "los";
    std::string k = "r";
    for (const auto &r : sig)
        k += ":" + ref_key(r);
    return k;
}

PathVertex vertex(const Event &ev, double magnitude)
{
    PathVertex v;
    v.kind = ev.kind;
    v.element = ev.ref.kind;
    v.index = ev.ref.index;
    v.part = ev.ref.part;
    v.point = ev.point;
    v.field_magnitude = magnitude;
    return v;
}

// Position where a ray from `start` along `dir`, reflected through `sig` (infinite
// elements), meets the plane through `target` with normal `plane_n`.
std::optional<Vec3> propagate(const Scene &scene, const Signature &sig, Vec3 pos, Vec3 dir, const Vec3 &target,
                              const Vec3 &plane_n)
{
    for (const auto &r : sig)
    {
        double t;
        if (is_planar(r))
        {
            Vec3 n;
            double d;
            plane_of(scene, r, n, d);
            const double denom = dot(n, dir);
            if (std::abs(denom) < 1e-15)
                return std::nullopt;
            t = (d - dot(n, pos)) / denom;
        }
        else
        {
            const HumanCylinder &c = scene.cylinders()[r.index];
            const double ox = pos.x - c.center_base.x, oy = pos.y - c.center_base.y;
            const double qa = dir.x * dir.x + dir.y * dir.y, qb = 2.0 * (ox * dir.x + oy * dir.y);
            const double qc = ox * ox + oy * oy - c.radius * c.radius;
            const double disc = qb * qb - 4.0 * qa * qc;
            if (qa < 1e-15 || disc < 0.0)
                return std::nullopt;
            t = (-qb - std::sqrt(disc)) / (2.0 * qa);
        }
        if (!(t > 1e-9))
            return std::nullopt;
        pos = pos + dir * t;
        const Vec3 n = normal_at(scene, r, pos);
        dir = normalized(dir - n * (2.0 * dot(dir, n)));
    }
    const double denom = dot(plane_n, dir);
    if (std::abs(denom) < 1e-12)
        return std::nullopt;
    return pos + dir * (dot(plane_n, target - pos) / denom);
}

// Amplitude spreading of a point source through curved reflections: 1 / sqrt(ray-tube
// cross-section per steradian), from central differences of the launch direction.
double numeric_spreading(const Scene &scene, const Signature &sig, const Vec3 &a, const Vec3 &d0,
                         const Vec3 &b, const Vec3 &kf, double fallback)
{
    constexpr double h = 1e-6;
    const Vec3 u = any_perpendicular(d0), v = cross(d0, u);
    auto at = [&](const Vec3 &off) { return propagate(scene, sig, a, normalized(d0 + off), b, kf); };
    const auto up = at(u * h), um = at(u * -h), vp = at(v * h), vm = at(v * -h);
    if (!up || !um || !vp || !vm)
        return fallback;
    const Vec3 ju = (*up - *um) / (2.0 * h), jv = (*vp - *vm) / (2.0 * h);
    const double area = norm(cross(ju, jv));
    if (!(area > 0.0) || !std::isfinite(area))
        return fallback;
    return 1.0 / std::sqrt(area);
}

struct PathContext
{
    const Scene &scene;
    const Transceiver &tx;
    const Transceiver &rx;
    const PropagationConfig &config;
    double scale;
    double min_mw;
    double k0;
};

void finish(const PathContext &c, ReceivedRay &ray, const CVec3 &e, const Vec3 &kf, double spread, double length)
{
    const Vec3 pol = vertical_polarization(kf);
    const Vec3 xpol = normalized(cross(kf, pol));
    const cplx phase = std::exp(-j * (c.k0 * length));
    ray.field_co = e.along(pol) * spread * phase;
    ray.field_cross = e.along(xpol) * spread * phase;
    ray.unfolded_length = length;
}

std::optional<ReceivedRay> reflection_path(const PathContext &c, const Signature &sig, const Candidate &cand)
{
    const Vec3 &a = c.tx.position, &b = c.rx.position;
    auto pts = solve_points(c.scene, a, b, sig, cand.seeds);
    if (!pts && !cand.reverse_seeds.empty())
        pts = solve_points(c.scene, a, b, sig, cand.reverse_seeds);
    if (!pts)
        return std::nullopt;

    std::vector<Vec3> nodes{a};
    nodes.insert(nodes.end(), pts->begin(), pts->end());
    nodes.push_back(b);

    std::vector<Event> events;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    {
        if (distance(nodes[i], nodes[i + 1]) < 1e-9)
            return std::nullopt;
        if (!crossings(c.scene, nodes[i], nodes[i + 1], events, 1e-7))
            return std::nullopt;
        if (i < sig.size())
            events.push_back({InteractionKind::reflection, sig[i], nodes[i + 1], {}});
    }
    const int depth = static_cast<int>(events.size());
    if (depth > c.config.max_depth)
        return std::nullopt;

    ReceivedRay ray;
    ray.receiver_id = c.rx.id;
    ray.depth = depth;
    ray.path_key = path_key(sig);
    ray.launch_index = cand.launch;
    ray.capture_distance = cand.capture_distance;
    ray.sphere_radius = cand.sphere_radius;

    const Vec3 d0 = normalized(nodes[1] - nodes[0]);
    CVec3 e = CVec3::from(vertical_polarization(d0));
    Vec3 k = d0, last = a;
    double length = 0.0;
    std::size_t seg = 0;
    for (auto &ev : events)
    {
        length += distance(last, ev.point);
        last = ev.point;
        Vec3 n = normal_at(c.scene, ev.ref, ev.point);
        if (dot(n, k) > 0)
            n = -n;
        const FresnelCoefficients co = coefficients_at(c.scene, ev.ref, k, n, c.tx.frequency_hz);
        Vec3 k_out;
        e = interact(e, k, n, co, ev.kind == InteractionKind::reflection, k_out);
        if (ev.kind == InteractionKind::reflection)
        {
            ++seg;
            k = normalized(nodes[seg + 1] - nodes[seg]);
        }
        ray.interactions.push_back(vertex(ev, std::sqrt(e.power()) / length));
    }
    length += distance(last, b);
    const Vec3 kf = normalized(b - nodes[nodes.size() - 2]);

    const bool curved = std::any_of(sig.begin(), sig.end(), [](const Ref &r) { return !is_planar(r); });
    const double spread = curved ? numeric_spreading(c.scene, sig, a, d0, b, kf, 1.0 / length) : 1.0 / length;
    finish(c, ray, e, kf, spread, length);
    if (c.scale * (std::norm(ray.field_co) + std::norm(ray.field_cross)) < c.min_mw)
        return std::nullopt;
    return ray;
}

std::optional<ReceivedRay> diffraction_path(const PathContext &c, int edge_index)
{
    const DiffractionEdge &edge = c.scene.edges()[edge_index];
    const Vec3 &a = c.tx.position, &b = c.rx.position;
    const double at = dot(a - edge.start, edge.direction), bt = dot(b - edge.start, edge.direction);
    const double ar = norm(a - edge.start - edge.direction * at), br = norm(b - edge.start - edge.direction * bt);
    if (ar < 1e-6 || br < 1e-6)
        return std::nullopt;
    const double t = (at * br + bt * ar) / (ar + br);
    if (!(t > 1e-6 && t < edge.length - 1e-6))
        return std::nullopt;
    const Vec3 q = edge.start + edge.direction * t;

    std::vector<Event> leg1, leg2;
    if (!crossings(c.scene, a, q, leg1, 1e-6) || !crossings(c.scene, q, b, leg2, 1e-6))
        return std::nullopt;
    const int depth = 1 + static_cast<int>(leg1.size() + leg2.size());
    if (depth > c.config.max_depth)
        return std::nullopt;

    ReceivedRay ray;
    ray.receiver_id = c.rx.id;
    ray.depth = depth;
    ray.path_key = "d:" + ref_key({ElementKind::edge, edge_index, 0});

    const Vec3 d1 = normalized(q - a), d2 = normalized(b - q);
    CVec3 e = CVec3::from(vertical_polarization(d1));
    Vec3 last = a;
    double s1 = 0.0;
    for (auto &ev : leg1)
    {
        s1 += distance(last, ev.point);
        last = ev.point;
        const FresnelCoefficients co = coefficients_at(c.scene, ev.ref, d1, ev.normal, c.tx.frequency_hz);
        Vec3 k_out;
        e = interact(e, d1, ev.normal, co, false, k_out);
        ray.interactions.push_back(vertex(ev, std::sqrt(e.power()) / s1));
    }
    s1 += distance(last, q);
    last = q;

    RayTube incident;
    incident.origin = a;
    incident.direction = d1;
    incident.field = e * (std::exp(-j * (c.k0 * s1)) / s1);
    incident.unfolded_length = s1;
    Wedge w;
    w.edge_point = q;
    w.edge_direction = edge.direction;
    w.face_tangent = edge.face_tangent;
    w.face_normal = edge.face_normal;
    w.n = edge.wedge_n;
    w.material = c.scene.material_of(c.scene.surfaces()[edge.surface]);
    const double s2 = distance(q, b);
    const DiffractedField df = utd_diffraction(w, incident, d2, s2, c.tx.frequency_hz);
    e = df.field;
    PathVertex dv;
    dv.kind = InteractionKind::diffraction;
    dv.element = ElementKind::edge;
    dv.index = edge_index;
    dv.point = q;
    dv.field_magnitude = std::sqrt(incident.field.power());
    ray.interactions.push_back(dv);

    // Field already carries spreading and phase up to the receiver; transmissions on the
    // second leg only rescale it.
    for (auto &ev : leg2)
    {
        const FresnelCoefficients co = coefficients_at(c.scene, ev.ref, d2, ev.normal, c.tx.frequency_hz);
        Vec3 k_out;
        e = interact(e, d2, ev.normal, co, false, k_out);
        ray.interactions.push_back(vertex(ev, std::sqrt(e.power())));
    }

    const Vec3 pol = vertical_polarization(d2);
    ray.field_co = e.along(pol);
    ray.field_cross = e.along(normalized(cross(d2, pol)));
    ray.unfolded_length = s1 + s2;
    if (!(c.scale * (std::norm(ray.field_co) + std::norm(ray.field_cross)) >= c.min_mw))
        return std::nullopt;
    return ray;
}

std::vector<ReceivedRay> resolve(const Scene &scene, const Transceiver &tx, const Transceiver &rx,
                                 const CandidateMap &candidates, const PropagationConfig &config)
{
    PathContext c{scene, tx, rx, config, power_scale(tx, rx), dbm_to_mw(config.min_power_dbm),
                  2.0 * pi / wavelength(tx.frequency_hz)};
    std::vector<ReceivedRay> out;
    if (distance(tx.position, rx.position) < 1e-9)
        return out;

    Candidate los;
    if (auto it = candidates.find({}); it != candidates.end())
        los = it->second;
    if (auto r = reflection_path(c, {}, los))
        out.push_back(std::move(*r));
    for (const auto &[sig, cand] : candidates)
    {
        if (sig.empty() || static_cast<int>(sig.size()) > config.max_depth)
            continue;
        if (auto r = reflection_path(c, sig, cand))
            out.push_back(std::move(*r));
    }
    if (config.max_diffraction_order >= 1 && config.max_depth >= 1)
        for (std::size_t e = 0; e < scene.edges().size(); ++e)
            if (auto r = diffraction_path(c, static_cast<int>(e)))
                out.push_back(std::move(*r));
    return out;
}

void check_finite(const Vec3 &p, const std::string &what)
{
    if (!p.finite())
        throw ArgumentError(what + " position is not finite");
}

} // namespace

TraceResult trace(const Scene &scene, const Transceiver &tx, std::span<const Transceiver> receivers,
                  const PropagationConfig &config)
{
    config.validate();
    if (!tx.is_transmitter())
        throw ArgumentError("transceiver '" + tx.id + "' is not a transmitter");
    if (receivers.empty())
        throw ArgumentError("trace needs at least one receiver");
    if (!(tx.frequency_hz > 0.0))
        throw ArgumentError("frequency must be positive");
    check_finite(tx.position, "transmitter");

    std::set<std::string> ids;
    std::vector<CandidateMap> candidates(receivers.size());
    std::vector<Target> targets;
    for (std::size_t i = 0; i < receivers.size(); ++i)
    {
        check_finite(receivers[i].position, "receiver");
        if (!ids.insert(receivers[i].id).second)
            throw ArgumentError("duplicate receiver id '" + receivers[i].id + "'");
        targets.push_back({receivers[i].position, &candidates[i]});
    }
    launch_tubes(scene, tx.position, tx, receivers.front(), targets, config);

    if (config.bidirectional)
    {
        for (std::size_t i = 0; i < receivers.size(); ++i)
        {
            CandidateMap reverse;
            Target back{tx.position, &reverse};
            launch_tubes(scene, receivers[i].position, tx, receivers[i], std::span<Target>(&back, 1), config);
            for (auto &[sig, cand] : reverse)
            {
                Signature fwd(sig.rbegin(), sig.rend());
                std::vector<Vec3> seeds(cand.seeds.rbegin(), cand.seeds.rend());
                auto [it, inserted] = candidates[i].try_emplace(std::move(fwd), cand);
                if (inserted)
                    it->second.seeds = std::move(seeds);
                else
                    it->second.reverse_seeds = std::move(seeds);
            }
        }
    }

    TraceResult result;
    for (std::size_t i = 0; i < receivers.size(); ++i)
        result[receivers[i].id] = resolve(scene, tx, receivers[i], candidates[i], config);
    return result;
}

double receive(std::span<const ReceivedRay> rays, const Transceiver &rx, const Transceiver &tx,
               const PropagationConfig &config)
{
    std::vector<const ReceivedRay *> order;
    for (const auto &r : rays)
    {
        if (r.receiver_id != rx.id)
            throw ArgumentError("ray for receiver '" + r.receiver_id + "' passed to receiver '" + rx.id + "'");
        order.push_back(&r);
    }
    std::sort(order.begin(), order.end(), [](const ReceivedRay *a, const ReceivedRay *b) {
        return std::tie(a->path_key, a->capture_distance, a->launch_index) <
               std::tie(b->path_key, b->capture_distance, b->launch_index);
    });
    cplx sum = 0.0;
    const std::string *prev = nullptr;
    for (const ReceivedRay *r : order)
    {
        if (prev && *prev == r->path_key)
            continue;  // a path is counted once, whichever tubes captured it
        prev = &r->path_key;
        sum += r->field_co;
    }
    const double mw = power_scale(tx, rx) * std::norm(sum);
    double dbm = mw > 0.0 ? mw_to_dbm(mw) : config.noise_floor_dbm;
    dbm = std::max(dbm, config.noise_floor_dbm);
    if (config.quantize_rss)
        dbm = std::round(dbm);
    return dbm;
}

double predict_rss(const Scene &scene, const Transceiver &tx, const Transceiver &rx, const PropagationConfig &config)
{
    const TraceResult r = trace(scene, tx, std::span<const Transceiver>(&rx, 1), config);
    return receive(r.at(rx.id), rx, tx, config);
}

std::vector<double> predict_rss_many(const Scene &scene, const Transceiver &tx, std::span<const Transceiver> receivers,
                                     const PropagationConfig &config)
{
    const TraceResult r = trace(scene, tx, receivers, config);
    std::vector<double> out;
    out.reserve(receivers.size());
    for (const auto &rx : receivers)
        out.push_back(receive(r.at(rx.id), rx, tx, config));
    return out;
}

double free_space_rss(const Transceiver &tx, const Transceiver &rx)
{
    const double d = distance(tx.position, rx.position);
    if (!(d > 0.0))
        throw ArgumentError("free-space RSS needs distinct tx and rx positions");
    if (!(tx.frequency_hz > 0.0))
        throw ArgumentError("frequency must be positive");
    return mw_to_dbm(tx.transmit_power_mw) + tx.antenna_gain_dbi + rx.antenna_gain_dbi -
           20.0 * std::log10(4.0 * pi * d * tx.frequency_hz / speed_of_light);
}

std::string dump_paths(const TraceResult &result)
{
    std::ostringstream os;
    for (const auto &[id, rays] : result)
        for (const auto &r : rays)
        {
            os << id << ' ' << r.path_key << " depth=" << r.depth << " length=" << format_double(r.unfolded_length)
               << " |E|=" << format_double(std::abs(r.field_co))
               << " phase=" << format_double(std::arg(r.field_co)) << " points=";
            for (std::size_t i = 0; i < r.interactions.size(); ++i)
            {
                const Vec3 &p = r.interactions[i].point;
                os << (i ? ";" : "") << format_double(p.x) << ',' << format_double(p.y) << ','
                   << format_double(p.z);
            }
            os << '\n';
        }
    return os.str();
}

} // namespace wavescope
