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
#include <array>
#include <cstdint>
#include <unordered_map>

namespace wavescope
{

LaunchSet launch_directions(int order)
{
    if (order < 0)
        throw ArgumentError("tessellation order must be >= 0");
    if (order > 8)
        throw ArgumentError("tessellation order " + std::to_string(order) + " exceeds the limit of 8");

    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto &p : v)
        p = normalized(p);

    using Face = std::array<std::uint32_t, 3>;
    std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                               {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                               {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                               {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int level = 0; level < order; ++level)
    {
        std::unordered_map<std::uint64_t, std::uint32_t> midpoints;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            std::uint64_t key = (std::uint64_t(std::min(a, b)) << 32) | std::max(a, b);
            auto [it, inserted] = midpoints.try_emplace(key, static_cast<std::uint32_t>(v.size()));
            if (inserted)
                v.push_back(normalized(v[a] + v[b]));
            return it->second;
        };

        std::vector<Face> next;
        next.reserve(faces.size() * 4);
        for (const auto &f : faces)
        {
            std::uint32_t ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    double min_cos = 1.0;
    for (const auto &f : faces)
        for (int e = 0; e < 3; ++e)
            min_cos = std::min(min_cos, dot(v[f[e]], v[f[(e + 1) % 3]]));

    LaunchSet out;
    out.directions = std::move(v);
    out.angular_spacing = std::acos(std::clamp(min_cos, -1.0, 1.0));
    return out;
}

} // namespace wavescope
