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

#ifndef WAVESCOPE_HEATMAP_HPP
#define WAVESCOPE_HEATMAP_HPP

#include <wavescope/propagation.hpp>
#include <wavescope/scene.hpp>

#include <functional>
#include <string>
#include <vector>

namespace wavescope
{

// Receiver grid in a horizontal plane. Cell (i, j) sits at (x0 + i r, y0 + j r, z).
struct GridSpec
{
    double x0 = 0.0, y0 = 0.0;
    double resolution = 1.0;
    int nx = 0, ny = 0;
    double z = 1.2;

    std::size_t cells() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    // Throws ArgumentError on a non-positive resolution, an empty or oversized grid.
    void validate() const;
};

inline constexpr std::size_t max_grid_cells = 1'000'000;

// Cell centres covering the scene footprint at the given resolution.
GridSpec grid_over(const Scene &scene, double resolution, double z);

struct Heatmap
{
    GridSpec grid;
    std::string tx_id;
    std::vector<double> rss;  // row-major: index j * nx + i
};

// progress(done_rows, total_rows) is called from worker threads.
Heatmap compute_heatmap(const Scene &scene, const Transceiver &tx, const GridSpec &grid,
                        const PropagationConfig &config, int threads = 0,
                        const std::function<void(int, int)> &progress = {});

// Header block (tx, origin, resolution, size, z) then "x,y,rss_dbm" rows, 3 fraction digits.
std::string write_heatmap(const Heatmap &heatmap);

} // namespace wavescope

#endif
