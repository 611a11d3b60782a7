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

#include "parallel.hpp"

#include <wavescope/digest.hpp>
#include <wavescope/errors.hpp>
#include <wavescope/heatmap.hpp>

#include <atomic>
#include <cmath>
#include <sstream>

namespace wavescope
{

void GridSpec::validate() const
{
    if (!(resolution > 0.0) || !std::isfinite(resolution))
        throw ArgumentError("grid resolution must be positive");
    if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(z))
        throw ArgumentError("grid origin must be finite");
    if (nx <= 0 || ny <= 0)
        throw ArgumentError("grid has no cells");
    if (cells() > max_grid_cells)
        throw ArgumentError("grid has more than " + std::to_string(max_grid_cells) + " cells");
}

GridSpec grid_over(const Scene &scene, double resolution, double z)
{
    if (!(resolution > 0.0) || !std::isfinite(resolution))
        throw ArgumentError("grid resolution must be positive");
    const Aabb &b = scene.bounds();
    GridSpec g;
    g.resolution = resolution;
    g.nx = static_cast<int>(std::min(std::floor((b.hi.x - b.lo.x) / resolution + 1e-9), 1e7));
    g.ny = static_cast<int>(std::min(std::floor((b.hi.y - b.lo.y) / resolution + 1e-9), 1e7));
    g.x0 = b.lo.x + 0.5 * resolution;
    g.y0 = b.lo.y + 0.5 * resolution;
    g.z = z;
    return g;
}

Heatmap compute_heatmap(const Scene &scene, const Transceiver &tx, const GridSpec &grid,
                        const PropagationConfig &config, int threads, const std::function<void(int, int)> &progress)
{
    grid.validate();
    config.validate();
    Heatmap h;
    h.grid = grid;
    h.tx_id = tx.id;
    h.rss.assign(grid.cells(), config.noise_floor_dbm);
    std::atomic<int> done{0};
    // one trace per row; a receiver's result does not depend on the others in its row
    detail::parallel_for(static_cast<std::size_t>(grid.ny), threads, [&](std::size_t j) {
        std::vector<Transceiver> row;
        for (int i = 0; i < grid.nx; ++i)
        {
            Transceiver rx;
            rx.id = "cell_" + std::to_string(i);
            rx.role = Role::tracked_device;
            rx.position = {grid.x0 + i * grid.resolution, grid.y0 + static_cast<double>(j) * grid.resolution, grid.z};
            rx.frequency_hz = tx.frequency_hz;
            row.push_back(rx);
        }
        auto values = predict_rss_many(scene, tx, row, config);
        std::copy(values.begin(), values.end(), h.rss.begin() + static_cast<std::ptrdiff_t>(j * grid.nx));
        if (progress)
            progress(++done, grid.ny);
    });
    return h;
}

std::string write_heatmap(const Heatmap &h)
{
    const GridSpec &g = h.grid;
    std::ostringstream os;
    os << "# tx: " << h.tx_id << "\n# origin: " << format_double(g.x0) << "," << format_double(g.y0)
       << "\n# resolution_m: " << format_double(g.resolution) << "\n# size: " << g.nx << "x" << g.ny
       << "\n# z: " << format_double(g.z) << "\nx,y,rss_dbm\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            os << format_double(g.x0 + i * g.resolution) << "," << format_double(g.y0 + j * g.resolution) << ","
               << format_fixed(h.rss[static_cast<std::size_t>(j) * g.nx + i], 3) << "\n";
    return os.str();
}

} // namespace wavescope
