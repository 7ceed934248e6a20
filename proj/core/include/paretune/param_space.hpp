/* Copyright 2026 paretune contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef PARETUNE_PARAM_SPACE_HPP
#define PARETUNE_PARAM_SPACE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace paretune {

/// Particle layout of the simulated system. Interfacial systems confine the
/// particles to a box inside the (larger) domain.
struct Geometry {
    enum class Kind { Bulk, Interfacial };
    Kind kind = Kind::Bulk;
    // Box dimensions, only meaningful for Interfacial.
    double box_x = 0.0, box_y = 0.0, box_z = 0.0;

    static Geometry bulk() { return {}; }
    static Geometry interfacial(double x, double y, double z) {
        return {Kind::Interfacial, x, y, z};
    }
};

/// The target simulation: domain extents (sigma), particle count, process
/// count of the target code, and the dispersion coefficient entering the
/// error bounds.
struct SystemDescription {
    double domain_x = 0.0, domain_y = 0.0, domain_z = 0.0;
    std::int64_t n_particles = 0;
    Geometry geometry;
    int n_procs = 1;
    double dispersion_coeff = 1.0;
    int timesteps_per_sample = 1000;

    double volume() const { return domain_x * domain_y * domain_z; }

    /// Throws ConfigError if any invariant is violated.
    void validate() const;
};

/// Ranges and step sizes of the discretized parameter space.
struct ParameterRanges {
    double alpha_min = 0.01, alpha_max = 1.00, alpha_step = 0.01; // 1/sigma
    double cutoff_min = 2.0, cutoff_max = 6.0, cutoff_step = 0.1; // sigma
    std::vector<int> orders = {2, 3, 4, 5, 6};
    double grid_point_factor = 8.0; // max grid points as a multiple of N

    void validate() const;
};

/// FFT mesh resolution. Each dimension must be 5-smooth.
struct GridSize {
    int nx = 1, ny = 1, nz = 1;

    std::int64_t total() const {
        return std::int64_t(nx) * std::int64_t(ny) * std::int64_t(nz);
    }
    bool operator==(const GridSize&) const = default;
    std::string str() const;
};

/// How the Poisson solve differentiates; an opaque label for the tuner.
enum class Variant { ad, ik };

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);

/// One point of the 4-dimensional space: (alpha, cutoff, order, grid).
struct Configuration {
    double alpha = 0.5;   // 1/sigma
    double cutoff = 2.0;  // sigma
    int order = 2;
    GridSize grid;
    Variant variant = Variant::ad;
};

/// The discretized space. Value lists are arithmetic progressions; grids are
/// sorted ascending by total point count (ties by nx, ny, nz).
struct SearchSpace {
    SystemDescription system;
    ParameterRanges ranges;
    std::vector<double> alphas;
    std::vector<double> cutoffs;
    std::vector<GridSize> grids;
    std::vector<int> orders;

    /// Logical size |alphas|*|cutoffs|*|grids|*|orders|; never materialized.
    std::uint64_t logical_size() const {
        return std::uint64_t(alphas.size()) * cutoffs.size() * grids.size() *
               orders.size();
    }
};

/// True iff n = 2^a * 3^b * 5^c (n >= 1).
bool is_five_smooth(std::int64_t n);

/// Smallest 5-smooth integer >= x (x > 0). A relative tolerance absorbs
/// floating-point fuzz on exact lattice values.
int next_five_smooth(double x);

/// All grids proportional to the domain with at most
/// grid_point_factor * n_particles points. Sorted, duplicate-free.
/// Throws EmptyGridSet when nothing satisfies the bound.
std::vector<GridSize> enumerate_grid_sizes(const SystemDescription& system,
                                           const ParameterRanges& ranges);

/// Discretizes alpha and cutoff by index arithmetic (value = min + i*step)
/// and enumerates grids. Deterministic for identical inputs.
SearchSpace build_search_space(const SystemDescription& system,
                               const ParameterRanges& ranges);

} // namespace paretune

#endif
