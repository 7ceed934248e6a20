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
#include "paretune/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "paretune/errors.hpp"

namespace paretune {

void SystemDescription::validate() const {
    if (domain_x <= 0 || domain_y <= 0 || domain_z <= 0)
        throw ConfigError("system: domain dimensions must be positive");
    if (n_particles < 1)
        throw ConfigError("system: n_particles must be >= 1");
    if (geometry.kind == Geometry::Kind::Interfacial) {
        if (geometry.box_x <= 0 || geometry.box_y <= 0 || geometry.box_z <= 0)
            throw ConfigError("system: interfacial box dimensions must be positive");
        if (geometry.box_x > domain_x || geometry.box_y > domain_y ||
            geometry.box_z > domain_z)
            throw ConfigError("system: interfacial box must fit inside the domain");
    }
    if (n_procs < 1)
        throw ConfigError("system: n_procs must be >= 1");
    if (dispersion_coeff <= 0)
        throw ConfigError("system: dispersion_coeff must be positive");
    if (timesteps_per_sample < 1)
        throw ConfigError("system: timesteps_per_sample must be >= 1");
}

void ParameterRanges::validate() const {
    if (alpha_min <= 0 || alpha_min > alpha_max)
        throw ConfigError("ranges: need 0 < alpha_min <= alpha_max");
    if (cutoff_min <= 0 || cutoff_min > cutoff_max)
        throw ConfigError("ranges: need 0 < cutoff_min <= cutoff_max");
    if (alpha_step <= 0 || cutoff_step <= 0)
        throw ConfigError("ranges: step sizes must be positive");
    if (orders.empty())
        throw ConfigError("ranges: orders must be nonempty");
    for (int p : orders)
        if (p < 2) throw ConfigError("ranges: every order must be >= 2");
    if (!std::is_sorted(orders.begin(), orders.end()) ||
        std::adjacent_find(orders.begin(), orders.end()) != orders.end())
        throw ConfigError("ranges: orders must be strictly increasing");
    if (grid_point_factor <= 0)
        throw ConfigError("ranges: grid_point_factor must be positive");
}

std::string GridSize::str() const {
    std::ostringstream os;
    os << nx << "x" << ny << "x" << nz;
    return os.str();
}

const char* variant_name(Variant v) {
    return v == Variant::ad ? "ad" : "ik";
}

std::optional<Variant> variant_from_name(const std::string& name) {
    if (name == "ad") return Variant::ad;
    if (name == "ik") return Variant::ik;
    return std::nullopt;
}

bool is_five_smooth(std::int64_t n) {
    if (n < 1) return false;
    for (std::int64_t p : {2, 3, 5})
        while (n % p == 0) n /= p;
    return n == 1;
}

int next_five_smooth(double x) {
    // Tolerate x sitting a few ulps above an exact lattice value.
    auto target = std::int64_t(std::ceil(x - 1e-9 * std::max(1.0, x)));
    if (target < 1) target = 1;
    std::int64_t n = target;
    while (!is_five_smooth(n)) ++n;
    return int(n);
}

std::vector<GridSize> enumerate_grid_sizes(const SystemDescription& system,
                                           const ParameterRanges& ranges) {
    system.validate();
    ranges.validate();

    const double dmin =
        std::min({system.domain_x, system.domain_y, system.domain_z});
    const double rx = system.domain_x / dmin;
    const double ry = system.domain_y / dmin;
    const double rz = system.domain_z / dmin;
    const double max_points =
        ranges.grid_point_factor * double(system.n_particles);

    std::set<std::tuple<std::int64_t, int, int, int>> seen;
    std::vector<GridSize> grids;
    // Base resolution b counts ideal points along the smallest dimension;
    // the other dimensions scale by the domain aspect ratio and round up to
    // the 5-smooth lattice. Totals are monotone in b, so stop at the first
    // base whose grid exceeds the point bound.
    for (int base = 2;; ++base) {
        GridSize g{next_five_smooth(base * rx), next_five_smooth(base * ry),
                   next_five_smooth(base * rz)};
        if (double(g.total()) > max_points) break;
        if (seen.insert({g.total(), g.nx, g.ny, g.nz}).second)
            grids.push_back(g);
    }
    if (grids.empty())
        throw EmptyGridSet(
            "no grid satisfies the point bound (" +
            std::to_string(std::int64_t(max_points)) +
            " points); increase grid_point_factor or the particle count");
    std::sort(grids.begin(), grids.end(), [](const GridSize& a, const GridSize& b) {
        return std::tuple(a.total(), a.nx, a.ny, a.nz) <
               std::tuple(b.total(), b.nx, b.ny, b.nz);
    });
    return grids;
}

namespace {

std::vector<double> discretize(double lo, double hi, double step) {
    const double q = (hi - lo) / step;
    auto last = std::int64_t(std::floor(q + 1e-6));
    std::vector<double> values;
    values.reserve(std::size_t(last) + 1);
    for (std::int64_t i = 0; i <= last; ++i) {
        double v = lo + double(i) * step;
        if (v > hi) v = hi; // only the last index can overshoot by fp error
        values.push_back(v);
    }
    return values;
}

} // namespace

SearchSpace build_search_space(const SystemDescription& system,
                               const ParameterRanges& ranges) {
    system.validate();
    ranges.validate();
    SearchSpace space;
    space.system = system;
    space.ranges = ranges;
    space.alphas = discretize(ranges.alpha_min, ranges.alpha_max, ranges.alpha_step);
    space.cutoffs =
        discretize(ranges.cutoff_min, ranges.cutoff_max, ranges.cutoff_step);
    space.grids = enumerate_grid_sizes(system, ranges);
    space.orders = ranges.orders;
    return space;
}

} // namespace paretune
