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
#include "paretune/synth_sim.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <tuple>

#include "paretune/errors.hpp"

namespace paretune {

void SynthParams::validate() const {
    if (a_r < 0 || b_r < 0 || shift_mag < 0 || gamma_rc < 0)
        throw ConfigError("synthetic: time coefficients must be >= 0");
    for (const auto& [order, c] : recip)
        if (c.p < 0 || c.b < 0)
            throw ConfigError("synthetic: time coefficients must be >= 0 (order " +
                              std::to_string(order) + ")");
    if (noise_frac < 0 || noise_frac > 0.2)
        throw ConfigError("synthetic: noise_frac must lie in [0, 0.2]");
    if (n_procs < 1) throw ConfigError("synthetic: n_procs must be >= 1");
    if (surrogate_ck <= 0)
        throw ConfigError("synthetic: surrogate_ck must be positive");
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t state, std::uint64_t value) {
    state ^= value + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    return splitmix64(state);
}

// Standard normal draw from a counter-based stream; fully portable, no
// stdlib distribution involved.
double normal_draw(const SynthParams& params, const Configuration& cfg,
                   Phase phase, std::uint64_t repeat) {
    std::uint64_t h = params.rng_seed;
    h = mix(h, std::bit_cast<std::uint64_t>(cfg.alpha));
    h = mix(h, std::bit_cast<std::uint64_t>(cfg.cutoff));
    h = mix(h, std::uint64_t(cfg.order));
    h = mix(h, std::uint64_t(cfg.grid.nx));
    h = mix(h, std::uint64_t(cfg.grid.ny));
    h = mix(h, std::uint64_t(cfg.grid.nz));
    h = mix(h, std::uint64_t(cfg.variant));
    h = mix(h, std::uint64_t(phase));
    h = mix(h, repeat);
    const double u1 =
        (double(splitmix64(h) >> 11) + 0.5) * 0x1.0p-53; // (0, 1)
    const double u2 = double(splitmix64(h) >> 11) * 0x1.0p-53; // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

double real_time_raw(const Configuration& cfg, const SynthParams& params) {
    return params.a_r + params.b_r * cfg.cutoff * cfg.cutoff * cfg.cutoff;
}

double recip_time_raw(const Configuration& cfg, const SynthParams& params) {
    auto it = params.recip.find(cfg.order);
    if (it == params.recip.end())
        throw UnknownOrder("synthetic generator has no coefficients for order " +
                           std::to_string(cfg.order));
    double t = it->second.p + it->second.b * double(cfg.grid.total()) +
               params.gamma_rc * cfg.cutoff;
    if (cfg.grid.nz >= params.n_procs) t += params.shift_mag;
    return t;
}

} // namespace

double synth_time_exact(const Configuration& config, Phase phase,
                        const SynthParams& params) {
    switch (phase) {
    case Phase::RealSpace: return real_time_raw(config, params);
    case Phase::ReciprocalSpace: return recip_time_raw(config, params);
    case Phase::Total:
        return real_time_raw(config, params) + recip_time_raw(config, params);
    }
    return 0.0;
}

double synth_time(const Configuration& config, Phase phase,
                  const SynthParams& params, std::uint64_t repeat) {
    const double raw = synth_time_exact(config, phase, params);
    const double z = normal_draw(params, config, phase, repeat);
    const double eta = std::max(0.5, 1.0 + params.noise_frac * z);
    return raw * eta;
}

double synth_recip_error(double alpha, const GridSize& grid, int order,
                         const SystemDescription& system,
                         const SynthParams& params) {
    if (alpha <= 0)
        throw NonPositiveParameter("synth_recip_error: alpha must be positive");
    const double h_max = std::max({system.domain_x / grid.nx,
                                   system.domain_y / grid.ny,
                                   system.domain_z / grid.nz});
    return params.surrogate_ck * alpha * std::pow(alpha * h_max, double(order));
}

namespace {

struct OptimumSearch {
    bool found = false;
    double seconds = 0.0;
    Configuration config;
};

OptimumSearch search_true_optimum(const SearchSpace& space,
                                  const AccuracySpec& spec,
                                  const SynthParams& params, Variant variant) {
    spec.validate();
    params.validate();
    OptimumSearch best;
    auto better = [&](double t, const Configuration& cfg) {
        if (!best.found) return true;
        return std::tuple(t, cfg.grid.total(), cfg.order, cfg.cutoff) <
               std::tuple(best.seconds, best.config.grid.total(),
                          best.config.order, best.config.cutoff);
    };
    for (std::size_t c = 0; c < space.cutoffs.size(); ++c)
        for (std::size_t g = 0; g < space.grids.size(); ++g)
            for (std::size_t o = 0; o < space.orders.size(); ++o) {
                // Feasibility alpha-by-alpha; no interval structure assumed.
                std::size_t first = space.alphas.size(), last = 0;
                for (std::size_t a = 0; a < space.alphas.size(); ++a) {
                    double real = real_space_error(space.alphas[a],
                                                   space.cutoffs[c], space.system);
                    double recip =
                        synth_recip_error(space.alphas[a], space.grids[g],
                                          space.orders[o], space.system, params);
                    bool ok = spec.mode == AccuracySpec::Mode::Split
                                  ? real <= spec.real_threshold &&
                                        recip <= spec.recip_threshold
                                  : std::hypot(real, recip) <= spec.threshold;
                    if (ok) {
                        first = std::min(first, a);
                        last = a;
                    }
                }
                if (first == space.alphas.size()) continue;
                Configuration cfg;
                cfg.alpha = space.alphas[(first + last) / 2];
                cfg.cutoff = space.cutoffs[c];
                cfg.order = space.orders[o];
                cfg.grid = space.grids[g];
                cfg.variant = variant;
                double t = synth_time_exact(cfg, Phase::Total, params);
                if (better(t, cfg)) {
                    best.found = true;
                    best.seconds = t;
                    best.config = cfg;
                }
            }
    return best;
}

} // namespace

Configuration true_optimum(const SearchSpace& space, const AccuracySpec& spec,
                           const SynthParams& params, Variant variant) {
    auto best = search_true_optimum(space, spec, params, variant);
    if (!best.found)
        throw EmptyAccurateSubspace("true_optimum: no accurate configuration");
    return best.config;
}

double true_optimum_seconds(const SearchSpace& space, const AccuracySpec& spec,
                            const SynthParams& params) {
    auto best = search_true_optimum(space, spec, params, Variant::ad);
    if (!best.found)
        throw EmptyAccurateSubspace("true_optimum: no accurate configuration");
    return best.seconds;
}

double SyntheticSampler::measure(const Configuration& config, Phase phase,
                                 int timesteps) {
    std::uint64_t repeat;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        Key key{std::bit_cast<std::uint64_t>(config.alpha),
                std::bit_cast<std::uint64_t>(config.cutoff),
                config.order,
                config.grid.nx,
                config.grid.ny,
                config.grid.nz,
                int(config.variant),
                int(phase)};
        repeat = repeat_counters_[key]++;
    }
    return synth_time(config, phase, params_, repeat) *
           (double(timesteps) / 1000.0);
}

} // namespace paretune
