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
#ifndef PARETUNE_SYNTH_SIM_HPP
#define PARETUNE_SYNTH_SIM_HPP

#include <cstdint>
#include <map>
#include <mutex>

#include "paretune/accuracy.hpp"
#include "paretune/param_space.hpp"
#include "paretune/sampling.hpp"

namespace paretune {

/// Ground-truth timing generator. Real-space time follows a + b*rc^3; the
/// reciprocal-space time is linear in grid points per order, with a constant
/// offset once nz reaches the process count (slab -> pencil decomposition)
/// and a linear coupling in the cutoff. Coefficients are generator inputs,
/// not claims about any machine; defaults are scaled to look like real
/// measurements of 1000-timestep samples.
struct SynthParams {
    double a_r = 0.44;   // seconds
    double b_r = 0.0565; // seconds / sigma^3
    struct OrderCoeffs {
        double p = 0.0; // seconds (mapping overhead)
        double b = 0.0; // seconds / grid point
    };
    std::map<int, OrderCoeffs> recip = {
        {2, {0.90, 5.00e-5}}, {3, {1.15, 6.20e-5}}, {4, {1.45, 7.20e-5}},
        {5, {1.81, 8.33e-5}}, {6, {2.25, 9.60e-5}},
    };
    double shift_mag = 0.5;   // seconds, added while nz >= n_procs
    double gamma_rc = 0.02;   // seconds / sigma, cutoff coupling
    double noise_frac = 0.02; // multiplicative noise std
    std::uint64_t rng_seed = 1;
    int n_procs = 1;
    double surrogate_ck = 1.0; // reciprocal error calibration

    void validate() const;
};

/// Noise-free generator laws.
double synth_time_exact(const Configuration& config, Phase phase,
                        const SynthParams& params);

/// Noisy timing: the noise-free law scaled by max(0.5, 1 + noise_frac * z),
/// z drawn from a deterministic stream keyed by (rng_seed, config, phase,
/// repeat). Throws UnknownOrder for orders without coefficients.
double synth_time(const Configuration& config, Phase phase,
                  const SynthParams& params, std::uint64_t repeat = 0);

/// Monotone surrogate for the reciprocal error bound:
/// ck * alpha * (alpha * h_max)^order, h_max the largest mesh spacing.
double synth_recip_error(double alpha, const GridSize& grid, int order,
                         const SystemDescription& system,
                         const SynthParams& params);

/// Exhaustive noise-free optimum over all accurate perf points; feasibility
/// is checked alpha-by-alpha against real_space_error and
/// synth_recip_error. Ties break like rank_frontier: smaller grid points,
/// then order, then cutoff. The acceptance oracle for the whole pipeline.
Configuration true_optimum(const SearchSpace& space, const AccuracySpec& spec,
                           const SynthParams& params,
                           Variant variant = Variant::ad);

/// Noise-free total time of the true_optimum configuration for the same
/// feasibility rules; convenience for oracle comparisons.
double true_optimum_seconds(const SearchSpace& space, const AccuracySpec& spec,
                            const SynthParams& params);

/// Sampler backed by the generator. Repeat counters are tracked per
/// (configuration, phase), so re-measuring a point draws fresh noise while
/// the stream stays reproducible. Timings scale linearly with the requested
/// timesteps (laws define the cost of a 1000-timestep sample).
class SyntheticSampler final : public Sampler {
public:
    explicit SyntheticSampler(SynthParams params) : params_(std::move(params)) {}

    double measure(const Configuration& config, Phase phase,
                   int timesteps) override;
    bool concurrent_ok() const override { return true; }
    const SynthParams& params() const { return params_; }

private:
    using Key = std::tuple<std::uint64_t, std::uint64_t, int, int, int, int, int, int>;
    SynthParams params_;
    std::mutex mutex_;
    std::map<Key, std::uint64_t> repeat_counters_;
};

} // namespace paretune

#endif
