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
#ifndef PARETUNE_SAMPLING_HPP
#define PARETUNE_SAMPLING_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paretune/accuracy.hpp"
#include "paretune/modeling.hpp"
#include "paretune/param_space.hpp"

namespace paretune {

/// Which contribution a measurement times.
enum class Phase { RealSpace, ReciprocalSpace, Total };

const char* phase_name(Phase p);
std::optional<Phase> phase_from_name(const std::string& name);

/// Measures wall time of one phase for one configuration over a fixed number
/// of timesteps. Repeated calls may differ (noise). concurrent_ok reports
/// whether measure may be called from several threads at once.
class Sampler {
public:
    virtual ~Sampler() = default;
    virtual double measure(const Configuration& config, Phase phase,
                           int timesteps) = 0;
    virtual bool concurrent_ok() const { return false; }
};

struct SampleRecord {
    Configuration config;
    Phase phase = Phase::Total;
    double seconds = 0.0;
    int repeat_index = 0;
};

struct AdaptiveParams {
    double rel_error_threshold = 0.05;
    int max_depth = 8;
    int repeats_per_point = 1; // aggregated by median when > 1

    void validate() const;
};

/// Real-space probe plan: alpha = 0.50, order 2, 1x1x1 grid, cutoffs from
/// 2.0 to 6.0 sigma in 0.5 steps, clipped to the space's cutoff range.
std::vector<Configuration> static_real_plan(const SearchSpace& space);

/// Reciprocal-space probe plan: alpha = 0.50, cutoff = cutoff_min, every
/// (order, grid) pair of the space. The overload restricts the orders (e.g.
/// to those present in an accurate subspace).
std::vector<Configuration> static_recip_plan(const SearchSpace& space);
std::vector<Configuration> static_recip_plan(const SearchSpace& space,
                                             const std::vector<int>& orders);

/// Recursive adaptive sampling over strictly increasing positions xs.
///
/// The endpoints are always measured; each visited range measures its
/// midpoint, fits the basis family to the three local points, and recurses
/// into both halves only while the worst relative error |fit - y| / y
/// exceeds the threshold (bounded by max_depth). Positions are memoized by
/// index, so measure_at runs at most |xs| times (times repeats_per_point;
/// values are per-point medians). Returns index -> seconds.
std::map<std::size_t, double> adaptive_sample(
    const std::vector<double>& xs, BasisFamily family,
    const AdaptiveParams& params,
    const std::function<double(double position)>& measure_at);

/// Grid series to sample per accurate order, plus the cutoff level(s) to
/// sample them at: the extreme cutoffs of the accurate subspace, collapsing
/// to one level when they coincide.
struct DynamicRecipPlan {
    double rc_min = 0.0;
    double rc_max = 0.0;
    std::vector<double> rc_levels; // {rc_min} or {rc_min, rc_max}
    struct OrderGrids {
        int order = 0;
        std::vector<std::size_t> grid_idxs; // into space.grids, ascending
    };
    std::vector<OrderGrids> orders;
};

DynamicRecipPlan dynamic_recip_plan(const AccurateSubspace& sub);

/// Sampler that shells out to a target code. The template may use the
/// placeholders {alpha},{cutoff},{order},{nx},{ny},{nz},{timesteps},{phase};
/// seconds are extracted from stdout via a regex with one capture group.
/// Throws SpawnError (spawn failure, nonzero exit, timeout), ParseError, or
/// NonPositiveTime.
class CommandSampler final : public Sampler {
public:
    CommandSampler(std::string command_template, std::string parser_regex,
                   double timeout_s = 600.0);
    double measure(const Configuration& config, Phase phase,
                   int timesteps) override;

private:
    std::string template_;
    std::string regex_;
    double timeout_s_;
};

std::unique_ptr<Sampler> external_command_sampler(std::string command_template,
                                                  std::string parser_regex,
                                                  double timeout_s = 600.0);

} // namespace paretune

#endif
