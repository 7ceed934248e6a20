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
#include <random>

#include <benchmark/benchmark.h>

#include "paretune/accuracy.hpp"
#include "paretune/modeling.hpp"
#include "paretune/param_space.hpp"
#include "paretune/sampling.hpp"
#include "paretune/synth_sim.hpp"

namespace {

using namespace paretune;

SearchSpace large_cube_space() {
    SystemDescription sys;
    sys.domain_x = sys.domain_y = sys.domain_z = 88.08;
    sys.n_particles = 512000;
    sys.n_procs = 96;
    sys.dispersion_coeff = 1e5;
    return build_search_space(sys, ParameterRanges{});
}

void BM_partition_combined(benchmark::State& state) {
    auto space = large_cube_space();
    SurrogateModel model(0.02);
    auto spec = AccuracySpec::combined(1e-4);
    for (auto _ : state) {
        auto sub = partition_space(space, spec, model, Variant::ad,
                                   unsigned(state.range(0)));
        benchmark::DoNotOptimize(sub.points.data());
    }
}
BENCHMARK(BM_partition_combined)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_partition_split(benchmark::State& state) {
    auto space = large_cube_space();
    SurrogateModel model(0.02);
    auto spec = AccuracySpec::split(1e-3, 1e-1);
    for (auto _ : state) {
        auto sub = partition_space(space, spec, model, Variant::ad,
                                   unsigned(state.range(0)));
        benchmark::DoNotOptimize(sub.points.data());
    }
}
BENCHMARK(BM_partition_split)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_extract_frontier(benchmark::State& state) {
    auto space = large_cube_space();
    std::mt19937 rng(1);
    AccurateSubspace sub;
    sub.space = space;
    std::uniform_int_distribution<std::size_t> pick_c(0, space.cutoffs.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_g(0, space.grids.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_o(0, space.orders.size() - 1);
    for (std::int64_t i = 0; i < state.range(0); ++i)
        sub.points.push_back({pick_c(rng), pick_g(rng), pick_o(rng), 0, 0});
    for (auto _ : state) {
        auto frontier = extract_frontier(sub);
        benchmark::DoNotOptimize(frontier.points.data());
    }
}
BENCHMARK(BM_extract_frontier)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_adaptive_sample_series(benchmark::State& state) {
    SynthParams params;
    params.noise_frac = 0.0;
    params.n_procs = 96;
    std::vector<double> xs;
    std::vector<GridSize> grids;
    auto space = large_cube_space();
    for (const auto& g : space.grids)
        if (xs.empty() || double(g.total()) > xs.back()) {
            xs.push_back(double(g.total()));
            grids.push_back(g);
        }
    for (auto _ : state) {
        auto series = adaptive_sample(
            xs, BasisFamily::Linear, AdaptiveParams{}, [&](double total) {
                auto it = std::lower_bound(xs.begin(), xs.end(), total);
                Configuration cfg;
                cfg.order = 5;
                cfg.grid = grids[std::size_t(it - xs.begin())];
                return synth_time(cfg, Phase::ReciprocalSpace, params);
            });
        benchmark::DoNotOptimize(series.size());
    }
}
BENCHMARK(BM_adaptive_sample_series)->Unit(benchmark::kMicrosecond);

void BM_segment_series(benchmark::State& state) {
    std::vector<XY> pts;
    for (int i = 0; i < 64; ++i) {
        double g = 1e4 * (i + 1);
        pts.push_back({g, 1.81 + 8.33e-5 * g + (i >= 40 ? 0.5 : 0.0)});
    }
    for (auto _ : state) {
        auto model = segment_series(pts, BasisFamily::Linear, 0.001);
        benchmark::DoNotOptimize(model.segments.data());
    }
}
BENCHMARK(BM_segment_series)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
