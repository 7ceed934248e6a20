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
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"

#include "paretune/errors.hpp"
#include "paretune/sampling.hpp"
#include "test_support.hpp"

using namespace paretune;
using namespace paretune::testing;

TEST_CASE("static_real_plan produces the nine probe cutoffs") {
    auto space = build_search_space(small_bulk_system(), ParameterRanges{});
    auto plan = static_real_plan(space);
    REQUIRE(plan.size() == 9);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        CHECK(plan[i].cutoff == doctest::Approx(2.0 + 0.5 * double(i)));
        CHECK(plan[i].alpha == 0.50);
        CHECK(plan[i].order == 2);
        CHECK(plan[i].grid == GridSize{1, 1, 1});
    }
}

TEST_CASE("static_real_plan clips to the cutoff range") {
    ParameterRanges ranges;
    ranges.cutoff_min = 3.0;
    auto space = build_search_space(small_bulk_system(), ranges);
    auto plan = static_real_plan(space);
    REQUIRE(plan.size() == 7);
    CHECK(plan.front().cutoff == doctest::Approx(3.0));
    CHECK(plan.back().cutoff == doctest::Approx(6.0));

    ranges.cutoff_min = ranges.cutoff_max = 2.0;
    space = build_search_space(small_bulk_system(), ranges);
    CHECK(static_real_plan(space).size() == 1);
}

TEST_CASE("static_recip_plan covers all (order, grid) pairs at cutoff_min") {
    auto space = build_search_space(small_bulk_system(), ParameterRanges{});
    auto plan = static_recip_plan(space);
    CHECK(plan.size() == space.orders.size() * space.grids.size());
    for (const auto& cfg : plan) {
        CHECK(cfg.alpha == 0.50);
        CHECK(cfg.cutoff == space.ranges.cutoff_min);
    }

    auto restricted = static_recip_plan(space, {4, 5});
    CHECK(restricted.size() == 2 * space.grids.size());
    for (const auto& cfg : restricted) CHECK((cfg.order == 4 || cfg.order == 5));

    // 5 orders x 18 grids on the widened interfacial budget
    ParameterRanges ranges;
    ranges.grid_point_factor = 52.0;
    auto si = build_search_space(small_interface_system(), ranges);
    CHECK(static_recip_plan(si).size() == 90);
}

TEST_CASE("adaptive_sample needs exactly 3 points for exact cubic data") {
    std::vector<double> xs = {2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
    int calls = 0;
    auto series = adaptive_sample(xs, BasisFamily::Cubic, AdaptiveParams{},
                                  [&](double c) {
                                      ++calls;
                                      return 0.44 + 0.0565 * c * c * c;
                                  });
    CHECK(calls == 3);
    CHECK(series.size() == 3);
    CHECK(series.count(0) == 1);
    CHECK(series.count(4) == 1); // midpoint
    CHECK(series.count(8) == 1);
}

TEST_CASE("adaptive_sample measures both points of a two-element series") {
    std::vector<double> xs = {2.0, 6.0};
    int calls = 0;
    auto series = adaptive_sample(xs, BasisFamily::Cubic, AdaptiveParams{},
                                  [&](double) {
                                      ++calls;
                                      return 1.0 + calls; // arbitrary
                                  });
    CHECK(calls == 2);
    CHECK(series.size() == 2);
    CHECK(series.count(0) == 1);
    CHECK(series.count(1) == 1);
}

TEST_CASE("adaptive_sample concentrates around a piecewise shift") {
    // two parallel lines, offset 5.0 s from position index 12 onward
    std::vector<int> edges = {40, 45, 48,  50,  54,  60,  64,  72, 75,
                              80, 81, 90,  96,  100, 108, 120, 125};
    std::vector<double> xs;
    for (int s : edges) xs.push_back(double(s) * s * s);
    const std::size_t shift_at = 12; // s == 96
    auto value = [&](double g) {
        double y = 1.81 + 1e-5 * g;
        if (g >= xs[shift_at]) y += 5.0;
        return y;
    };
    int calls = 0;
    auto series = adaptive_sample(xs, BasisFamily::Linear, AdaptiveParams{},
                                  [&](double g) {
                                      ++calls;
                                      return value(g);
                                  });
    CHECK(calls == int(series.size())); // memoized: no position re-measured
    CHECK(series.size() > 3);
    CHECK(series.size() < xs.size()); // strictly fewer than the static plan
    CHECK(series.count(0) == 1);
    CHECK(series.count(xs.size() - 1) == 1);
    // the recursion must localize the breakpoint: both neighbors sampled
    CHECK(series.count(shift_at - 1) == 1);
    CHECK(series.count(shift_at) == 1);

    // feeding the sampled series to the segmenter recovers the breakpoint
    std::vector<XY> pts;
    for (const auto& [idx, y] : series) pts.push_back({xs[idx], y});
    auto model = segment_series(pts, BasisFamily::Linear, 0.05);
    REQUIRE(model.breakpoints.size() == 1);
    CHECK(model.breakpoints[0] == xs[shift_at]);
}

TEST_CASE("adaptive_sample memoizes across overlapping halves") {
    std::vector<double> xs;
    for (int i = 0; i < 33; ++i) xs.push_back(double(i));
    std::map<double, int> seen;
    AdaptiveParams params;
    params.rel_error_threshold = 1e-9; // force deep recursion on noisy data
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    auto series = adaptive_sample(xs, BasisFamily::Linear, params,
                                  [&](double x) {
                                      ++seen[x];
                                      return 10.0 + x + unif(rng);
                                  });
    CHECK(series.size() <= xs.size());
    for (const auto& [x, count] : seen) CHECK(count == 1);
}

TEST_CASE("adaptive_sample respects max_depth") {
    std::vector<double> xs;
    for (int i = 0; i < 17; ++i) xs.push_back(double(i));
    AdaptiveParams params;
    params.rel_error_threshold = 1e-12;
    params.max_depth = 1; // only the root midpoint is allowed
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    auto series = adaptive_sample(xs, BasisFamily::Linear, params,
                                  [&](double) { return unif(rng); });
    CHECK(series.size() == 3);
}

TEST_CASE("adaptive_sample aggregates repeats by median") {
    std::vector<double> xs = {1.0, 2.0};
    AdaptiveParams params;
    params.repeats_per_point = 3;
    std::map<double, std::vector<double>> raw = {{1.0, {5.0, 1.0, 2.0}},
                                                 {2.0, {7.0, 9.0, 3.0}}};
    std::map<double, int> next;
    auto series = adaptive_sample(xs, BasisFamily::Linear, params,
                                  [&](double x) { return raw[x][next[x]++]; });
    CHECK(series[0] == 2.0); // median of {5, 1, 2}
    CHECK(series[1] == 7.0); // median of {7, 9, 3}
}

TEST_CASE("adaptive_sample validates its inputs") {
    AdaptiveParams params;
    std::vector<double> one = {1.0};
    CHECK_THROWS_AS(
        (void)adaptive_sample(one, BasisFamily::Linear, params,
                              [](double) { return 1.0; }),
        Error);
    std::vector<double> unsorted = {2.0, 1.0};
    CHECK_THROWS_AS(
        (void)adaptive_sample(unsorted, BasisFamily::Linear, params,
                              [](double) { return 1.0; }),
        Error);
}

TEST_CASE("dynamic_recip_plan collapses degenerate cutoff ranges") {
    auto space = build_search_space(small_interface_system(), ParameterRanges{});
    AccurateSubspace sub;
    sub.space = space;
    sub.points = {{20, 4, 2, 0, 10}, {20, 5, 2, 0, 10}, {20, 5, 3, 0, 10}};
    auto plan = dynamic_recip_plan(sub);
    CHECK(plan.rc_levels.size() == 1);
    CHECK(plan.rc_min == plan.rc_max);
    REQUIRE(plan.orders.size() == 2);
    CHECK(plan.orders[0].order == space.orders[2]);
    CHECK(plan.orders[0].grid_idxs == std::vector<std::size_t>{4, 5});
    CHECK(plan.orders[1].order == space.orders[3]);
    CHECK(plan.orders[1].grid_idxs == std::vector<std::size_t>{5});
}

TEST_CASE("dynamic_recip_plan samples at the extreme accurate cutoffs") {
    auto space = build_search_space(small_interface_system(), ParameterRanges{});
    AccurateSubspace sub;
    sub.space = space;
    // cutoffs 4.6sigma (index 26) and 6.0sigma (index 40)
    sub.points = {{26, 4, 2, 0, 10}, {40, 5, 2, 0, 10}, {30, 5, 2, 0, 10}};
    auto plan = dynamic_recip_plan(sub);
    REQUIRE(plan.rc_levels.size() == 2);
    CHECK(plan.rc_min == doctest::Approx(4.6).epsilon(1e-12));
    CHECK(plan.rc_max == doctest::Approx(6.0).epsilon(1e-12));
    REQUIRE(plan.orders.size() == 1); // only order index 2 is accurate
    CHECK(plan.orders[0].order == space.orders[2]);
}

TEST_CASE("command sampler runs a command and parses the timing") {
    CommandSampler sampler("echo 3.14", "([0-9.]+)");
    Configuration cfg;
    CHECK(sampler.measure(cfg, Phase::Total, 1000) == doctest::Approx(3.14));
}

TEST_CASE("command sampler substitutes every placeholder") {
    CommandSampler sampler(
        "echo alpha={alpha} rc={cutoff} p={order} grid={nx}x{ny}x{nz} "
        "ts={timesteps} phase={phase} took=42.5s",
        "took=([0-9.]+)s");
    Configuration cfg;
    cfg.alpha = 0.56;
    cfg.cutoff = 4.6;
    cfg.order = 4;
    cfg.grid = {10, 10, 160};
    CHECK(sampler.measure(cfg, Phase::ReciprocalSpace, 1000) ==
          doctest::Approx(42.5));

    CommandSampler echo_back("echo {cutoff}", "([0-9.]+)");
    CHECK(echo_back.measure(cfg, Phase::RealSpace, 1000) == doctest::Approx(4.6));
}

TEST_CASE("command sampler failure taxonomy") {
    Configuration cfg;
    CommandSampler bad_exit("exit 7", "([0-9.]+)");
    CHECK_THROWS_AS((void)bad_exit.measure(cfg, Phase::Total, 1000), SpawnError);

    CommandSampler no_number("echo no timing here", "took=([0-9.]+)");
    CHECK_THROWS_AS((void)no_number.measure(cfg, Phase::Total, 1000), ParseError);

    CommandSampler zero("echo 0", "([0-9.]+)");
    CHECK_THROWS_AS((void)zero.measure(cfg, Phase::Total, 1000), NonPositiveTime);

    CommandSampler slow("sleep 5", "([0-9.]+)", 0.25);
    CHECK_THROWS_AS((void)slow.measure(cfg, Phase::Total, 1000), SpawnError);

    CHECK_THROWS_AS(CommandSampler("echo 1", "([0-9.]+"), ConfigError);
    CHECK_THROWS_AS(CommandSampler("echo 1", "no capture group"), ConfigError);
}

TEST_CASE("phase names round-trip") {
    for (Phase p : {Phase::RealSpace, Phase::ReciprocalSpace, Phase::Total})
        CHECK(phase_from_name(phase_name(p)) == p);
    CHECK_FALSE(phase_from_name("bogus").has_value());
}
