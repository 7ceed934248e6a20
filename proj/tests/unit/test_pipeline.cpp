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
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "paretune/errors.hpp"
#include "paretune/pipeline.hpp"
#include "paretune/synth_sim.hpp"
#include "test_support.hpp"

using namespace paretune;
using namespace paretune::testing;
namespace fs = std::filesystem;

namespace {

TuneConfig small_bulk_config() {
    TuneConfig cfg;
    cfg.system = small_bulk_system();
    cfg.system.dispersion_coeff = 1e7;
    cfg.ranges.alpha_step = 0.05;
    cfg.ranges.cutoff_step = 0.5;
    cfg.accuracy = AccuracySpec::split(1e-3, 1e-1);
    cfg.synthetic.noise_frac = 0.0;
    cfg.synthetic.rng_seed = 5;
    cfg.synthetic.n_procs = cfg.system.n_procs;
    cfg.synthetic.surrogate_ck = 0.4;
    cfg.recip_error.ck = 0.4;
    return cfg;
}

} // namespace

TEST_CASE("run_tune output is independent of the jobs setting") {
    auto cfg = small_bulk_config();
    cfg.synthetic.noise_frac = 0.02;
    auto a = run_tune(cfg, {1});
    auto b = run_tune(cfg, {4});
    REQUIRE(a.variants.size() == b.variants.size());
    const auto& ra = a.variants[0].ranking;
    const auto& rb = b.variants[0].ranking;
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].point == rb[i].point);
        CHECK(ra[i].est_seconds == rb[i].est_seconds);
        CHECK(ra[i].chosen_alpha == rb[i].chosen_alpha);
    }
    CHECK(a.variants[0].samples_used == b.variants[0].samples_used);
}

TEST_CASE("run_tune handles several variants and repeats per point") {
    auto cfg = small_bulk_config();
    cfg.variants = {Variant::ad, Variant::ik};
    cfg.adaptive.repeats_per_point = 3;
    cfg.synthetic.noise_frac = 0.02;
    auto outcome = run_tune(cfg, {});
    REQUIRE(outcome.variants.size() == 2);
    CHECK(outcome.variants[0].variant == Variant::ad);
    CHECK(outcome.variants[1].variant == Variant::ik);
    for (const auto& vr : outcome.variants) {
        CHECK(vr.samples_used == vr.samples.size());
        // every measured point was repeated 3 times
        int max_repeat = 0;
        for (const auto& s : vr.samples)
            max_repeat = std::max(max_repeat, s.repeat_index);
        CHECK(max_repeat == 2);
        CHECK(vr.samples_used % 3 == 0);
    }
}

TEST_CASE("tabulated reciprocal model drives the partition end to end") {
    auto cfg = small_bulk_config();
    auto space = build_search_space(cfg.system, cfg.ranges);

    // table generated by an "external evaluator" (here: the surrogate law)
    auto dir = scratch_dir("tabulated");
    SynthParams gen;
    gen.surrogate_ck = 0.4;
    std::ostringstream table;
    table << "nx,ny,nz,order,alpha,recip_err\n";
    for (const auto& g : space.grids)
        for (int order : space.orders)
            for (double alpha : space.alphas)
                table << g.nx << ',' << g.ny << ',' << g.nz << ',' << order << ','
                      << alpha << ','
                      << synth_recip_error(alpha, g, order, cfg.system, gen)
                      << '\n';
    write_file(dir / "table.csv", table.str());

    auto surrogate_out = run_partition(cfg, {});
    cfg.recip_error.kind = RecipErrorSpec::Kind::Tabulated;
    cfg.recip_error.table_path = dir / "table.csv";
    auto tabulated_out = run_partition(cfg, {});
    // CSV text round-trip of the error values must not change the partition
    CHECK(tabulated_out.subspace.points.size() ==
          surrogate_out.subspace.points.size());
    CHECK(tabulated_out.frontier.points.size() ==
          surrogate_out.frontier.points.size());
    fs::remove_all(dir);
}

TEST_CASE("an external command sampler feeds the whole pipeline") {
    auto cfg = small_bulk_config();
    cfg.sampler_kind = TuneConfig::SamplerKind::External;
    // shell stand-in for a real code: prints the generator's noise-free laws
    cfg.external.command_template =
        "awk -v p={phase} -v rc={cutoff} -v g=$(( {nx} * {ny} * {nz} )) "
        "'BEGIN { if (p == \"real\") t = 0.44 + 0.0565 * rc^3; "
        "else t = 1.81 + 8.33e-5 * g + 0.5; "
        "printf \"phase time: %.9f s\\n\", t }'";
    cfg.external.parser_regex = "phase time: ([0-9.eE+-]+) s";
    cfg.external.timeout_s = 30.0;

    auto outcome = run_tune(cfg, {});
    REQUIRE(outcome.variants.size() == 1);
    const auto& vr = outcome.variants[0];
    REQUIRE(!vr.ranking.empty());
    CHECK(vr.samples_used > 0);

    // the command implements single-order coefficients, so the prediction
    // must reproduce them: cheapest frontier point checks out analytically
    const auto& best = vr.chosen();
    double expect = 0.44 + 0.0565 * best.cutoff * best.cutoff * best.cutoff +
                    1.81 + 8.33e-5 * double(best.grid.total()) + 0.5;
    CHECK(best.est_seconds == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("predict reports MissingCoverage for an uncovered frontier order") {
    auto cfg = small_bulk_config();
    auto tuned = run_tune(cfg, {});
    REQUIRE(!tuned.variants.empty());
    auto samples = tuned.variants[0].samples;
    // drop every reciprocal sample of the chosen order
    int chosen_order = tuned.variants[0].chosen().order;
    std::erase_if(samples, [&](const SampleRecord& s) {
        return s.phase == Phase::ReciprocalSpace && s.config.order == chosen_order;
    });
    CHECK_THROWS_AS((void)run_predict(cfg, samples, {}), MissingCoverage);

    // intact samples reproduce the online ranking
    auto offline = run_predict(cfg, tuned.variants[0].samples, {});
    CHECK(offline.variants[0].chosen().point == tuned.variants[0].chosen().point);
}
