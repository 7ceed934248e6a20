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

#include "doctest.h"

#include "paretune/config.hpp"
#include "paretune/errors.hpp"
#include "paretune/report.hpp"
#include "test_support.hpp"

using namespace paretune;
using namespace paretune::testing;

namespace {

const char* kFullConfig = R"json({
  "schema": 1,
  "system": {
    "domain": [11.01, 11.01, 176.16],
    "n_particles": 4000,
    "geometry": {"type": "interfacial", "box": [11.01, 11.01, 44.04]},
    "n_procs": 8,
    "dispersion_coeff": 1.0,
    "timesteps_per_sample": 1000
  },
  "ranges": {
    "alpha_min": 0.01, "alpha_max": 1.0, "alpha_step": 0.01,
    "cutoff_min": 2.0, "cutoff_max": 6.0, "cutoff_step": 0.1,
    "orders": [2, 3, 4, 5, 6],
    "grid_point_factor": 8.0
  },
  "accuracy": {"mode": "combined", "threshold": 5e-4},
  "sampler": {"type": "synthetic"},
  "synthetic": {
    "a_r": 0.44, "b_r": 0.0565,
    "recip_coeffs": {"2": [0.9, 5e-5], "3": [1.15, 6.2e-5], "4": [1.45, 7.2e-5],
                     "5": [1.81, 8.33e-5], "6": [2.25, 9.6e-5]},
    "shift_mag": 0.5, "gamma_rc": 0.02,
    "noise_frac": 0.0, "rng_seed": 42, "surrogate_ck": 1.0
  },
  "adaptive": {"rel_error_threshold": 0.05, "max_depth": 8, "repeats_per_point": 1},
  "variants": ["ad"],
  "baseline": {"alpha": 0.92, "cutoff": 3.0, "order": 5, "grid": [12, 12, 192]},
  "output_dir": "out"
})json";

} // namespace

TEST_CASE("full config round-trips through the parser") {
    auto cfg = parse_tune_config(kFullConfig);
    CHECK(cfg.system.n_particles == 4000);
    CHECK(cfg.system.geometry.kind == Geometry::Kind::Interfacial);
    CHECK(cfg.system.geometry.box_z == doctest::Approx(44.04));
    CHECK(cfg.system.n_procs == 8);
    CHECK(cfg.accuracy.mode == AccuracySpec::Mode::Combined);
    CHECK(cfg.accuracy.threshold == doctest::Approx(5e-4));
    CHECK(cfg.sampler_kind == TuneConfig::SamplerKind::Synthetic);
    CHECK(cfg.synthetic.recip.at(5).b == doctest::Approx(8.33e-5));
    CHECK(cfg.synthetic.rng_seed == 42);
    CHECK(cfg.synthetic.n_procs == 8); // inherited from the system
    CHECK(cfg.recip_error.kind == RecipErrorSpec::Kind::Surrogate);
    CHECK(cfg.recip_error.ck == doctest::Approx(1.0));
    CHECK(cfg.variants == std::vector<Variant>{Variant::ad});
    REQUIRE(cfg.baseline.has_value());
    CHECK(cfg.baseline->grid == GridSize{12, 12, 192});
    CHECK(cfg.output_dir == std::filesystem::path("out"));
}

TEST_CASE("minimal config fills defaults") {
    auto cfg = parse_tune_config(R"json({
      "schema": 1,
      "system": {"domain": [10, 10, 10], "n_particles": 1000},
      "accuracy": {"mode": "split", "real_threshold": 1e-3, "recip_threshold": 0.1}
    })json");
    CHECK(cfg.ranges.alpha_step == doctest::Approx(0.01));
    CHECK(cfg.ranges.orders == std::vector<int>{2, 3, 4, 5, 6});
    CHECK(cfg.adaptive.rel_error_threshold == doctest::Approx(0.05));
    CHECK(cfg.adaptive.max_depth == 8);
    CHECK(cfg.sampler_kind == TuneConfig::SamplerKind::Synthetic);
    CHECK(cfg.system.timesteps_per_sample == 1000);
    CHECK(cfg.variants == std::vector<Variant>{Variant::ad});
}

TEST_CASE("config parser rejects malformed input") {
    CHECK_THROWS_AS((void)parse_tune_config("{not json"), ConfigError);
    CHECK_THROWS_AS((void)parse_tune_config(R"json({"schema": 2})json"), ConfigError);
    CHECK_THROWS_AS((void)parse_tune_config(R"json({"schema": 1})json"), ConfigError);
    // bad geometry kind
    CHECK_THROWS_AS((void)parse_tune_config(R"json({
      "schema": 1,
      "system": {"domain": [10, 10, 10], "n_particles": 100,
                 "geometry": "spherical"},
      "accuracy": {"mode": "combined", "threshold": 1e-4}
    })json"),
                    ConfigError);
    // negative threshold
    CHECK_THROWS_AS((void)parse_tune_config(R"json({
      "schema": 1,
      "system": {"domain": [10, 10, 10], "n_particles": 100},
      "accuracy": {"mode": "combined", "threshold": -1.0}
    })json"),
                    ConfigError);
    // unknown variant
    CHECK_THROWS_AS((void)parse_tune_config(R"json({
      "schema": 1,
      "system": {"domain": [10, 10, 10], "n_particles": 100},
      "accuracy": {"mode": "combined", "threshold": 1e-4},
      "variants": ["xy"]
    })json"),
                    ConfigError);
    // external sampler needs a template
    CHECK_THROWS_AS((void)parse_tune_config(R"json({
      "schema": 1,
      "system": {"domain": [10, 10, 10], "n_particles": 100},
      "accuracy": {"mode": "combined", "threshold": 1e-4},
      "sampler": {"type": "external"}
    })json"),
                    ConfigError);
    CHECK_THROWS_AS(load_tune_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("format_sig6 caps significant digits") {
    CHECK(format_sig6(8.378) == "8.378");
    CHECK(format_sig6(0.56) == "0.56");
    CHECK(format_sig6(1.0 / 3.0) == "0.333333");
    CHECK(format_sig6(16000.0) == "16000");
    CHECK(format_sig6(8.33e-5) == "8.33e-05");
}

TEST_CASE("samples CSV round-trips with repeat indices") {
    auto dir = scratch_dir("samples");
    std::vector<SampleRecord> samples;
    Configuration cfg;
    cfg.alpha = 0.5;
    cfg.cutoff = 2.0;
    cfg.order = 5;
    cfg.grid = {10, 10, 160};
    samples.push_back({cfg, Phase::ReciprocalSpace, 3.6428, 0});
    samples.push_back({cfg, Phase::ReciprocalSpace, 3.7001, 1});
    cfg.grid = {1, 1, 1};
    cfg.order = 2;
    samples.push_back({cfg, Phase::RealSpace, 4.056, 0});

    write_samples_csv(dir / "samples.csv", samples);
    auto text = read_file(dir / "samples.csv");
    CHECK(text.rfind("alpha,cutoff,order,nx,ny,nz,phase,seconds\n", 0) == 0);
    CHECK(text.find("\r") == std::string::npos); // LF endings

    auto loaded = read_samples_csv(dir / "samples.csv");
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0].seconds == doctest::Approx(3.6428));
    CHECK(loaded[0].repeat_index == 0);
    CHECK(loaded[1].repeat_index == 1); // same config and phase
    CHECK(loaded[2].repeat_index == 0);
    CHECK(loaded[2].phase == Phase::RealSpace);

    write_file(dir / "bad.csv", "alpha,cutoff\n");
    CHECK_THROWS_AS((void)read_samples_csv(dir / "bad.csv"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("subspace CSV carries intervals and frontier flags") {
    auto space = build_search_space(small_interface_system(), ParameterRanges{});
    AccurateSubspace sub;
    sub.space = space;
    sub.points = {{0, 0, 0, 2, 7}, {0, 1, 0, 2, 9}};
    Frontier frontier;
    frontier.points = {sub.points[0]};

    auto dir = scratch_dir("subspace");
    write_subspace_csv(dir / "subspace.csv", sub, frontier);
    auto text = read_file(dir / "subspace.csv");
    CHECK(text.rfind("cutoff,nx,ny,nz,order,alpha_lo,alpha_hi,on_frontier\n", 0) ==
          0);
    CHECK(text.find(",1\n") != std::string::npos);
    CHECK(text.find(",0\n") != std::string::npos);
    CHECK(text.find("0.03") != std::string::npos); // alpha_lo = alphas[2]
    std::filesystem::remove_all(dir);
}

TEST_CASE("report writing is atomic: no temp file survives") {
    auto dir = scratch_dir("report");
    TuneOutcome outcome;
    VariantResult vr;
    vr.variant = Variant::ad;
    Prediction p;
    p.cutoff = 4.6;
    p.grid = {10, 10, 160};
    p.order = 4;
    p.alpha_lo = 0.5;
    p.alpha_hi = 0.62;
    p.chosen_alpha = 0.56;
    p.est_seconds = 8.378;
    vr.ranking = {p};
    vr.samples_used = 37;
    vr.subspace_size = 100;
    outcome.variants = {vr};

    write_report_json(dir / "report.json", outcome);
    write_frontier_csv(dir / "frontier.csv", outcome.variants.front());
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "frontier.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "report.json.tmp"));
    CHECK_FALSE(std::filesystem::exists(dir / "frontier.csv.tmp"));

    auto text = read_file(dir / "report.json");
    CHECK(text.find("\"predicted_seconds\": 8.378") != std::string::npos);
    CHECK(text.find("\"variant\": \"ad\"") != std::string::npos);
    auto csv = read_file(dir / "frontier.csv");
    CHECK(csv.rfind("rank,predicted_seconds,alpha,cutoff,order,nx,ny,nz,"
                    "extrapolated\n",
                    0) == 0);
    CHECK(csv.find("1,8.378,0.56,4.6,4,10,10,160,0\n") != std::string::npos);
    std::filesystem::remove_all(dir);
}
