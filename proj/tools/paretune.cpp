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
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "paretune/errors.hpp"
#include "paretune/pipeline.hpp"
#include "paretune/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace paretune;

constexpr int kExitConfig = 2;
constexpr int kExitEmptySubspace = 3;
constexpr int kExitSampler = 4;

fs::path resolve_out_dir(const TuneConfig& config, const std::string& out_flag) {
    fs::path dir = out_flag.empty() ? config.output_dir : fs::path(out_flag);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() +
                              ": " + ec.message());
    return dir;
}

void print_variant_summary(const VariantResult& vr) {
    const auto& best = vr.chosen();
    std::cout << "variant " << variant_name(vr.variant) << ": alpha="
              << format_sig6(best.chosen_alpha) << " cutoff="
              << format_sig6(best.cutoff) << " order=" << best.order << " grid="
              << best.grid.str() << " predicted "
              << format_sig6(best.est_seconds) << " s"
              << "  (frontier " << vr.ranking.size() << ", samples "
              << vr.samples_used << ", wall " << format_sig6(vr.wall_time_s)
              << " s)\n";
    if (vr.baseline)
        std::cout << "  baseline: predicted "
                  << format_sig6(vr.baseline->predicted_seconds)
                  << " s, speedup " << format_sig6(vr.baseline->speedup)
                  << "x\n";
}

void write_tune_outputs(const fs::path& dir, const TuneOutcome& outcome,
                        bool with_samples) {
    write_report_json(dir / "report.json", outcome);
    write_frontier_csv(dir / "frontier.csv", outcome.variants.front());
    if (outcome.variants.size() > 1)
        for (const auto& vr : outcome.variants)
            write_frontier_csv(dir / (std::string("frontier_") +
                                      variant_name(vr.variant) + ".csv"),
                               vr);
    if (with_samples)
        for (const auto& vr : outcome.variants) {
            auto name = outcome.variants.size() == 1
                            ? std::string("samples.csv")
                            : std::string("samples_") +
                                  variant_name(vr.variant) + ".csv";
            write_samples_csv(dir / name, vr.samples);
        }
    write_meta_json(dir / "tuning_meta.json", outcome);
}

int cmd_tune(const std::string& config_path, const std::string& out_flag,
             unsigned jobs) {
    TuneConfig config = load_tune_config(config_path);
    fs::path dir = resolve_out_dir(config, out_flag);
    TuneOutcome outcome = run_tune(config, {jobs});
    write_tune_outputs(dir, outcome, true);
    for (const auto& vr : outcome.variants) print_variant_summary(vr);
    std::cout << "report written to " << (dir / "report.json").string() << "\n";
    return 0;
}

int cmd_partition(const std::string& config_path, const std::string& out_flag,
                  unsigned jobs) {
    TuneConfig config = load_tune_config(config_path);
    fs::path dir = resolve_out_dir(config, out_flag);
    PartitionOutcome out = run_partition(config, {jobs});
    write_subspace_csv(dir / "subspace.csv", out.subspace, out.frontier);
    std::uint64_t perf_points = std::uint64_t(out.space.cutoffs.size()) *
                                out.space.grids.size() * out.space.orders.size();
    std::cout << "search space: " << out.space.logical_size()
              << " configurations (" << out.space.alphas.size() << " alphas x "
              << out.space.cutoffs.size() << " cutoffs x "
              << out.space.grids.size() << " grids x "
              << out.space.orders.size() << " orders)\n"
              << "performance points: " << perf_points << "\n"
              << "accurate: " << out.subspace.points.size() << "\n"
              << "frontier: " << out.frontier.points.size() << "\n"
              << "subspace written to " << (dir / "subspace.csv").string()
              << "\n";
    return 0;
}

int cmd_predict(const std::string& config_path, const std::string& samples_path,
                const std::string& out_flag, unsigned jobs) {
    TuneConfig config = load_tune_config(config_path);
    fs::path dir = resolve_out_dir(config, out_flag);
    auto samples = read_samples_csv(samples_path);
    TuneOutcome outcome = run_predict(config, samples, {jobs});
    write_tune_outputs(dir, outcome, false);
    for (const auto& vr : outcome.variants) print_variant_summary(vr);
    std::cout << "report written to " << (dir / "report.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"paretune: accuracy-constrained parameter auto-tuner for "
                 "mesh-Ewald-style solvers"};
    app.require_subcommand(1);

    std::string config_path, samples_path, out_dir;
    unsigned jobs = 0;
    app.add_option("--jobs,-j", jobs,
                   "max concurrent sampler invocations (0 = auto)");
    app.add_option("--out,-o", out_dir, "output directory (overrides config)");

    auto* tune = app.add_subcommand("tune", "run the full tuning pipeline");
    tune->fallthrough();
    tune->add_option("config", config_path, "JSON config file")->required();

    auto* partition =
        app.add_subcommand("partition", "partition the space and export it");
    partition->fallthrough();
    partition->add_option("config", config_path, "JSON config file")->required();

    auto* predict =
        app.add_subcommand("predict", "rank the frontier from recorded samples");
    predict->fallthrough();
    predict->add_option("config", config_path, "JSON config file")->required();
    predict->add_option("samples", samples_path, "samples CSV file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(tune)) return cmd_tune(config_path, out_dir, jobs);
        if (app.got_subcommand(partition))
            return cmd_partition(config_path, out_dir, jobs);
        return cmd_predict(config_path, samples_path, out_dir, jobs);
    } catch (const EmptyAccurateSubspace& e) {
        std::cerr << "paretune: partition stage: " << e.what() << "\n";
        return kExitEmptySubspace;
    } catch (const SamplerFailure& e) {
        std::cerr << "paretune: sampling stage: " << e.what() << "\n";
        return kExitSampler;
    } catch (const ConfigError& e) {
        std::cerr << "paretune: config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MissingCoverage& e) {
        std::cerr << "paretune: modeling stage: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "paretune: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "paretune: unexpected error: " << e.what() << "\n";
        return 1;
    }
}
