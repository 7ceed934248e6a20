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
#ifndef PARETUNE_REPORT_HPP
#define PARETUNE_REPORT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "paretune/accuracy.hpp"
#include "paretune/config.hpp"
#include "paretune/modeling.hpp"
#include "paretune/sampling.hpp"

namespace paretune {

struct BaselineResult {
    BaselineSpec config;
    double predicted_seconds = 0.0;
    double speedup = 0.0; // baseline time / chosen time
};

/// Outcome of one variant's tuning pass.
struct VariantResult {
    Variant variant = Variant::ad;
    std::size_t subspace_size = 0;
    std::vector<Prediction> ranking; // ascending predicted time
    std::size_t samples_used = 0;
    double wall_time_s = 0.0;
    std::optional<BaselineResult> baseline;
    std::vector<SampleRecord> samples;

    const Prediction& chosen() const { return ranking.front(); }
};

struct TuneOutcome {
    std::vector<VariantResult> variants;
};

/// Shortest formatting capped at 6 significant digits ("%.6g").
std::string format_sig6(double v);

/// report.json: one object per variant, sorted keys, floats rounded through
/// format_sig6. Deterministic for a fixed config and seed; written via a
/// temp file and rename so failures leave no partial report.
void write_report_json(const std::filesystem::path& path, const TuneOutcome& outcome);

/// frontier.csv: rank,predicted_seconds,alpha,cutoff,order,nx,ny,nz,extrapolated
void write_frontier_csv(const std::filesystem::path& path, const VariantResult& result);

/// subspace.csv: cutoff,nx,ny,nz,order,alpha_lo,alpha_hi,on_frontier
void write_subspace_csv(const std::filesystem::path& path, const AccurateSubspace& sub,
                        const Frontier& frontier);

/// samples.csv: alpha,cutoff,order,nx,ny,nz,phase,seconds
void write_samples_csv(const std::filesystem::path& path,
                       const std::vector<SampleRecord>& samples);
std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path);

/// Non-deterministic run metadata (wall times), kept out of report.json so
/// reports stay byte-identical across reruns.
void write_meta_json(const std::filesystem::path& path, const TuneOutcome& outcome);

} // namespace paretune

#endif
