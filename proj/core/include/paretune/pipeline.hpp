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
#ifndef PARETUNE_PIPELINE_HPP
#define PARETUNE_PIPELINE_HPP

#include <filesystem>
#include <memory>

#include "paretune/config.hpp"
#include "paretune/report.hpp"

namespace paretune {

/// jobs == 0 picks a default: hardware concurrency for samplers that allow
/// concurrent calls, otherwise 1.
struct RunOptions {
    unsigned jobs = 0;
};

std::unique_ptr<ReciprocalErrorModel> make_recip_model(const TuneConfig& config);
std::unique_ptr<Sampler> make_sampler(const TuneConfig& config);

/// Full tuning pass: partition, frontier, adaptive sampling, fitting,
/// ranking — one VariantResult per requested variant.
TuneOutcome run_tune(const TuneConfig& config, const RunOptions& options = {});

/// Partition only (first variant): the accurate subspace and its frontier.
struct PartitionOutcome {
    SearchSpace space;
    AccurateSubspace subspace;
    Frontier frontier;
};
PartitionOutcome run_partition(const TuneConfig& config,
                               const RunOptions& options = {});

/// Offline re-ranking from pre-recorded samples; never invokes a sampler.
/// Throws MissingCoverage when a frontier order has no samples.
TuneOutcome run_predict(const TuneConfig& config,
                        const std::vector<SampleRecord>& samples,
                        const RunOptions& options = {});

/// Builds the per-variant performance model from arbitrary sample records
/// (grouped by phase/order/cutoff level, repeats aggregated by median).
/// Exposed for run_predict and tests.
PerfModel build_model_from_samples(const std::vector<SampleRecord>& samples,
                                   const Frontier& frontier,
                                   const AccurateSubspace& sub,
                                   double max_avg_rel_err);

} // namespace paretune

#endif
