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
#ifndef PARETUNE_CONFIG_HPP
#define PARETUNE_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "paretune/accuracy.hpp"
#include "paretune/param_space.hpp"
#include "paretune/sampling.hpp"
#include "paretune/synth_sim.hpp"

namespace paretune {

struct ExternalSamplerSpec {
    std::string command_template;
    std::string parser_regex;
    double timeout_s = 600.0;
};

/// Which reciprocal-error bound backs the partition step.
struct RecipErrorSpec {
    enum class Kind { Surrogate, Tabulated };
    Kind kind = Kind::Surrogate;
    double ck = 1.0;                  // Surrogate
    std::filesystem::path table_path; // Tabulated
};

/// Reference configuration (e.g. an expert guess) to compare against.
struct BaselineSpec {
    double alpha = 0.5;
    double cutoff = 3.0;
    int order = 5;
    GridSize grid;
};

/// Everything one tuning run needs; loaded from a versioned JSON file.
struct TuneConfig {
    SystemDescription system;
    ParameterRanges ranges;
    AccuracySpec accuracy;

    enum class SamplerKind { Synthetic, External };
    SamplerKind sampler_kind = SamplerKind::Synthetic;
    ExternalSamplerSpec external;
    SynthParams synthetic;

    RecipErrorSpec recip_error;
    AdaptiveParams adaptive;
    std::vector<Variant> variants = {Variant::ad};
    std::optional<BaselineSpec> baseline;
    std::filesystem::path output_dir = ".";

    void validate() const;
};

/// Parses and validates a schema-1 JSON config. Throws ConfigError on any
/// problem (missing file, bad JSON, wrong types, violated invariants).
TuneConfig load_tune_config(const std::filesystem::path& path);

/// Same, from an in-memory JSON string (used by tests).
TuneConfig parse_tune_config(const std::string& json_text);

} // namespace paretune

#endif
