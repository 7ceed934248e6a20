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
#ifndef PARETUNE_ERRORS_HPP
#define PARETUNE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace paretune {

/// Base class for all paretune errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user input: config file, ranges, table contents.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// alpha <= 0 or cutoff <= 0 passed to an error-bound formula.
class NonPositiveParameter : public Error {
public:
    using Error::Error;
};

/// No grid satisfies the grid-point bound for the given system.
class EmptyGridSet : public Error {
public:
    using Error::Error;
};

/// No configuration satisfies the accuracy thresholds.
class EmptyAccurateSubspace : public Error {
public:
    using Error::Error;
};

/// Least-squares fit requested on degenerate abscissae.
class DegenerateFit : public Error {
public:
    using Error::Error;
};

/// Prediction requested for an interpolation order without a fitted model.
class UncoveredOrder : public Error {
public:
    using Error::Error;
};

/// Paired series of different lengths.
class LengthMismatch : public Error {
public:
    using Error::Error;
};

/// Generator asked for an interpolation order with no coefficients.
class UnknownOrder : public Error {
public:
    using Error::Error;
};

/// A frontier order has no samples to fit a model from.
class MissingCoverage : public Error {
public:
    using Error::Error;
};

/// Tabulated reciprocal-error lookup on a point not in the table.
class MissingTableEntry : public Error {
public:
    using Error::Error;
};

/// Any failure while measuring: spawn, parse, or nonsense timing.
class SamplerFailure : public Error {
public:
    using Error::Error;
};

/// Command could not be spawned, timed out, or exited nonzero.
class SpawnError : public SamplerFailure {
public:
    using SamplerFailure::SamplerFailure;
};

/// Command output did not yield a number under the parser rule.
class ParseError : public SamplerFailure {
public:
    using SamplerFailure::SamplerFailure;
};

/// Parsed timing was zero or negative.
class NonPositiveTime : public SamplerFailure {
public:
    using SamplerFailure::SamplerFailure;
};

} // namespace paretune

#endif
