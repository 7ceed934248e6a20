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
#ifndef PARETUNE_MODELING_HPP
#define PARETUNE_MODELING_HPP

#include <map>
#include <span>
#include <vector>

#include "paretune/accuracy.hpp"
#include "paretune/param_space.hpp"

namespace paretune {

/// One timed point of a series.
struct XY {
    double x = 0.0;
    double y = 0.0;
};

/// Basis of the two-parameter cost laws: {1, x^3} or {1, x}.
enum class BasisFamily { Cubic, Linear };

/// Real-space cost law f(c) = a + b*c^3; a is the setup overhead.
struct CubicFit {
    double a = 0.0; // seconds
    double b = 0.0; // seconds / sigma^3
    double eval(double cutoff) const { return a + b * cutoff * cutoff * cutoff; }
};

/// Reciprocal-space cost law h(g) = p + b*g; p is the particle<->grid
/// mapping overhead, g the number of grid points.
struct LinearFit {
    double p = 0.0; // seconds
    double b = 0.0; // seconds / grid point
    double eval(double grid_points) const { return p + b * grid_points; }
};

/// Closed-form least squares on basis {1, c^3}. Exact interpolation for two
/// distinct points; DegenerateFit when all abscissae coincide. Warns (but
/// does not fail) on a negative slope.
CubicFit fit_cubic(std::span<const XY> points);

/// Same, on basis {1, g}.
LinearFit fit_linear(std::span<const XY> points);

/// Contiguous piecewise model over a sampled range. breakpoints[i] is the
/// position where segment i+1 begins; a point exactly on a breakpoint
/// belongs to the right segment. Outside the sampled range the first/last
/// segment extrapolates.
struct PiecewiseModel {
    struct Segment {
        double intercept = 0.0;
        double slope = 0.0;
    };
    BasisFamily family = BasisFamily::Linear;
    std::vector<double> breakpoints;
    std::vector<Segment> segments;

    double eval(double x) const;

    static PiecewiseModel constant(BasisFamily family, double value);
};

/// Classic top-down segmentation: recursively split at the point minimizing
/// the summed per-segment SSE (in relative-error units) until each segment's
/// average relative error is at or below max_avg_rel_err or segments cannot
/// shrink further. Points must be sorted by strictly increasing x.
PiecewiseModel segment_series(std::span<const XY> points, BasisFamily family,
                              double max_avg_rel_err);

/// Fitted cost models for one tuning run. The reciprocal contribution is
/// modeled per interpolation order at the two cutoff levels present in the
/// accurate subspace and linearly interpolated in cutoff between them.
struct PerfModel {
    PiecewiseModel real_model; // cubic family over cutoff
    struct Level {
        PiecewiseModel at_rc_min;
        PiecewiseModel at_rc_max;
        double min_grid = 0.0; // sampled grid-point range, for extrapolation
        double max_grid = 0.0;
    };
    std::map<int, Level> recip_models;
    double rc_min = 0.0;
    double rc_max = 0.0;
    int n_procs = 1;
};

/// Total time estimate: real_model(cutoff) plus the cutoff-interpolated
/// reciprocal model at g grid points. The cutoff is clamped to
/// [rc_min, rc_max] for the reciprocal term. Throws UncoveredOrder.
double predict(double cutoff, double grid_points, int order,
               const PerfModel& model);

/// One ranked frontier entry.
struct Prediction {
    PerfPoint point;
    double cutoff = 0.0;
    GridSize grid;
    int order = 0;
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    double chosen_alpha = 0.0;
    double est_seconds = 0.0;
    bool extrapolated = false;
};

/// Predictions for every frontier point, ascending in est_seconds; ties
/// break by smaller grid points, then order, then cutoff.
std::vector<Prediction> rank_frontier(const Frontier& frontier,
                                      const AccurateSubspace& sub,
                                      const PerfModel& model);

/// Mean over points of |t_pred - t_emp| / t_pred. Throws LengthMismatch.
double avg_relative_error(std::span<const double> predicted,
                          std::span<const double> empirical);

} // namespace paretune

#endif
