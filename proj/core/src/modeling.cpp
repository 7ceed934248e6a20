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
#include "paretune/modeling.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "paretune/errors.hpp"

namespace paretune {

namespace {

double basis_value(BasisFamily family, double x) {
    return family == BasisFamily::Cubic ? x * x * x : x;
}

// Two-parameter least squares over {1, phi(x)} via the 2x2 normal equations.
PiecewiseModel::Segment ls_fit(BasisFamily family, std::span<const XY> points) {
    if (points.empty()) throw DegenerateFit("fit: no points");
    if (points.size() == 1) return {points[0].y, 0.0};
    double n = double(points.size());
    double su = 0, suu = 0, sy = 0, suy = 0;
    for (const auto& pt : points) {
        double u = basis_value(family, pt.x);
        su += u;
        suu += u * u;
        sy += pt.y;
        suy += u * pt.y;
    }
    double det = n * suu - su * su;
    if (std::abs(det) <= 1e-12 * std::max(1.0, n * suu))
        throw DegenerateFit("fit: all abscissae coincide");
    return {(sy * suu - su * suy) / det, (n * suy - su * sy) / det};
}

double avg_rel_fit_error(BasisFamily family, const PiecewiseModel::Segment& seg,
                         std::span<const XY> points) {
    double sum = 0;
    for (const auto& pt : points) {
        double fit = seg.intercept + seg.slope * basis_value(family, pt.x);
        sum += std::abs(fit - pt.y) / std::abs(pt.y);
    }
    return sum / double(points.size());
}

double rel_sse(BasisFamily family, const PiecewiseModel::Segment& seg,
               std::span<const XY> points) {
    double sum = 0;
    for (const auto& pt : points) {
        double fit = seg.intercept + seg.slope * basis_value(family, pt.x);
        double r = (fit - pt.y) / pt.y;
        sum += r * r;
    }
    return sum;
}

void require_sorted_x(std::span<const XY> points) {
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i - 1].x < points[i].x))
            throw Error("series positions must be strictly increasing");
}

} // namespace

CubicFit fit_cubic(std::span<const XY> points) {
    if (points.size() < 2) throw DegenerateFit("fit_cubic: need at least 2 points");
    auto seg = ls_fit(BasisFamily::Cubic, points);
    if (seg.slope < 0)
        std::cerr << "paretune: warning: fitted cubic slope is negative ("
                  << seg.slope << "); noisy or degenerate samples\n";
    return {seg.intercept, seg.slope};
}

LinearFit fit_linear(std::span<const XY> points) {
    if (points.size() < 2) throw DegenerateFit("fit_linear: need at least 2 points");
    auto seg = ls_fit(BasisFamily::Linear, points);
    return {seg.intercept, seg.slope};
}

double PiecewiseModel::eval(double x) const {
    // Count of breakpoints <= x; a point exactly on a breakpoint falls in
    // the right segment.
    std::size_t s = std::size_t(std::upper_bound(breakpoints.begin(),
                                                 breakpoints.end(), x) -
                                breakpoints.begin());
    const auto& seg = segments[std::min(s, segments.size() - 1)];
    return seg.intercept + seg.slope * basis_value(family, x);
}

PiecewiseModel PiecewiseModel::constant(BasisFamily family, double value) {
    PiecewiseModel m;
    m.family = family;
    m.segments.push_back({value, 0.0});
    return m;
}

namespace {

void segment_rec(std::span<const XY> points, BasisFamily family, double max_err,
                 std::vector<double>& breakpoints,
                 std::vector<PiecewiseModel::Segment>& segments, bool is_first) {
    auto seg = ls_fit(family, points);
    if (points.size() <= 2 ||
        avg_rel_fit_error(family, seg, points) <= max_err) {
        if (!is_first) breakpoints.push_back(points.front().x);
        segments.push_back(seg);
        return;
    }
    // Prefer splits leaving >= 2 points per side; a 3-point segment that
    // still fails degenerates to a pair plus a single exactly fitted point.
    std::size_t n = points.size();
    std::size_t best_k = 1; // left = [0..k], right = [k+1..]
    double best_sse = std::numeric_limits<double>::infinity();
    if (n == 3) {
        best_k = 1;
    } else {
        for (std::size_t k = 1; k + 2 < n; ++k) {
            auto left = points.subspan(0, k + 1);
            auto right = points.subspan(k + 1);
            double sse = rel_sse(family, ls_fit(family, left), left) +
                         rel_sse(family, ls_fit(family, right), right);
            if (sse < best_sse) {
                best_sse = sse;
                best_k = k;
            }
        }
    }
    segment_rec(points.subspan(0, best_k + 1), family, max_err, breakpoints,
                segments, is_first);
    segment_rec(points.subspan(best_k + 1), family, max_err, breakpoints,
                segments, false);
}

} // namespace

PiecewiseModel segment_series(std::span<const XY> points, BasisFamily family,
                              double max_avg_rel_err) {
    if (points.size() < 2)
        throw DegenerateFit("segment_series: need at least 2 points");
    require_sorted_x(points);
    PiecewiseModel model;
    model.family = family;
    segment_rec(points, family, max_avg_rel_err, model.breakpoints,
                model.segments, true);
    return model;
}

double predict(double cutoff, double grid_points, int order,
               const PerfModel& model) {
    auto it = model.recip_models.find(order);
    if (it == model.recip_models.end())
        throw UncoveredOrder("predict: no reciprocal model for order " +
                             std::to_string(order));
    double real = model.real_model.eval(cutoff);
    const auto& level = it->second;
    double recip;
    if (model.rc_max == model.rc_min) {
        recip = level.at_rc_min.eval(grid_points);
    } else {
        double rc = std::clamp(cutoff, model.rc_min, model.rc_max);
        double t = (rc - model.rc_min) / (model.rc_max - model.rc_min);
        recip = (1.0 - t) * level.at_rc_min.eval(grid_points) +
                t * level.at_rc_max.eval(grid_points);
    }
    return real + recip;
}

std::vector<Prediction> rank_frontier(const Frontier& frontier,
                                      const AccurateSubspace& sub,
                                      const PerfModel& model) {
    if (frontier.points.empty())
        throw EmptyAccurateSubspace("rank_frontier: empty frontier");
    std::vector<Prediction> out;
    out.reserve(frontier.points.size());
    for (const auto& p : frontier.points) {
        Prediction pred;
        pred.point = p;
        pred.cutoff = sub.cutoff_of(p);
        pred.grid = sub.grid_of(p);
        pred.order = sub.order_of(p);
        pred.alpha_lo = sub.space.alphas[p.alpha_lo];
        pred.alpha_hi = sub.space.alphas[p.alpha_hi];
        pred.chosen_alpha = sub.space.alphas[sub.chosen_alpha_idx(p)];
        double g = double(pred.grid.total());
        pred.est_seconds = predict(pred.cutoff, g, pred.order, model);
        const auto& level = model.recip_models.at(pred.order);
        pred.extrapolated = g < level.min_grid || g > level.max_grid;
        out.push_back(pred);
    }
    std::sort(out.begin(), out.end(), [](const Prediction& a, const Prediction& b) {
        return std::tuple(a.est_seconds, a.grid.total(), a.order, a.cutoff) <
               std::tuple(b.est_seconds, b.grid.total(), b.order, b.cutoff);
    });
    return out;
}

double avg_relative_error(std::span<const double> predicted,
                          std::span<const double> empirical) {
    if (predicted.size() != empirical.size() || predicted.empty())
        throw LengthMismatch("avg_relative_error: series of equal nonzero "
                             "length required");
    double sum = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        sum += std::abs(predicted[i] - empirical[i]) / std::abs(predicted[i]);
    return sum / double(predicted.size());
}

} // namespace paretune
