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
#ifndef PARETUNE_ACCURACY_HPP
#define PARETUNE_ACCURACY_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "paretune/param_space.hpp"

namespace paretune {

/// Accuracy request: one combined RMS threshold, or independent thresholds
/// for the real-space and reciprocal-space force errors. Units: eps/sigma.
struct AccuracySpec {
    enum class Mode { Combined, Split };
    Mode mode = Mode::Split;
    double threshold = 0.0;       // Combined
    double real_threshold = 0.0;  // Split
    double recip_threshold = 0.0; // Split

    static AccuracySpec combined(double threshold);
    static AccuracySpec split(double real_threshold, double recip_threshold);
    void validate() const;
};

/// Per-configuration force-error estimates (eps/sigma).
struct ErrorEstimate {
    double real_err = 0.0;
    double recip_err = 0.0;
};

/// RMS force-error bound of the real-space contribution.
///
///   C*sqrt(pi)*alpha^5 / sqrt(N*V*r_c)
///     * (6/(r_c*alpha)^6 + 6/(r_c*alpha)^4 + 3/(r_c*alpha)^2 + 1)
///     * exp(-(r_c*alpha)^2)
///
/// Throws NonPositiveParameter unless alpha > 0 and cutoff > 0.
double real_space_error(double alpha, double cutoff,
                        const SystemDescription& system);

/// Seam for the reciprocal-space error bound. Implementations must be
/// monotonically non-decreasing in alpha (the splitting search relies on it)
/// and safe for concurrent eval calls.
class ReciprocalErrorModel {
public:
    virtual ~ReciprocalErrorModel() = default;
    virtual double eval(double alpha, const GridSize& grid, int order,
                        const SystemDescription& system, Variant variant) const = 0;
};

/// Closed-form surrogate: err = ck * alpha * (alpha * h_max)^order with
/// h_max the largest per-dimension mesh spacing. Monotone in alpha by
/// construction; decreasing in order while alpha*h_max < 1.
class SurrogateModel final : public ReciprocalErrorModel {
public:
    explicit SurrogateModel(double ck) : ck_(ck) {}
    double eval(double alpha, const GridSize& grid, int order,
                const SystemDescription& system, Variant variant) const override;
    double ck() const { return ck_; }

private:
    double ck_;
};

/// Error table produced by an external evaluator. Exact-match lookup on
/// (grid, order, alpha) lattice points; missing entries throw.
class TabulatedModel final : public ReciprocalErrorModel {
public:
    /// CSV with header nx,ny,nz,order,alpha,recip_err.
    static TabulatedModel from_csv(const std::filesystem::path& path);

    double eval(double alpha, const GridSize& grid, int order,
                const SystemDescription& system, Variant variant) const override;

    void insert(const GridSize& grid, int order, double alpha, double err);
    std::size_t size() const { return table_.size(); }

private:
    using Key = std::tuple<int, int, int, int, std::int64_t>;
    static std::int64_t alpha_key(double alpha);
    std::map<Key, double> table_;
};

/// Largest discretized alpha per (grid, order) whose reciprocal error stays
/// below the threshold; no entry means no feasible alpha.
struct SplittingAlphaTable {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> alpha_hi;
};

/// Binary search over the alpha lattice for the largest index with
/// model.eval <= recip_threshold. nullopt when even alphas.front() fails.
std::optional<std::size_t> splitting_alpha(const GridSize& grid, int order,
                                           double recip_threshold,
                                           const ReciprocalErrorModel& model,
                                           const SearchSpace& space,
                                           Variant variant = Variant::ad);

/// One accurate point of the 3-D performance space, tagged with its feasible
/// alpha interval (lattice indices, inclusive).
struct PerfPoint {
    std::size_t cutoff_idx = 0;
    std::size_t grid_idx = 0;
    std::size_t order_idx = 0;
    std::size_t alpha_lo = 0;
    std::size_t alpha_hi = 0;

    bool operator==(const PerfPoint&) const = default;
};

/// The accurate subspace: every stored point satisfies the accuracy spec for
/// every alpha in its interval. chosen_alpha is the interval midpoint
/// rounded down to the lattice.
struct AccurateSubspace {
    SearchSpace space;
    std::vector<PerfPoint> points; // ordered by (cutoff, grid, order) index

    std::size_t chosen_alpha_idx(const PerfPoint& p) const {
        return (p.alpha_lo + p.alpha_hi) / 2;
    }
    double cutoff_of(const PerfPoint& p) const { return space.cutoffs[p.cutoff_idx]; }
    const GridSize& grid_of(const PerfPoint& p) const { return space.grids[p.grid_idx]; }
    int order_of(const PerfPoint& p) const { return space.orders[p.order_idx]; }
};

/// Pareto-minimal accurate points under (cutoff, grid points, order).
struct Frontier {
    std::vector<PerfPoint> points; // sorted by (cutoff, grid points, order)
};

/// Splits the space into accurate and inaccurate subspaces.
///
/// Split mode exploits the structure of the bounds: the real-space error
/// falls with alpha (so each cutoff yields a smallest feasible alpha) and
/// the reciprocal error grows with alpha (so each (grid, order) yields a
/// largest one, via splitting_alpha). A perf point is accurate iff the two
/// bounds leave a nonempty alpha interval. Combined mode evaluates the RMS
/// at every lattice alpha; the stored interval is the contiguous feasible
/// run around the RMS minimizer.
///
/// jobs > 1 evaluates (grid, order) cells concurrently; results are
/// identical to the sequential ones. Throws EmptyAccurateSubspace (message
/// reports the smallest violating margins) when nothing qualifies.
AccurateSubspace partition_space(const SearchSpace& space, const AccuracySpec& spec,
                                 const ReciprocalErrorModel& model,
                                 Variant variant = Variant::ad, unsigned jobs = 1);

/// Pareto-minimal points: A dominates B when A.cutoff <= B.cutoff,
/// A.grid_points <= B.grid_points and A.order <= B.order with at least one
/// strict. O(n log n) sweep.
Frontier extract_frontier(const AccurateSubspace& sub);

} // namespace paretune

#endif
