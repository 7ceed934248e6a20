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
#include "paretune/accuracy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "paretune/errors.hpp"

namespace paretune {

AccuracySpec AccuracySpec::combined(double threshold) {
    AccuracySpec s;
    s.mode = Mode::Combined;
    s.threshold = threshold;
    return s;
}

AccuracySpec AccuracySpec::split(double real_threshold, double recip_threshold) {
    AccuracySpec s;
    s.mode = Mode::Split;
    s.real_threshold = real_threshold;
    s.recip_threshold = recip_threshold;
    return s;
}

void AccuracySpec::validate() const {
    if (mode == Mode::Combined) {
        if (threshold <= 0) throw ConfigError("accuracy: threshold must be positive");
    } else {
        if (real_threshold <= 0 || recip_threshold <= 0)
            throw ConfigError("accuracy: thresholds must be positive");
    }
}

double real_space_error(double alpha, double cutoff,
                        const SystemDescription& system) {
    if (alpha <= 0)
        throw NonPositiveParameter("real_space_error: alpha must be positive");
    if (cutoff <= 0)
        throw NonPositiveParameter("real_space_error: cutoff must be positive");
    const double ra2 = (cutoff * alpha) * (cutoff * alpha);
    const double poly =
        6.0 / (ra2 * ra2 * ra2) + 6.0 / (ra2 * ra2) + 3.0 / ra2 + 1.0;
    const double prefactor = system.dispersion_coeff * std::sqrt(std::numbers::pi) *
                             std::pow(alpha, 5) /
                             std::sqrt(double(system.n_particles) *
                                       system.volume() * cutoff);
    return prefactor * poly * std::exp(-ra2);
}

double SurrogateModel::eval(double alpha, const GridSize& grid, int order,
                            const SystemDescription& system, Variant) const {
    const double h_max = std::max({system.domain_x / grid.nx,
                                   system.domain_y / grid.ny,
                                   system.domain_z / grid.nz});
    return ck_ * alpha * std::pow(alpha * h_max, double(order));
}

std::int64_t TabulatedModel::alpha_key(double alpha) {
    return std::llround(alpha * 1e9);
}

void TabulatedModel::insert(const GridSize& grid, int order, double alpha,
                            double err) {
    table_[{grid.nx, grid.ny, grid.nz, order, alpha_key(alpha)}] = err;
}

double TabulatedModel::eval(double alpha, const GridSize& grid, int order,
                            const SystemDescription&, Variant) const {
    auto it = table_.find({grid.nx, grid.ny, grid.nz, order, alpha_key(alpha)});
    if (it == table_.end()) {
        std::ostringstream os;
        os << "tabulated model: no entry for grid " << grid.str() << " order "
           << order << " alpha " << alpha;
        throw MissingTableEntry(os.str());
    }
    return it->second;
}

TabulatedModel TabulatedModel::from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open error table: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("error table is empty: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "nx,ny,nz,order,alpha,recip_err")
        throw ConfigError("error table header must be "
                          "'nx,ny,nz,order,alpha,recip_err': " + path.string());
    TabulatedModel model;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        double values[6];
        for (int i = 0; i < 6; ++i) {
            if (!std::getline(row, field, ','))
                throw ConfigError("error table line " + std::to_string(lineno) +
                                  ": expected 6 fields");
            try {
                values[i] = std::stod(field);
            } catch (const std::exception&) {
                throw ConfigError("error table line " + std::to_string(lineno) +
                                  ": bad number '" + field + "'");
            }
        }
        model.insert(GridSize{int(values[0]), int(values[1]), int(values[2])},
                     int(values[3]), values[4], values[5]);
    }
    return model;
}

std::optional<std::size_t> splitting_alpha(const GridSize& grid, int order,
                                           double recip_threshold,
                                           const ReciprocalErrorModel& model,
                                           const SearchSpace& space,
                                           Variant variant) {
    const auto& alphas = space.alphas;
    auto err_at = [&](std::size_t i) {
        return model.eval(alphas[i], grid, order, space.system, variant);
    };
    if (err_at(0) > recip_threshold) return std::nullopt;
    // Invariant: alphas[lo] feasible. Monotonicity of the model makes the
    // largest feasible index well defined.
    std::size_t lo = 0, hi = alphas.size() - 1;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo + 1) / 2;
        if (err_at(mid) <= recip_threshold)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

namespace {

// Runs fn(k) for k in [0, n) across at most `jobs` worker tasks. The caller
// writes results into pre-sized slots, so the outcome is order-independent.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < n; k = next.fetch_add(1)) fn(k);
    };
    std::vector<std::future<void>> tasks;
    unsigned workers = std::min<std::size_t>(jobs, n);
    tasks.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        tasks.push_back(std::async(std::launch::async, worker));
    for (auto& t : tasks) t.get(); // rethrows worker exceptions
}

struct AlphaInterval {
    std::size_t lo, hi;
};

} // namespace

AccurateSubspace partition_space(const SearchSpace& space, const AccuracySpec& spec,
                                 const ReciprocalErrorModel& model,
                                 Variant variant, unsigned jobs) {
    spec.validate();
    const std::size_t n_alpha = space.alphas.size();
    const std::size_t n_cut = space.cutoffs.size();
    const std::size_t n_grid = space.grids.size();
    const std::size_t n_ord = space.orders.size();
    const std::size_t n_cells = n_grid * n_ord;

    AccurateSubspace sub;
    sub.space = space;

    if (spec.mode == AccuracySpec::Mode::Split) {
        // Real side: the error falls with alpha, so each cutoff has a
        // smallest feasible lattice index (scanned, not assumed).
        std::vector<std::optional<std::size_t>> alpha_lo(n_cut);
        double best_real = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < n_cut; ++c) {
            for (std::size_t a = 0; a < n_alpha; ++a) {
                double err = real_space_error(space.alphas[a], space.cutoffs[c],
                                              space.system);
                best_real = std::min(best_real, err);
                if (err <= spec.real_threshold) {
                    alpha_lo[c] = a;
                    break;
                }
            }
        }
        // Reciprocal side: splitting value per (grid, order) cell.
        std::vector<std::optional<std::size_t>> cell_hi(n_cells);
        parallel_for(n_cells, jobs, [&](std::size_t cell) {
            std::size_t g = cell / n_ord, o = cell % n_ord;
            cell_hi[cell] = splitting_alpha(space.grids[g], space.orders[o],
                                            spec.recip_threshold, model, space,
                                            variant);
        });
        SplittingAlphaTable table;
        for (std::size_t g = 0; g < n_grid; ++g)
            for (std::size_t o = 0; o < n_ord; ++o)
                if (auto hi = cell_hi[g * n_ord + o])
                    table.alpha_hi[{g, o}] = *hi;
        for (std::size_t c = 0; c < n_cut; ++c) {
            if (!alpha_lo[c]) continue;
            for (std::size_t g = 0; g < n_grid; ++g)
                for (std::size_t o = 0; o < n_ord; ++o) {
                    auto it = table.alpha_hi.find({g, o});
                    if (it != table.alpha_hi.end() && *alpha_lo[c] <= it->second)
                        sub.points.push_back({c, g, o, *alpha_lo[c], it->second});
                }
        }
        if (sub.points.empty()) {
            double best_recip = std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g < n_grid; ++g)
                for (std::size_t o = 0; o < n_ord; ++o)
                    best_recip = std::min(
                        best_recip, model.eval(space.alphas.front(), space.grids[g],
                                               space.orders[o], space.system, variant));
            std::ostringstream os;
            os << "no accurate configuration: smallest real-space error " << best_real
               << " (threshold " << spec.real_threshold
               << "), smallest reciprocal-space error at alpha_min " << best_recip
               << " (threshold " << spec.recip_threshold << ")";
            throw EmptyAccurateSubspace(os.str());
        }
        return sub;
    }

    // Combined mode: evaluate the RMS at every lattice alpha; the RMS of a
    // falling and a rising error is not monotone, so no interval shortcut.
    std::vector<std::vector<std::optional<AlphaInterval>>> cell_intervals(n_cells);
    std::vector<double> cell_best_rms(n_cells,
                                      std::numeric_limits<double>::infinity());
    parallel_for(n_cells, jobs, [&](std::size_t cell) {
        std::size_t g = cell / n_ord, o = cell % n_ord;
        auto& per_cutoff = cell_intervals[cell];
        per_cutoff.resize(n_cut);
        std::vector<double> recip(n_alpha);
        for (std::size_t a = 0; a < n_alpha; ++a)
            recip[a] = model.eval(space.alphas[a], space.grids[g], space.orders[o],
                                  space.system, variant);
        std::vector<double> rms(n_alpha);
        for (std::size_t c = 0; c < n_cut; ++c) {
            std::size_t arg_min = 0;
            for (std::size_t a = 0; a < n_alpha; ++a) {
                double real = real_space_error(space.alphas[a], space.cutoffs[c],
                                               space.system);
                rms[a] = std::hypot(real, recip[a]);
                if (rms[a] < rms[arg_min]) arg_min = a;
            }
            cell_best_rms[cell] = std::min(cell_best_rms[cell], rms[arg_min]);
            if (rms[arg_min] > spec.threshold) continue;
            // Store the contiguous feasible run around the minimizer.
            std::size_t lo = arg_min, hi = arg_min;
            while (lo > 0 && rms[lo - 1] <= spec.threshold) --lo;
            while (hi + 1 < n_alpha && rms[hi + 1] <= spec.threshold) ++hi;
            per_cutoff[c] = AlphaInterval{lo, hi};
        }
    });
    for (std::size_t c = 0; c < n_cut; ++c)
        for (std::size_t g = 0; g < n_grid; ++g)
            for (std::size_t o = 0; o < n_ord; ++o) {
                const auto& iv = cell_intervals[g * n_ord + o][c];
                if (iv) sub.points.push_back({c, g, o, iv->lo, iv->hi});
            }
    if (sub.points.empty()) {
        double best = *std::min_element(cell_best_rms.begin(), cell_best_rms.end());
        std::ostringstream os;
        os << "no accurate configuration: smallest combined RMS error " << best
           << " exceeds threshold " << spec.threshold;
        throw EmptyAccurateSubspace(os.str());
    }
    return sub;
}

namespace {

// Fenwick tree holding prefix minima of interpolation orders, indexed by the
// rank of the grid-point total.
class PrefixMin {
public:
    explicit PrefixMin(std::size_t n)
        : tree_(n + 1, std::numeric_limits<int>::max()) {}

    void update(std::size_t rank, int value) {
        for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1))
            tree_[i] = std::min(tree_[i], value);
    }
    int query(std::size_t rank) const {
        int best = std::numeric_limits<int>::max();
        for (std::size_t i = rank + 1; i > 0; i -= i & (~i + 1))
            best = std::min(best, tree_[i]);
        return best;
    }

private:
    std::vector<int> tree_;
};

} // namespace

Frontier extract_frontier(const AccurateSubspace& sub) {
    if (sub.points.empty())
        throw EmptyAccurateSubspace("extract_frontier: empty accurate subspace");

    struct Entry {
        double cutoff;
        std::int64_t total;
        int order;
        std::size_t point_idx;
    };
    std::vector<Entry> entries;
    entries.reserve(sub.points.size());
    for (std::size_t i = 0; i < sub.points.size(); ++i) {
        const auto& p = sub.points[i];
        entries.push_back({sub.cutoff_of(p), sub.grid_of(p).total(),
                           sub.order_of(p), i});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tuple(a.cutoff, a.total, a.order) <
               std::tuple(b.cutoff, b.total, b.order);
    });

    std::vector<std::int64_t> totals;
    totals.reserve(entries.size());
    for (const auto& e : entries) totals.push_back(e.total);
    std::sort(totals.begin(), totals.end());
    totals.erase(std::unique(totals.begin(), totals.end()), totals.end());
    auto rank_of = [&](std::int64_t t) {
        return std::size_t(std::lower_bound(totals.begin(), totals.end(), t) -
                           totals.begin());
    };

    // Sweep in lex order: every potential dominator of an entry appears
    // earlier. Entries with identical (cutoff, total, order) do not dominate
    // one another, so each equal group is queried before it is inserted.
    PrefixMin seen(totals.size());
    Frontier frontier;
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i;
        while (j < entries.size() && entries[j].cutoff == entries[i].cutoff &&
               entries[j].total == entries[i].total &&
               entries[j].order == entries[i].order)
            ++j;
        for (std::size_t k = i; k < j; ++k)
            if (seen.query(rank_of(entries[k].total)) > entries[k].order)
                frontier.points.push_back(sub.points[entries[k].point_idx]);
        for (std::size_t k = i; k < j; ++k)
            seen.update(rank_of(entries[k].total), entries[k].order);
        i = j;
    }
    return frontier;
}

} // namespace paretune
