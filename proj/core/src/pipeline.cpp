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
#include "paretune/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <iostream>
#include <mutex>
#include <thread>

#include "paretune/errors.hpp"
#include "paretune/synth_sim.hpp"

namespace paretune {

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Records every measurement and assigns repeat indices per (config, phase).
class RecordingSampler final : public Sampler {
public:
    explicit RecordingSampler(Sampler& inner) : inner_(inner) {}

    double measure(const Configuration& config, Phase phase,
                   int timesteps) override {
        double seconds = inner_.measure(config, phase, timesteps);
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::tuple(config.alpha, config.cutoff, config.order,
                              config.grid.nx, config.grid.ny, config.grid.nz,
                              int(config.variant), int(phase));
        int repeat = repeat_counts_[key]++;
        records_.push_back({config, phase, seconds, repeat});
        return seconds;
    }
    bool concurrent_ok() const override { return inner_.concurrent_ok(); }

    std::vector<SampleRecord> take_records() {
        std::lock_guard<std::mutex> lock(mutex_);
        return std::move(records_);
    }
    std::size_t count() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return records_.size();
    }

private:
    Sampler& inner_;
    mutable std::mutex mutex_;
    std::vector<SampleRecord> records_;
    std::map<std::tuple<double, double, int, int, int, int, int, int>, int>
        repeat_counts_;
};

void run_tasks(std::size_t n, unsigned jobs,
               const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < n; k = next.fetch_add(1))
            fn(k);
    };
    std::vector<std::future<void>> tasks;
    unsigned workers = unsigned(std::min<std::size_t>(jobs, n));
    tasks.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        tasks.push_back(std::async(std::launch::async, worker));
    for (auto& t : tasks) t.get();
}

unsigned hardware_jobs() {
    unsigned n = std::thread::hardware_concurrency();
    return n ? n : 1;
}

// Sorted series positions for the real-space pass: the 0.5-sigma probe
// anchors that fall inside the accurate cutoff range, plus its endpoints.
std::vector<double> real_space_positions(const SearchSpace& space, double rc_min,
                                         double rc_max) {
    std::vector<double> xs;
    for (const auto& cfg : static_real_plan(space))
        if (cfg.cutoff >= rc_min - 1e-9 && cfg.cutoff <= rc_max + 1e-9)
            xs.push_back(cfg.cutoff);
    xs.push_back(rc_min);
    xs.push_back(rc_max);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             xs.end());
    return xs;
}

PiecewiseModel model_from_series(const std::map<std::size_t, double>& series,
                                 const std::vector<double>& xs,
                                 BasisFamily family, double max_avg_rel_err) {
    std::vector<XY> points;
    points.reserve(series.size());
    for (const auto& [idx, seconds] : series) points.push_back({xs[idx], seconds});
    if (points.size() == 1)
        return PiecewiseModel::constant(family, points.front().y);
    return segment_series(points, family, max_avg_rel_err);
}

struct RecipSeriesSpec {
    int order = 0;
    double rc = 0.0;
    bool is_min_level = true;
    std::vector<double> totals;             // strictly increasing positions
    std::vector<std::size_t> grid_for_total; // grid idx per position
};

PerfModel assemble_recip_models(
    const SearchSpace& space, const DynamicRecipPlan& plan,
    const std::vector<RecipSeriesSpec>& specs,
    const std::vector<PiecewiseModel>& fitted, PiecewiseModel real_model) {
    PerfModel model;
    model.real_model = std::move(real_model);
    model.rc_min = plan.rc_min;
    model.rc_max = plan.rc_max;
    model.n_procs = space.system.n_procs;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        auto& level = model.recip_models[specs[i].order];
        level.min_grid = specs[i].totals.front();
        level.max_grid = specs[i].totals.back();
        if (specs[i].is_min_level) level.at_rc_min = fitted[i];
        if (!specs[i].is_min_level || plan.rc_levels.size() == 1)
            level.at_rc_max = fitted[i];
    }
    return model;
}

} // namespace

std::unique_ptr<ReciprocalErrorModel> make_recip_model(const TuneConfig& config) {
    if (config.recip_error.kind == RecipErrorSpec::Kind::Tabulated)
        return std::make_unique<TabulatedModel>(
            TabulatedModel::from_csv(config.recip_error.table_path));
    return std::make_unique<SurrogateModel>(config.recip_error.ck);
}

std::unique_ptr<Sampler> make_sampler(const TuneConfig& config) {
    if (config.sampler_kind == TuneConfig::SamplerKind::External)
        return external_command_sampler(config.external.command_template,
                                        config.external.parser_regex,
                                        config.external.timeout_s);
    return std::make_unique<SyntheticSampler>(config.synthetic);
}

TuneOutcome run_tune(const TuneConfig& config, const RunOptions& options) {
    config.validate();
    const SearchSpace space = build_search_space(config.system, config.ranges);
    const auto recip_model = make_recip_model(config);
    const unsigned partition_jobs =
        options.jobs ? options.jobs : hardware_jobs();

    TuneOutcome outcome;
    for (Variant variant : config.variants) {
        auto t0 = std::chrono::steady_clock::now();

        AccurateSubspace sub = partition_space(space, config.accuracy,
                                               *recip_model, variant,
                                               partition_jobs);
        Frontier frontier = extract_frontier(sub);
        DynamicRecipPlan plan = dynamic_recip_plan(sub);

        auto sampler = make_sampler(config);
        RecordingSampler recorder(*sampler);
        const unsigned sampler_jobs =
            options.jobs ? options.jobs
                         : (recorder.concurrent_ok() ? hardware_jobs() : 1);
        const int timesteps = config.system.timesteps_per_sample;

        // Real-space pass: cutoff is the only cost driver, so probe with the
        // smallest order on a unit grid across the accurate cutoff range.
        std::vector<double> xs_rc =
            real_space_positions(space, plan.rc_min, plan.rc_max);
        auto real_config = [&](double rc) {
            Configuration cfg;
            cfg.alpha = 0.50;
            cfg.cutoff = rc;
            cfg.order = 2;
            cfg.grid = GridSize{1, 1, 1};
            cfg.variant = variant;
            return cfg;
        };
        PiecewiseModel real_model;
        if (xs_rc.size() == 1) {
            std::vector<double> reps(std::size_t(config.adaptive.repeats_per_point));
            for (auto& r : reps)
                r = recorder.measure(real_config(xs_rc[0]), Phase::RealSpace,
                                     timesteps);
            real_model =
                PiecewiseModel::constant(BasisFamily::Cubic, median_of(reps));
        } else {
            auto series = adaptive_sample(
                xs_rc, BasisFamily::Cubic, config.adaptive, [&](double rc) {
                    return recorder.measure(real_config(rc), Phase::RealSpace,
                                            timesteps);
                });
            real_model = model_from_series(series, xs_rc, BasisFamily::Cubic,
                                           config.adaptive.rel_error_threshold);
        }

        // Reciprocal-space passes: per accurate order, over the accurate
        // grids, at the extreme accurate cutoffs.
        std::vector<RecipSeriesSpec> specs;
        for (const auto& og : plan.orders) {
            for (std::size_t l = 0; l < plan.rc_levels.size(); ++l) {
                RecipSeriesSpec spec;
                spec.order = og.order;
                spec.rc = plan.rc_levels[l];
                spec.is_min_level = (l == 0);
                for (std::size_t gi : og.grid_idxs) {
                    double total = double(space.grids[gi].total());
                    // Equal totals from different shapes collapse to the
                    // first grid; the cost law depends on the total only.
                    if (!spec.totals.empty() && total <= spec.totals.back())
                        continue;
                    spec.totals.push_back(total);
                    spec.grid_for_total.push_back(gi);
                }
                specs.push_back(std::move(spec));
            }
        }
        std::vector<PiecewiseModel> fitted(specs.size());
        run_tasks(specs.size(), sampler_jobs, [&](std::size_t i) {
            const auto& spec = specs[i];
            auto recip_config = [&](double total) {
                auto it = std::lower_bound(spec.totals.begin(), spec.totals.end(),
                                           total);
                std::size_t pos = std::size_t(it - spec.totals.begin());
                Configuration cfg;
                cfg.alpha = 0.50;
                cfg.cutoff = spec.rc;
                cfg.order = spec.order;
                cfg.grid = space.grids[spec.grid_for_total[pos]];
                cfg.variant = variant;
                return cfg;
            };
            if (spec.totals.size() == 1) {
                std::vector<double> reps(
                    std::size_t(config.adaptive.repeats_per_point));
                for (auto& r : reps)
                    r = recorder.measure(recip_config(spec.totals[0]),
                                         Phase::ReciprocalSpace, timesteps);
                fitted[i] = PiecewiseModel::constant(BasisFamily::Linear,
                                                     median_of(reps));
            } else {
                auto series = adaptive_sample(
                    spec.totals, BasisFamily::Linear, config.adaptive,
                    [&](double total) {
                        return recorder.measure(recip_config(total),
                                                Phase::ReciprocalSpace, timesteps);
                    });
                fitted[i] =
                    model_from_series(series, spec.totals, BasisFamily::Linear,
                                      config.adaptive.rel_error_threshold);
            }
        });

        PerfModel model = assemble_recip_models(space, plan, specs, fitted,
                                                std::move(real_model));

        VariantResult result;
        result.variant = variant;
        result.subspace_size = sub.points.size();
        result.ranking = rank_frontier(frontier, sub, model);
        result.samples_used = recorder.count();
        result.samples = recorder.take_records();
        std::sort(result.samples.begin(), result.samples.end(),
                  [](const SampleRecord& a, const SampleRecord& b) {
                      return std::tuple(int(a.phase), a.config.order,
                                        a.config.cutoff, a.config.grid.total(),
                                        a.repeat_index) <
                             std::tuple(int(b.phase), b.config.order,
                                        b.config.cutoff, b.config.grid.total(),
                                        b.repeat_index);
                  });

        if (config.baseline) {
            try {
                BaselineResult base;
                base.config = *config.baseline;
                base.predicted_seconds =
                    predict(base.config.cutoff, double(base.config.grid.total()),
                            base.config.order, model);
                base.speedup =
                    base.predicted_seconds / result.ranking.front().est_seconds;
                result.baseline = base;
            } catch (const UncoveredOrder&) {
                std::cerr << "paretune: baseline order " << config.baseline->order
                          << " is outside the accurate subspace; skipping the "
                             "baseline comparison\n";
            }
        }

        result.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        outcome.variants.push_back(std::move(result));
    }
    return outcome;
}

PartitionOutcome run_partition(const TuneConfig& config,
                               const RunOptions& options) {
    config.validate();
    PartitionOutcome out;
    out.space = build_search_space(config.system, config.ranges);
    auto model = make_recip_model(config);
    unsigned jobs = options.jobs ? options.jobs : hardware_jobs();
    out.subspace = partition_space(out.space, config.accuracy, *model,
                                   config.variants.front(), jobs);
    out.frontier = extract_frontier(out.subspace);
    return out;
}

PerfModel build_model_from_samples(const std::vector<SampleRecord>& samples,
                                   const Frontier& frontier,
                                   const AccurateSubspace& sub,
                                   double max_avg_rel_err) {
    // Aggregate repeats by median, keyed on the relevant cost drivers.
    std::map<double, std::vector<double>> real_by_cutoff;
    std::map<int, std::map<double, std::map<double, std::vector<double>>>>
        recip_by_order; // order -> cutoff -> grid total -> raw times
    for (const auto& s : samples) {
        if (s.phase == Phase::RealSpace)
            real_by_cutoff[s.config.cutoff].push_back(s.seconds);
        else if (s.phase == Phase::ReciprocalSpace)
            recip_by_order[s.config.order][s.config.cutoff]
                          [double(s.config.grid.total())]
                              .push_back(s.seconds);
    }
    if (real_by_cutoff.empty())
        throw MissingCoverage("no real-space samples to fit");

    PerfModel model;
    model.n_procs = sub.space.system.n_procs;
    {
        std::vector<XY> points;
        for (const auto& [rc, reps] : real_by_cutoff)
            points.push_back({rc, median_of(reps)});
        model.real_model =
            points.size() == 1
                ? PiecewiseModel::constant(BasisFamily::Cubic, points.front().y)
                : segment_series(points, BasisFamily::Cubic, max_avg_rel_err);
    }

    double global_rc_min = 0.0, global_rc_max = 0.0;
    bool have_rc = false;
    for (const auto& [order, by_cutoff] : recip_by_order) {
        double lo = by_cutoff.begin()->first;
        double hi = by_cutoff.rbegin()->first;
        if (!have_rc) {
            global_rc_min = lo;
            global_rc_max = hi;
            have_rc = true;
        } else {
            global_rc_min = std::min(global_rc_min, lo);
            global_rc_max = std::max(global_rc_max, hi);
        }
        auto fit_level = [&](const std::map<double, std::vector<double>>& by_total) {
            std::vector<XY> points;
            for (const auto& [total, reps] : by_total)
                points.push_back({total, median_of(reps)});
            return points.size() == 1
                       ? PiecewiseModel::constant(BasisFamily::Linear,
                                                  points.front().y)
                       : segment_series(points, BasisFamily::Linear,
                                        max_avg_rel_err);
        };
        PerfModel::Level level;
        level.at_rc_min = fit_level(by_cutoff.begin()->second);
        level.at_rc_max = fit_level(by_cutoff.rbegin()->second);
        double min_g = 0.0, max_g = 0.0;
        bool first = true;
        for (const auto& [rc, by_total] : by_cutoff)
            for (const auto& [total, reps] : by_total) {
                if (first) {
                    min_g = max_g = total;
                    first = false;
                } else {
                    min_g = std::min(min_g, total);
                    max_g = std::max(max_g, total);
                }
            }
        level.min_grid = min_g;
        level.max_grid = max_g;
        model.recip_models[order] = std::move(level);
    }
    model.rc_min = have_rc ? global_rc_min : 0.0;
    model.rc_max = have_rc ? global_rc_max : 0.0;

    for (const auto& p : frontier.points) {
        int order = sub.order_of(p);
        if (!model.recip_models.count(order))
            throw MissingCoverage("no reciprocal-space samples for frontier order " +
                                  std::to_string(order));
    }
    return model;
}

TuneOutcome run_predict(const TuneConfig& config,
                        const std::vector<SampleRecord>& samples,
                        const RunOptions& options) {
    config.validate();
    const SearchSpace space = build_search_space(config.system, config.ranges);
    auto model = make_recip_model(config);
    unsigned jobs = options.jobs ? options.jobs : hardware_jobs();

    TuneOutcome outcome;
    for (Variant variant : config.variants) {
        auto t0 = std::chrono::steady_clock::now();
        AccurateSubspace sub =
            partition_space(space, config.accuracy, *model, variant, jobs);
        Frontier frontier = extract_frontier(sub);
        PerfModel perf = build_model_from_samples(
            samples, frontier, sub, config.adaptive.rel_error_threshold);

        VariantResult result;
        result.variant = variant;
        result.subspace_size = sub.points.size();
        result.ranking = rank_frontier(frontier, sub, perf);
        result.samples_used = samples.size();
        if (config.baseline) {
            try {
                BaselineResult base;
                base.config = *config.baseline;
                base.predicted_seconds =
                    predict(base.config.cutoff, double(base.config.grid.total()),
                            base.config.order, perf);
                base.speedup =
                    base.predicted_seconds / result.ranking.front().est_seconds;
                result.baseline = base;
            } catch (const UncoveredOrder&) {
                std::cerr << "paretune: baseline order " << config.baseline->order
                          << " has no fitted model; skipping the baseline "
                             "comparison\n";
            }
        }
        result.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        outcome.variants.push_back(std::move(result));
    }
    return outcome;
}

} // namespace paretune
