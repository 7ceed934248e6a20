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
#include "paretune/sampling.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <regex>
#include <set>
#include <sstream>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "paretune/errors.hpp"

namespace paretune {

const char* phase_name(Phase p) {
    switch (p) {
    case Phase::RealSpace: return "real";
    case Phase::ReciprocalSpace: return "reciprocal";
    case Phase::Total: return "total";
    }
    return "total";
}

std::optional<Phase> phase_from_name(const std::string& name) {
    if (name == "real") return Phase::RealSpace;
    if (name == "reciprocal") return Phase::ReciprocalSpace;
    if (name == "total") return Phase::Total;
    return std::nullopt;
}

void AdaptiveParams::validate() const {
    if (rel_error_threshold <= 0)
        throw ConfigError("adaptive: rel_error_threshold must be positive");
    if (max_depth < 1) throw ConfigError("adaptive: max_depth must be >= 1");
    if (repeats_per_point < 1)
        throw ConfigError("adaptive: repeats_per_point must be >= 1");
}

std::vector<Configuration> static_real_plan(const SearchSpace& space) {
    std::vector<Configuration> plan;
    for (int k = 0;; ++k) {
        double rc = 2.0 + 0.5 * k;
        if (rc > 6.0 + 1e-12) break;
        if (rc < space.ranges.cutoff_min - 1e-12 ||
            rc > space.ranges.cutoff_max + 1e-12)
            continue;
        Configuration cfg;
        cfg.alpha = 0.50;
        cfg.cutoff = rc;
        cfg.order = 2;
        cfg.grid = GridSize{1, 1, 1};
        plan.push_back(cfg);
    }
    return plan;
}

std::vector<Configuration> static_recip_plan(const SearchSpace& space) {
    return static_recip_plan(space, space.orders);
}

std::vector<Configuration> static_recip_plan(const SearchSpace& space,
                                             const std::vector<int>& orders) {
    std::vector<Configuration> plan;
    plan.reserve(orders.size() * space.grids.size());
    for (int order : orders)
        for (const auto& grid : space.grids) {
            Configuration cfg;
            cfg.alpha = 0.50;
            cfg.cutoff = space.ranges.cutoff_min;
            cfg.order = order;
            cfg.grid = grid;
            plan.push_back(cfg);
        }
    return plan;
}

namespace {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

std::map<std::size_t, double> adaptive_sample(
    const std::vector<double>& xs, BasisFamily family,
    const AdaptiveParams& params,
    const std::function<double(double position)>& measure_at) {
    params.validate();
    if (xs.size() < 2)
        throw Error("adaptive_sample: need at least 2 positions");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i - 1] < xs[i]))
            throw Error("adaptive_sample: positions must be strictly increasing");

    std::map<std::size_t, double> timings;
    auto measured = [&](std::size_t i) -> double {
        auto it = timings.find(i);
        if (it != timings.end()) return it->second;
        std::vector<double> reps(std::size_t(params.repeats_per_point));
        try {
            for (auto& r : reps) r = measure_at(xs[i]);
        } catch (const SamplerFailure& e) {
            throw SamplerFailure("at position " + std::to_string(xs[i]) + ": " +
                                 e.what());
        }
        return timings[i] = median(std::move(reps));
    };

    // Each visit fits the family to (lo, mid, hi) and recurses only while
    // the worst local relative error exceeds the threshold.
    auto rec = [&](auto&& self, std::size_t lo, std::size_t hi, int depth) -> void {
        if (hi - lo <= 1) return;
        if (depth > params.max_depth) return;
        std::size_t mid = (lo + hi) / 2;
        measured(mid);
        XY local[3] = {{xs[lo], timings[lo]},
                       {xs[mid], timings[mid]},
                       {xs[hi], timings[hi]}};
        PiecewiseModel::Segment fit;
        if (family == BasisFamily::Cubic) {
            auto f = fit_cubic(local);
            fit = {f.a, f.b};
        } else {
            auto f = fit_linear(local);
            fit = {f.p, f.b};
        }
        double worst = 0;
        for (const auto& pt : local) {
            double value =
                fit.intercept +
                fit.slope * (family == BasisFamily::Cubic ? pt.x * pt.x * pt.x : pt.x);
            worst = std::max(worst, std::abs(value - pt.y) / std::abs(pt.y));
        }
        if (worst > params.rel_error_threshold) {
            self(self, lo, mid, depth + 1);
            self(self, mid, hi, depth + 1);
        }
    };

    measured(0);
    measured(xs.size() - 1);
    rec(rec, 0, xs.size() - 1, 1);
    return timings;
}

DynamicRecipPlan dynamic_recip_plan(const AccurateSubspace& sub) {
    if (sub.points.empty())
        throw EmptyAccurateSubspace("dynamic_recip_plan: empty accurate subspace");
    DynamicRecipPlan plan;
    std::size_t c_lo = sub.points.front().cutoff_idx, c_hi = c_lo;
    std::map<std::size_t, std::set<std::size_t>> grids_by_order;
    for (const auto& p : sub.points) {
        c_lo = std::min(c_lo, p.cutoff_idx);
        c_hi = std::max(c_hi, p.cutoff_idx);
        grids_by_order[p.order_idx].insert(p.grid_idx);
    }
    plan.rc_min = sub.space.cutoffs[c_lo];
    plan.rc_max = sub.space.cutoffs[c_hi];
    plan.rc_levels = {plan.rc_min};
    if (c_hi != c_lo) plan.rc_levels.push_back(plan.rc_max);
    for (const auto& [order_idx, grid_idxs] : grids_by_order)
        plan.orders.push_back({sub.space.orders[order_idx],
                               {grid_idxs.begin(), grid_idxs.end()}});
    return plan;
}

namespace {

void replace_all(std::string& s, const std::string& key, const std::string& value) {
    for (std::size_t pos = s.find(key); pos != std::string::npos;
         pos = s.find(key, pos + value.size()))
        s.replace(pos, key.size(), value);
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Runs the command under /bin/sh in its own process group, captures stdout,
// and kills the whole group on deadline expiry.
std::string run_command(const std::string& cmd, double timeout_s) {
    int fds[2];
    if (pipe(fds) != 0)
        throw SpawnError("pipe failed: " + std::string(std::strerror(errno)));
    pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        throw SpawnError("fork failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(fds[1], STDOUT_FILENO);
        close(fds[0]);
        close(fds[1]);
        execl("/bin/sh", "sh", "-c", cmd.c_str(), (char*)nullptr);
        _exit(127);
    }
    close(fds[1]);
    std::string output;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration<double>(timeout_s);
    bool timed_out = false;
    char buf[4096];
    for (;;) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            timed_out = true;
            break;
        }
        struct pollfd pfd = {fds[0], POLLIN, 0};
        int rv = poll(&pfd, 1, int(remaining.count()));
        if (rv < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (rv == 0) {
            timed_out = true;
            break;
        }
        ssize_t n = read(fds[0], buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (n == 0) break; // EOF
        output.append(buf, std::size_t(n));
    }
    close(fds[0]);
    if (timed_out) {
        kill(-pid, SIGKILL);
        waitpid(pid, nullptr, 0);
        throw SpawnError("command timed out after " + format_value(timeout_s) +
                         " s: " + cmd);
    }
    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        std::ostringstream os;
        os << "command failed";
        if (WIFEXITED(status)) os << " with exit code " << WEXITSTATUS(status);
        os << ": " << cmd;
        throw SpawnError(os.str());
    }
    return output;
}

} // namespace

CommandSampler::CommandSampler(std::string command_template,
                               std::string parser_regex, double timeout_s)
    : template_(std::move(command_template)), regex_(std::move(parser_regex)),
      timeout_s_(timeout_s) {
    if (timeout_s_ <= 0) throw ConfigError("sampler: timeout_s must be positive");
    try {
        std::regex probe(regex_); // fail fast on a malformed pattern
        if (probe.mark_count() < 1)
            throw ConfigError("sampler: parser regex needs a capture group");
    } catch (const std::regex_error& e) {
        throw ConfigError("sampler: bad parser regex /" + regex_ + "/: " +
                          e.what());
    }
}

double CommandSampler::measure(const Configuration& config, Phase phase,
                               int timesteps) {
    std::string cmd = template_;
    replace_all(cmd, "{alpha}", format_value(config.alpha));
    replace_all(cmd, "{cutoff}", format_value(config.cutoff));
    replace_all(cmd, "{order}", std::to_string(config.order));
    replace_all(cmd, "{nx}", std::to_string(config.grid.nx));
    replace_all(cmd, "{ny}", std::to_string(config.grid.ny));
    replace_all(cmd, "{nz}", std::to_string(config.grid.nz));
    replace_all(cmd, "{timesteps}", std::to_string(timesteps));
    replace_all(cmd, "{phase}", phase_name(phase));

    std::string output = run_command(cmd, timeout_s_);
    std::smatch m;
    if (!std::regex_search(output, m, std::regex(regex_)) || m.size() < 2)
        throw ParseError("no timing matched by /" + regex_ + "/ in output of: " +
                         cmd);
    double seconds;
    try {
        seconds = std::stod(m[1].str());
    } catch (const std::exception&) {
        throw ParseError("captured timing '" + m[1].str() + "' is not a number");
    }
    if (!(seconds > 0) || !std::isfinite(seconds))
        throw NonPositiveTime("measured time must be positive, got " +
                              m[1].str());
    return seconds;
}

std::unique_ptr<Sampler> external_command_sampler(std::string command_template,
                                                  std::string parser_regex,
                                                  double timeout_s) {
    return std::make_unique<CommandSampler>(std::move(command_template),
                                            std::move(parser_regex), timeout_s);
}

} // namespace paretune
