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
#include "paretune/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "paretune/errors.hpp"

namespace paretune {

namespace {

using nlohmann::json;

// Rounding floats through %.6g before serialization keeps report bytes
// stable regardless of how they were computed.
double round_sig6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::strtod(buf, nullptr);
}

void atomic_write(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

json grid_json(const GridSize& g) { return json::array({g.nx, g.ny, g.nz}); }

json prediction_json(const Prediction& p, std::size_t rank) {
    json j;
    j["rank"] = rank;
    j["predicted_seconds"] = round_sig6(p.est_seconds);
    j["alpha"] = round_sig6(p.chosen_alpha);
    j["alpha_interval"] = json::array(
        {round_sig6(p.alpha_lo), round_sig6(p.alpha_hi)});
    j["cutoff"] = round_sig6(p.cutoff);
    j["order"] = p.order;
    j["grid"] = grid_json(p.grid);
    j["extrapolated"] = p.extrapolated;
    return j;
}

} // namespace

std::string format_sig6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_report_json(const std::filesystem::path& path,
                       const TuneOutcome& outcome) {
    json root = json::array();
    for (const auto& vr : outcome.variants) {
        const auto& best = vr.chosen();
        json j;
        j["variant"] = variant_name(vr.variant);
        json chosen;
        chosen["alpha"] = round_sig6(best.chosen_alpha);
        chosen["cutoff"] = round_sig6(best.cutoff);
        chosen["order"] = best.order;
        chosen["grid"] = grid_json(best.grid);
        j["chosen"] = chosen;
        j["predicted_seconds"] = round_sig6(best.est_seconds);
        j["alpha_interval"] =
            json::array({round_sig6(best.alpha_lo), round_sig6(best.alpha_hi)});
        json frontier = json::array();
        for (std::size_t i = 0; i < vr.ranking.size(); ++i)
            frontier.push_back(prediction_json(vr.ranking[i], i + 1));
        j["frontier"] = frontier;
        j["frontier_size"] = vr.ranking.size();
        j["subspace_size"] = vr.subspace_size;
        j["samples_used"] = vr.samples_used;
        if (vr.baseline) {
            json b;
            json bc;
            bc["alpha"] = round_sig6(vr.baseline->config.alpha);
            bc["cutoff"] = round_sig6(vr.baseline->config.cutoff);
            bc["order"] = vr.baseline->config.order;
            bc["grid"] = grid_json(vr.baseline->config.grid);
            b["config"] = bc;
            b["predicted_seconds"] = round_sig6(vr.baseline->predicted_seconds);
            b["speedup"] = round_sig6(vr.baseline->speedup);
            j["baseline"] = b;
        }
        root.push_back(j);
    }
    atomic_write(path, root.dump(2) + "\n");
}

void write_frontier_csv(const std::filesystem::path& path,
                        const VariantResult& result) {
    std::ostringstream os;
    os << "rank,predicted_seconds,alpha,cutoff,order,nx,ny,nz,extrapolated\n";
    for (std::size_t i = 0; i < result.ranking.size(); ++i) {
        const auto& p = result.ranking[i];
        os << (i + 1) << ',' << format_sig6(p.est_seconds) << ','
           << format_sig6(p.chosen_alpha) << ',' << format_sig6(p.cutoff) << ','
           << p.order << ',' << p.grid.nx << ',' << p.grid.ny << ',' << p.grid.nz
           << ',' << (p.extrapolated ? 1 : 0) << '\n';
    }
    atomic_write(path, os.str());
}

void write_subspace_csv(const std::filesystem::path& path,
                        const AccurateSubspace& sub, const Frontier& frontier) {
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> on_frontier;
    for (const auto& p : frontier.points)
        on_frontier.insert({p.cutoff_idx, p.grid_idx, p.order_idx});
    std::ostringstream os;
    os << "cutoff,nx,ny,nz,order,alpha_lo,alpha_hi,on_frontier\n";
    for (const auto& p : sub.points) {
        const auto& g = sub.grid_of(p);
        os << format_sig6(sub.cutoff_of(p)) << ',' << g.nx << ',' << g.ny << ','
           << g.nz << ',' << sub.order_of(p) << ','
           << format_sig6(sub.space.alphas[p.alpha_lo]) << ','
           << format_sig6(sub.space.alphas[p.alpha_hi]) << ','
           << (on_frontier.count({p.cutoff_idx, p.grid_idx, p.order_idx}) ? 1 : 0)
           << '\n';
    }
    atomic_write(path, os.str());
}

void write_samples_csv(const std::filesystem::path& path,
                       const std::vector<SampleRecord>& samples) {
    std::ostringstream os;
    os << "alpha,cutoff,order,nx,ny,nz,phase,seconds\n";
    for (const auto& s : samples) {
        char sec[48];
        std::snprintf(sec, sizeof sec, "%.9g", s.seconds);
        os << format_sig6(s.config.alpha) << ',' << format_sig6(s.config.cutoff)
           << ',' << s.config.order << ',' << s.config.grid.nx << ','
           << s.config.grid.ny << ',' << s.config.grid.nz << ','
           << phase_name(s.phase) << ',' << sec << '\n';
    }
    atomic_write(path, os.str());
}

std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open samples file: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("samples file is empty: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "alpha,cutoff,order,nx,ny,nz,phase,seconds")
        throw ConfigError("samples header must be "
                          "'alpha,cutoff,order,nx,ny,nz,phase,seconds': " +
                          path.string());
    std::vector<SampleRecord> samples;
    std::map<std::string, int> repeats;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string fields[8];
        for (int i = 0; i < 8; ++i)
            if (!std::getline(row, fields[i], ','))
                throw ConfigError("samples line " + std::to_string(lineno) +
                                  ": expected 8 fields");
        SampleRecord rec;
        try {
            rec.config.alpha = std::stod(fields[0]);
            rec.config.cutoff = std::stod(fields[1]);
            rec.config.order = std::stoi(fields[2]);
            rec.config.grid = GridSize{std::stoi(fields[3]), std::stoi(fields[4]),
                                       std::stoi(fields[5])};
            rec.seconds = std::stod(fields[7]);
        } catch (const std::exception&) {
            throw ConfigError("samples line " + std::to_string(lineno) +
                              ": bad number");
        }
        auto phase = phase_from_name(fields[6]);
        if (!phase)
            throw ConfigError("samples line " + std::to_string(lineno) +
                              ": unknown phase '" + fields[6] + "'");
        rec.phase = *phase;
        if (!(rec.seconds > 0))
            throw ConfigError("samples line " + std::to_string(lineno) +
                              ": seconds must be positive");
        std::string key = fields[0] + "," + fields[1] + "," + fields[2] + "," +
                          fields[3] + "," + fields[4] + "," + fields[5] + "," +
                          fields[6];
        rec.repeat_index = repeats[key]++;
        samples.push_back(rec);
    }
    return samples;
}

void write_meta_json(const std::filesystem::path& path, const TuneOutcome& outcome) {
    json root;
    double total = 0.0;
    json per_variant = json::array();
    for (const auto& vr : outcome.variants) {
        json v;
        v["variant"] = variant_name(vr.variant);
        v["wall_time_s"] = round_sig6(vr.wall_time_s);
        per_variant.push_back(v);
        total += vr.wall_time_s;
    }
    root["variants"] = per_variant;
    root["wall_time_s"] = round_sig6(total);
    atomic_write(path, root.dump(2) + "\n");
}

} // namespace paretune
