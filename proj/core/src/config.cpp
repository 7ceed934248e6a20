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
#include "paretune/config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

#include "paretune/errors.hpp"

namespace paretune {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& expect(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where + ": missing key '" + key + "'");
    return *it;
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where + ": expected a number");
    return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where + ": expected an integer");
    return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where + ": expected a string");
    return v.get<std::string>();
}

GridSize parse_grid(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) fail(where + ": expected [nx, ny, nz]");
    return GridSize{int(as_int(v[0], where)), int(as_int(v[1], where)),
                    int(as_int(v[2], where))};
}

SystemDescription parse_system(const json& j) {
    SystemDescription sys;
    const auto& dom = expect(j, "domain", "system");
    if (!dom.is_array() || dom.size() != 3)
        fail("system.domain: expected [x, y, z]");
    sys.domain_x = as_number(dom[0], "system.domain");
    sys.domain_y = as_number(dom[1], "system.domain");
    sys.domain_z = as_number(dom[2], "system.domain");
    sys.n_particles = as_int(expect(j, "n_particles", "system"), "system.n_particles");
    if (auto it = j.find("geometry"); it != j.end()) {
        if (it->is_string()) {
            if (*it != "bulk") fail("system.geometry: unknown kind '" +
                                    it->get<std::string>() + "'");
        } else if (it->is_object()) {
            auto kind = as_string(expect(*it, "type", "system.geometry"),
                                  "system.geometry.type");
            if (kind == "bulk") {
                // nothing else to read
            } else if (kind == "interfacial") {
                const auto& b = expect(*it, "box", "system.geometry");
                if (!b.is_array() || b.size() != 3)
                    fail("system.geometry.box: expected [x, y, z]");
                sys.geometry = Geometry::interfacial(
                    as_number(b[0], "box"), as_number(b[1], "box"),
                    as_number(b[2], "box"));
            } else {
                fail("system.geometry: unknown kind '" + kind + "'");
            }
        } else {
            fail("system.geometry: expected a string or object");
        }
    }
    if (auto it = j.find("n_procs"); it != j.end())
        sys.n_procs = int(as_int(*it, "system.n_procs"));
    if (auto it = j.find("dispersion_coeff"); it != j.end())
        sys.dispersion_coeff = as_number(*it, "system.dispersion_coeff");
    if (auto it = j.find("timesteps_per_sample"); it != j.end())
        sys.timesteps_per_sample = int(as_int(*it, "system.timesteps_per_sample"));
    return sys;
}

ParameterRanges parse_ranges(const json& j) {
    ParameterRanges r;
    auto num = [&](const char* key, double& out) {
        if (auto it = j.find(key); it != j.end())
            out = as_number(*it, std::string("ranges.") + key);
    };
    num("alpha_min", r.alpha_min);
    num("alpha_max", r.alpha_max);
    num("alpha_step", r.alpha_step);
    num("cutoff_min", r.cutoff_min);
    num("cutoff_max", r.cutoff_max);
    num("cutoff_step", r.cutoff_step);
    num("grid_point_factor", r.grid_point_factor);
    if (auto it = j.find("orders"); it != j.end()) {
        if (!it->is_array()) fail("ranges.orders: expected an array");
        r.orders.clear();
        for (const auto& v : *it)
            r.orders.push_back(int(as_int(v, "ranges.orders")));
    }
    return r;
}

AccuracySpec parse_accuracy(const json& j) {
    auto mode = as_string(expect(j, "mode", "accuracy"), "accuracy.mode");
    if (mode == "combined")
        return AccuracySpec::combined(
            as_number(expect(j, "threshold", "accuracy"), "accuracy.threshold"));
    if (mode == "split")
        return AccuracySpec::split(
            as_number(expect(j, "real_threshold", "accuracy"),
                      "accuracy.real_threshold"),
            as_number(expect(j, "recip_threshold", "accuracy"),
                      "accuracy.recip_threshold"));
    fail("accuracy.mode: expected 'combined' or 'split'");
}

SynthParams parse_synthetic(const json& j, const SystemDescription& sys) {
    SynthParams p;
    p.n_procs = sys.n_procs;
    auto num = [&](const char* key, double& out) {
        if (auto it = j.find(key); it != j.end())
            out = as_number(*it, std::string("synthetic.") + key);
    };
    num("a_r", p.a_r);
    num("b_r", p.b_r);
    num("shift_mag", p.shift_mag);
    num("gamma_rc", p.gamma_rc);
    num("noise_frac", p.noise_frac);
    num("surrogate_ck", p.surrogate_ck);
    if (auto it = j.find("rng_seed"); it != j.end())
        p.rng_seed = std::uint64_t(as_int(*it, "synthetic.rng_seed"));
    if (auto it = j.find("n_procs"); it != j.end())
        p.n_procs = int(as_int(*it, "synthetic.n_procs"));
    if (auto it = j.find("recip_coeffs"); it != j.end()) {
        if (!it->is_object()) fail("synthetic.recip_coeffs: expected an object");
        p.recip.clear();
        for (const auto& [key, value] : it->items()) {
            int order;
            try {
                order = std::stoi(key);
            } catch (const std::exception&) {
                fail("synthetic.recip_coeffs: keys must be orders, got '" + key +
                     "'");
            }
            if (!value.is_array() || value.size() != 2)
                fail("synthetic.recip_coeffs." + key + ": expected [p, b]");
            p.recip[order] = {as_number(value[0], "recip_coeffs"),
                              as_number(value[1], "recip_coeffs")};
        }
    }
    return p;
}

TuneConfig parse(const json& root) {
    if (!root.is_object()) fail("config: top level must be an object");
    if (auto it = root.find("schema"); it == root.end() || *it != 1)
        fail("config: expected \"schema\": 1");

    TuneConfig cfg;
    cfg.system = parse_system(expect(root, "system", "config"));
    if (auto it = root.find("ranges"); it != root.end())
        cfg.ranges = parse_ranges(*it);
    cfg.accuracy = parse_accuracy(expect(root, "accuracy", "config"));

    if (auto it = root.find("synthetic"); it != root.end())
        cfg.synthetic = parse_synthetic(*it, cfg.system);
    else
        cfg.synthetic.n_procs = cfg.system.n_procs;

    if (auto it = root.find("sampler"); it != root.end()) {
        auto kind = as_string(expect(*it, "type", "sampler"), "sampler.type");
        if (kind == "synthetic") {
            cfg.sampler_kind = TuneConfig::SamplerKind::Synthetic;
        } else if (kind == "external") {
            cfg.sampler_kind = TuneConfig::SamplerKind::External;
            cfg.external.command_template =
                as_string(expect(*it, "template", "sampler"), "sampler.template");
            cfg.external.parser_regex = as_string(
                expect(*it, "parser_regex", "sampler"), "sampler.parser_regex");
            if (auto t = it->find("timeout_s"); t != it->end())
                cfg.external.timeout_s = as_number(*t, "sampler.timeout_s");
        } else {
            fail("sampler.type: expected 'synthetic' or 'external'");
        }
    }

    // Default: the surrogate bound, calibrated like the synthetic generator
    // so tuning against the generator is self-consistent.
    cfg.recip_error.ck = cfg.synthetic.surrogate_ck;
    if (auto it = root.find("recip_error"); it != root.end()) {
        auto kind = as_string(expect(*it, "type", "recip_error"), "recip_error.type");
        if (kind == "surrogate") {
            cfg.recip_error.kind = RecipErrorSpec::Kind::Surrogate;
            if (auto ck = it->find("ck"); ck != it->end())
                cfg.recip_error.ck = as_number(*ck, "recip_error.ck");
        } else if (kind == "tabulated") {
            cfg.recip_error.kind = RecipErrorSpec::Kind::Tabulated;
            cfg.recip_error.table_path = as_string(
                expect(*it, "path", "recip_error"), "recip_error.path");
        } else {
            fail("recip_error.type: expected 'surrogate' or 'tabulated'");
        }
    }

    if (auto it = root.find("adaptive"); it != root.end()) {
        if (auto v = it->find("rel_error_threshold"); v != it->end())
            cfg.adaptive.rel_error_threshold =
                as_number(*v, "adaptive.rel_error_threshold");
        if (auto v = it->find("max_depth"); v != it->end())
            cfg.adaptive.max_depth = int(as_int(*v, "adaptive.max_depth"));
        if (auto v = it->find("repeats_per_point"); v != it->end())
            cfg.adaptive.repeats_per_point =
                int(as_int(*v, "adaptive.repeats_per_point"));
    }

    if (auto it = root.find("variants"); it != root.end()) {
        if (!it->is_array() || it->empty())
            fail("variants: expected a nonempty array");
        cfg.variants.clear();
        std::set<std::string> seen;
        for (const auto& v : *it) {
            auto name = as_string(v, "variants");
            if (!seen.insert(name).second) fail("variants: duplicate '" + name + "'");
            auto parsed = variant_from_name(name);
            if (!parsed) fail("variants: expected 'ad' or 'ik', got '" + name + "'");
            cfg.variants.push_back(*parsed);
        }
    }

    if (auto it = root.find("baseline"); it != root.end()) {
        BaselineSpec b;
        b.alpha = as_number(expect(*it, "alpha", "baseline"), "baseline.alpha");
        b.cutoff = as_number(expect(*it, "cutoff", "baseline"), "baseline.cutoff");
        b.order = int(as_int(expect(*it, "order", "baseline"), "baseline.order"));
        b.grid = parse_grid(expect(*it, "grid", "baseline"), "baseline.grid");
        cfg.baseline = b;
    }

    if (auto it = root.find("output_dir"); it != root.end())
        cfg.output_dir = as_string(*it, "output_dir");

    cfg.validate();
    return cfg;
}

} // namespace

void TuneConfig::validate() const {
    system.validate();
    ranges.validate();
    accuracy.validate();
    adaptive.validate();
    synthetic.validate();
    if (sampler_kind == SamplerKind::External) {
        if (external.command_template.empty())
            throw ConfigError("sampler: external template must be nonempty");
        if (external.parser_regex.empty())
            throw ConfigError("sampler: external parser_regex must be nonempty");
        if (external.timeout_s <= 0)
            throw ConfigError("sampler: timeout_s must be positive");
    }
    if (recip_error.kind == RecipErrorSpec::Kind::Surrogate &&
        recip_error.ck <= 0)
        throw ConfigError("recip_error: ck must be positive");
    if (variants.empty()) throw ConfigError("variants: must be nonempty");
    if (baseline) {
        if (baseline->alpha <= 0 || baseline->cutoff <= 0 || baseline->order < 2)
            throw ConfigError("baseline: invalid configuration values");
        if (baseline->grid.nx < 1 || baseline->grid.ny < 1 || baseline->grid.nz < 1)
            throw ConfigError("baseline: invalid grid");
    }
}

TuneConfig parse_tune_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse(root);
}

TuneConfig load_tune_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_tune_config(text);
}

} // namespace paretune
