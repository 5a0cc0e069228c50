// Copyright 2026 The wmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmc/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace wmc::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_keys(const json &j, const std::string &where, std::initializer_list<const char *> allowed) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto &item : j.items()) {
        if (!ok.count(item.key())) {
            throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
        }
    }
}

double get_number(const json &j, const std::string &where) {
    if (!j.is_number()) {
        throw ConfigError(where + ": expected a number");
    }
    return j.get<double>();
}

std::int64_t get_integer(const json &j, const std::string &where) {
    if (!j.is_number_integer()) {
        throw ConfigError(where + ": expected an integer");
    }
    return j.get<std::int64_t>();
}

std::uint64_t get_unsigned(const json &j, const std::string &where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        throw ConfigError(where + ": expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

std::string get_string(const json &j, const std::string &where) {
    if (!j.is_string()) {
        throw ConfigError(where + ": expected a string");
    }
    return j.get<std::string>();
}

GridSpec parse_grid(const json &j, const std::string &where) {
    check_keys(j, where, {"q_min", "q_max", "m"});
    GridSpec g;
    if (j.contains("q_min")) g.q_min = get_number(j["q_min"], where + ".q_min");
    if (j.contains("q_max")) g.q_max = get_number(j["q_max"], where + ".q_max");
    if (j.contains("m")) g.m = static_cast<int>(get_integer(j["m"], where + ".m"));
    try {
        (void)g.grid();
    } catch (const Error &e) {
        throw ConfigError(where + ": " + e.what());
    }
    return g;
}

std::string parse_axis(const json &j, const std::string &where) {
    const std::string s = get_string(j, where);
    if (s != "q" && s != "p") {
        throw ConfigError(where + ": expected \"q\" or \"p\"");
    }
    return s;
}

PointerSpec parse_pointer(const json &j, const std::string &where) {
    check_keys(j, where, {"family", "sigma2", "q0", "alpha", "k0", "csv", "s", "r", "g", "grid"});
    PointerSpec p;
    if (j.contains("csv")) {
        p.csv = get_string(j["csv"], where + ".csv");
        for (const char *k : {"family", "sigma2", "q0", "alpha", "k0", "grid"}) {
            if (j.contains(k)) {
                throw ConfigError(where + ": \"" + k + "\" cannot be combined with \"csv\"");
            }
        }
        p.family.clear();
    } else {
        if (j.contains("family")) p.family = get_string(j["family"], where + ".family");
        PointerFamily fam;
        try {
            fam = parse_pointer_family(p.family);
        } catch (const Error &e) {
            throw ConfigError(where + ".family: " + e.what());
        }
        p.params = PointerFamilyParams::defaults(fam);
        if (j.contains("sigma2")) p.params.sigma2 = get_number(j["sigma2"], where + ".sigma2");
        if (j.contains("q0")) p.params.q0 = get_number(j["q0"], where + ".q0");
        if (j.contains("alpha")) p.params.alpha = get_number(j["alpha"], where + ".alpha");
        if (j.contains("k0")) p.params.k0 = get_number(j["k0"], where + ".k0");
        if (!(p.params.sigma2 > 0.0)) {
            throw ConfigError(where + ".sigma2: must be positive");
        }
        if (j.contains("grid")) p.grid = parse_grid(j["grid"], where + ".grid");
    }
    if (j.contains("s")) p.s = parse_axis(j["s"], where + ".s");
    if (j.contains("r")) p.r = parse_axis(j["r"], where + ".r");
    if (j.contains("g")) p.g = get_number(j["g"], where + ".g");
    if (!(p.g >= 0.0) || p.g > kDefaultCouplingLimit) {
        throw ConfigError(where + ".g: must lie in [0, 0.5]");
    }
    return p;
}

EngineKind parse_engine(const std::string &s) {
    if (s == "exact") return EngineKind::exact;
    if (s == "perturbative") return EngineKind::perturbative;
    if (s == "trotter") return EngineKind::trotter;
    if (s == "simultaneous") return EngineKind::simultaneous;
    throw ConfigError("engine: expected one of exact, perturbative, trotter, simultaneous");
}

cplx parse_complex(const json &j, const std::string &where) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError(where + ": expected a number or [re, im]");
}

CVector parse_vector(const json &j, const std::string &where) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(where + ": expected a non-empty array");
    }
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = parse_complex(j[i], where + "[" + std::to_string(i) + "]");
    }
    return v;
}

CMatrix parse_matrix(const json &j, int d, const std::string &where) {
    if (!j.is_array() || static_cast<int>(j.size()) != d) {
        throw ConfigError(where + ": expected " + std::to_string(d) + " rows");
    }
    CMatrix m(d, d);
    for (int r = 0; r < d; ++r) {
        const json &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != d) {
            throw ConfigError(where + "[" + std::to_string(r) + "]: expected " + std::to_string(d) + " entries");
        }
        for (int c = 0; c < d; ++c) {
            m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                                    where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    return m;
}

void validate_chain_spec(const json &j) {
    check_keys(j, "chain", {"psi_i", "psi_f", "unitaries", "observables"});
    for (const char *k : {"psi_i", "psi_f", "observables"}) {
        if (!j.contains(k)) {
            throw ConfigError(std::string("chain: missing \"") + k + "\"");
        }
    }
}

ordered_json grid_json(const GridSpec &g) {
    ordered_json j;
    j["q_min"] = g.q_min;
    j["q_max"] = g.q_max;
    j["m"] = g.m;
    return j;
}

PointerObservable axis_observable(const std::string &a) {
    return a == "q" ? PointerObservable::Q() : PointerObservable::P();
}

}  // namespace

std::string to_string(EngineKind engine) {
    switch (engine) {
        case EngineKind::exact:
            return "exact";
        case EngineKind::perturbative:
            return "perturbative";
        case EngineKind::trotter:
            return "trotter";
        case EngineKind::simultaneous:
            return "simultaneous";
    }
    return "exact";
}

const std::vector<std::string> &verification_names() {
    static const std::vector<std::string> names{
        "cumulant",         "n1",       "perturbative",    "lowering_n1", "lowering_cumulant",
        "corollary",        "appendix", "appendix_identity", "heisenberg", "covariance",
        "trotter"};
    return names;
}

RunConfig parse_config(const json &j) {
    check_keys(j, "config",
               {"scenario", "chain", "grid", "pointers", "g_levels", "reference", "engine", "order", "trotter_steps",
                "trotter_schedule", "verifications", "memory_budget", "output"});
    RunConfig c;
    if (j.contains("scenario") == j.contains("chain")) {
        throw ConfigError("config: exactly one of \"scenario\" and \"chain\" is required");
    }
    if (j.contains("scenario")) {
        const json &s = j["scenario"];
        if (s.is_string()) {
            c.scenario = s.get<std::string>();
        } else {
            check_keys(s, "scenario", {"name", "d", "n", "seed"});
            if (!s.contains("name")) {
                throw ConfigError("scenario: missing \"name\"");
            }
            c.scenario = get_string(s["name"], "scenario.name");
            if (s.contains("d")) c.scenario_params.d = static_cast<int>(get_integer(s["d"], "scenario.d"));
            if (s.contains("n")) c.scenario_params.n = static_cast<int>(get_integer(s["n"], "scenario.n"));
            if (s.contains("seed")) c.scenario_params.seed = get_unsigned(s["seed"], "scenario.seed");
        }
        const auto &reg = scenario_registry();
        if (std::none_of(reg.begin(), reg.end(), [&](const ScenarioInfo &i) { return i.name == c.scenario; })) {
            throw ConfigError("scenario: unknown scenario \"" + c.scenario + "\"");
        }
    } else {
        validate_chain_spec(j["chain"]);
        c.chain = j["chain"];
    }
    if (j.contains("grid")) c.grid = parse_grid(j["grid"], "grid");
    if (j.contains("pointers")) {
        const json &p = j["pointers"];
        if (p.is_object()) {
            c.pointers.push_back(parse_pointer(p, "pointers"));
        } else if (p.is_array() && !p.empty()) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                c.pointers.push_back(parse_pointer(p[i], "pointers[" + std::to_string(i) + "]"));
            }
        } else {
            throw ConfigError("pointers: expected an object or a non-empty array");
        }
    } else {
        c.pointers.push_back(PointerSpec{});
    }
    if (j.contains("g_levels")) {
        const json &g = j["g_levels"];
        if (!g.is_array() || g.empty()) {
            throw ConfigError("g_levels: expected a non-empty array");
        }
        c.g_levels.clear();
        std::set<double> seen;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double v = get_number(g[i], "g_levels[" + std::to_string(i) + "]");
            if (!(v > 0.0) || v > kDefaultCouplingLimit) {
                throw ConfigError("g_levels: levels must lie in (0, 0.5]");
            }
            if (!seen.insert(v).second) {
                throw ConfigError("g_levels: duplicate level");
            }
            c.g_levels.push_back(v);
        }
    }
    if (j.contains("reference")) {
        c.reference = get_number(j["reference"], "reference");
        if (!(c.reference > 0.0)) {
            throw ConfigError("reference: must be positive");
        }
    }
    if (j.contains("engine")) c.engine = parse_engine(get_string(j["engine"], "engine"));
    if (j.contains("order")) {
        c.order = static_cast<int>(get_integer(j["order"], "order"));
        if (c.order < 0 || c.order > 12) {
            throw ConfigError("order: must lie in 0..12");
        }
    }
    if (j.contains("trotter_steps")) {
        c.trotter_steps = static_cast<int>(get_integer(j["trotter_steps"], "trotter_steps"));
        if (c.trotter_steps < 1 || c.trotter_steps > kMaxTrotterSteps) {
            throw ConfigError("trotter_steps: must lie in 1..10000");
        }
    }
    if (j.contains("trotter_schedule")) {
        const json &t = j["trotter_schedule"];
        if (!t.is_array() || t.size() < 2) {
            throw ConfigError("trotter_schedule: expected at least two step counts");
        }
        c.trotter_schedule.clear();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto v = get_integer(t[i], "trotter_schedule[" + std::to_string(i) + "]");
            if (v < 1 || v > kMaxTrotterSteps || (i > 0 && v != 2 * c.trotter_schedule.back())) {
                throw ConfigError("trotter_schedule: step counts must double and lie in 1..10000");
            }
            c.trotter_schedule.push_back(static_cast<int>(v));
        }
    }
    if (j.contains("verifications")) {
        const json &v = j["verifications"];
        if (!v.is_array()) {
            throw ConfigError("verifications: expected an array");
        }
        const auto &names = verification_names();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string name = get_string(v[i], "verifications[" + std::to_string(i) + "]");
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                throw ConfigError("verifications: unknown verification \"" + name + "\"");
            }
            c.verifications.push_back(name);
        }
    }
    if (j.contains("memory_budget")) {
        c.memory_budget = get_unsigned(j["memory_budget"], "memory_budget");
    }
    if (j.contains("output")) c.output = get_string(j["output"], "output");
    return c;
}

RunConfig parse_config_text(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ordered_json echo(const RunConfig &c) {
    ordered_json j;
    if (!c.scenario.empty()) {
        ordered_json s;
        s["name"] = c.scenario;
        s["d"] = c.scenario_params.d;
        s["n"] = c.scenario_params.n;
        s["seed"] = c.scenario_params.seed;
        j["scenario"] = s;
    } else {
        j["chain"] = ordered_json::parse(c.chain.dump());
    }
    j["grid"] = grid_json(c.grid);
    ordered_json ptrs = ordered_json::array();
    for (const auto &p : c.pointers) {
        ordered_json o;
        if (!p.csv.empty()) {
            o["csv"] = p.csv;
        } else {
            o["family"] = p.family;
            o["sigma2"] = p.params.sigma2;
            o["q0"] = p.params.q0;
            o["alpha"] = p.params.alpha;
            o["k0"] = p.params.k0;
            if (p.grid) o["grid"] = grid_json(*p.grid);
        }
        o["s"] = p.s;
        o["r"] = p.r;
        o["g"] = p.g;
        ptrs.push_back(o);
    }
    j["pointers"] = ptrs;
    j["g_levels"] = c.g_levels;
    j["reference"] = c.reference;
    j["engine"] = to_string(c.engine);
    j["order"] = c.order;
    j["trotter_steps"] = c.trotter_steps;
    j["trotter_schedule"] = c.trotter_schedule;
    j["verifications"] = c.verifications;
    j["memory_budget"] = c.memory_budget;
    return j;
}

EvolutionChain build_chain(const RunConfig &c) {
    if (!c.scenario.empty()) {
        return build_scenario(c.scenario, c.scenario_params);
    }
    const json &j = c.chain;
    const CVector psi_i = parse_vector(j["psi_i"], "chain.psi_i");
    const CVector psi_f = parse_vector(j["psi_f"], "chain.psi_f");
    const int d = static_cast<int>(psi_i.size());
    if (psi_f.size() != d) {
        throw ConfigError("chain: psi_i and psi_f differ in dimension");
    }
    if (!j["observables"].is_array()) {
        throw ConfigError("chain.observables: expected an array");
    }
    std::vector<Observable> obs;
    for (std::size_t k = 0; k < j["observables"].size(); ++k) {
        obs.emplace_back(parse_matrix(j["observables"][k], d, "chain.observables[" + std::to_string(k) + "]"));
    }
    std::vector<UnitaryOp> us;
    if (j.contains("unitaries")) {
        const json &u = j["unitaries"];
        if (!u.is_array() || u.size() != obs.size() + 1) {
            throw ConfigError("chain.unitaries: expected one more unitary than observables");
        }
        for (std::size_t k = 0; k < u.size(); ++k) {
            us.emplace_back(parse_matrix(u[k], d, "chain.unitaries[" + std::to_string(k) + "]"));
        }
    } else {
        us.assign(obs.size() + 1, UnitaryOp::identity(d));
    }
    return EvolutionChain(SystemState::normalized(psi_i), SystemState::normalized(psi_f), std::move(us),
                          std::move(obs));
}

Experiment build_experiment(const RunConfig &c) {
    EvolutionChain chain = build_chain(c);
    const int n = chain.size();
    if (c.pointers.size() != 1 && static_cast<int>(c.pointers.size()) != n) {
        throw ConfigError("pointers: expected one spec or one per observable (" + std::to_string(n) + ")");
    }
    std::vector<PointerConfig> cfgs;
    for (int k = 0; k < n; ++k) {
        const PointerSpec &p = c.pointers.size() == 1 ? c.pointers[0] : c.pointers[static_cast<std::size_t>(k)];
        std::optional<PointerWavefunction> phi;
        if (!p.csv.empty()) {
            try {
                phi = load_wavefunction_csv(p.csv);
            } catch (const Error &e) {
                throw ConfigError("pointer csv " + p.csv + ": " + e.what());
            }
        } else {
            const GridSpec g = p.grid.value_or(c.grid);
            try {
                phi = pointer_family(parse_pointer_family(p.family), p.params, g.grid());
            } catch (const Error &e) {
                throw ConfigError("pointer " + std::to_string(k + 1) + ": " + e.what());
            }
        }
        cfgs.push_back({*phi, axis_observable(p.s), axis_observable(p.r), p.g});
    }
    return Experiment(std::move(chain), std::move(cfgs));
}

}  // namespace wmc::cli
