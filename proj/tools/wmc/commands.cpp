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

#include "wmc/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace wmc::cli {

using nlohmann::ordered_json;

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ordered_json subset_json(SubsetMask mask) {
    return ordered_json(mask_elements(mask));
}

MomentOptions moment_options(const RunConfig &c, int threads) {
    MomentOptions o;
    switch (c.engine) {
        case EngineKind::exact:
        case EngineKind::perturbative:
            o.engine = CouplingEngine::sequential;
            break;
        case EngineKind::simultaneous:
            o.engine = CouplingEngine::simultaneous;
            break;
        case EngineKind::trotter:
            o.engine = CouplingEngine::trotter;
            break;
    }
    o.threads = threads;
    o.trotter_steps = c.trotter_steps;
    o.budget = static_cast<std::size_t>(c.memory_budget);
    return o;
}

SweepOptions sweep_options(const RunConfig &c, int threads) {
    SweepOptions s;
    s.levels = c.g_levels;
    s.reference = c.reference;
    s.moments = moment_options(c, threads);
    return s;
}

std::vector<PointerCoupling> couplings_of(const Experiment &exp) {
    std::vector<PointerCoupling> out;
    for (const auto &p : exp.pointers()) {
        out.push_back({p.phi, p.s});
    }
    return out;
}

VerificationReport run_one(const std::string &name, const Experiment &exp, const RunConfig &c, int threads) {
    const SweepOptions so = sweep_options(c, threads);
    if (c.engine == EngineKind::perturbative && name != "perturbative") {
        throw ConfigError("engine \"perturbative\" only pairs with the \"perturbative\" verification");
    }
    if (name == "cumulant") return verify_cumulant_theorem(exp, so);
    if (name == "n1") return verify_n1(exp, so);
    if (name == "perturbative") return verify_perturbative(exp, full_mask(exp.size()), c.order, so);
    if (name == "lowering_n1") return verify_lowering(exp, LoweringMode::n1, so);
    if (name == "lowering_cumulant") return verify_lowering(exp, LoweringMode::cumulant, so);
    if (name == "corollary") return verify_lowering(exp, LoweringMode::anticumulant_corollary, so);
    if (name == "appendix") return verify_appendix_oracle(exp, so);
    if (name == "appendix_identity") {
        if (exp.size() != 2) {
            throw ConfigError("appendix_identity needs two observables");
        }
        return appendix_cumulant_identity(moment_set(exp.pointer(1).phi), moment_set(exp.pointer(2).phi),
                                          WeakValueBundle::from_chain(exp.chain()), exp.pointer(1).g,
                                          exp.pointer(2).g);
    }
    if (name == "heisenberg") return heisenberg_check(exp);
    if (name == "covariance") return covariance_counterexample(exp, so);
    if (name == "trotter") return verify_trotter_convergence(exp, c.trotter_schedule);
    throw ConfigError("unknown verification \"" + name + "\"");
}

void emit(const std::string &text, const std::string &path, std::ostream &out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + path);
    }
    f << text;
}

}  // namespace

std::string scenario_listing(const std::string &filter) {
    std::ostringstream os;
    for (const auto &info : scenario_registry()) {
        if (info.name.find(filter) == std::string::npos) {
            continue;
        }
        os << info.name << "  n=" << (info.observables < 0 ? std::string("param") : std::to_string(info.observables))
           << "  " << info.description << "\n";
        for (const auto &p : info.parameters) {
            os << "    " << p.name << ": " << p.type << " = " << p.default_value << "  " << p.description << "\n";
        }
    }
    return os.str();
}

std::vector<std::string> default_verifications(int n) {
    if (n == 1) return {"n1"};
    if (n == 2) return {"cumulant", "heisenberg"};
    return {"cumulant"};
}

ordered_json complex_json(cplx z) {
    ordered_json j;
    j["re"] = z.real();
    j["im"] = z.imag();
    return j;
}

ordered_json report_json(const VerificationReport &r) {
    ordered_json j;
    j["label"] = r.label;
    j["passed"] = r.passed;
    j["lhs"] = complex_json(r.lhs);
    j["rhs"] = complex_json(r.rhs);
    j["residual"] = r.residual;
    j["g"] = r.g_values;
    j["exponent"] = r.scaling_exponent ? ordered_json(*r.scaling_exponent) : ordered_json(nullptr);
    j["claimed_order"] = r.claimed_order;
    ordered_json metrics = ordered_json::object();
    for (const auto &[k, v] : r.metrics) {
        metrics[k] = v;
    }
    j["metrics"] = metrics;
    ordered_json levels = ordered_json::array();
    for (const auto &lv : r.levels) {
        ordered_json l;
        l["level"] = lv.level;
        l["g"] = lv.g;
        l["lhs"] = complex_json(lv.lhs);
        l["rhs"] = complex_json(lv.rhs);
        l["residual"] = lv.residual;
        l["noise_floor"] = lv.noise_floor;
        levels.push_back(l);
    }
    j["levels"] = levels;
    j["details"] = r.details;
    return j;
}

ordered_json run_results(const RunConfig &c, int threads) {
    const Experiment exp = build_experiment(c);
    const EvolutionChain &chain = exp.chain();
    const int n = exp.size();
    if (n < 1) {
        throw ConfigError("the chain has no observables");
    }
    MomentFunctional moments(1, {1.0, 0.0});
    if (c.engine == EngineKind::perturbative) {
        moments = MomentFunctional::from_function(
            n, [&](SubsetMask m) { return m == 0 ? cplx(1.0) : run_perturbative(exp, m, c.order); });
    } else {
        moments = pointer_moments(exp, moment_options(c, threads));
    }
    const MomentFunctional pointer_cumulants = cumulants_of(moments);
    const MomentFunctional seq = weak_value_functional(chain, WeakValueMode::sequential);
    const MomentFunctional sim = weak_value_functional(chain, WeakValueMode::simultaneous);
    const MomentFunctional weak_cumulants =
        cumulants_of(c.engine == EngineKind::exact || c.engine == EngineKind::perturbative ? seq : sim);

    ordered_json out;
    out["inputs"] = echo(c);
    out["couplings"] = exp.couplings();
    ordered_json expectations = ordered_json::array();
    ordered_json cumulants = ordered_json::array();
    ordered_json weak = ordered_json::array();
    for (SubsetMask m = 1; m <= full_mask(n); ++m) {
        ordered_json e;
        e["subset"] = subset_json(m);
        e["value"] = complex_json(moments(m));
        expectations.push_back(e);
        ordered_json k;
        k["subset"] = subset_json(m);
        k["pointer"] = complex_json(pointer_cumulants(m));
        k["weak"] = complex_json(weak_cumulants(m));
        cumulants.push_back(k);
        ordered_json w;
        w["subset"] = subset_json(m);
        w["sequential"] = complex_json(seq(m));
        w["simultaneous"] = complex_json(sim(m));
        weak.push_back(w);
    }
    out["expectations"] = expectations;
    out["cumulants"] = cumulants;
    out["weak_values"] = weak;
    std::vector<PointerSetting> settings;
    for (const auto &p : exp.pointers()) {
        settings.push_back({p.phi, PointerOperator(p.r), p.s});
    }
    out["xi"] = complex_json(xi_factor(settings));
    try {
        out["theta"] = complex_json(theta_factor(couplings_of(exp)));
    } catch (const SingularEtaError &) {
        out["theta"] = nullptr;
    }
    return out;
}

std::vector<VerificationReport> run_verifications(const RunConfig &c, int threads) {
    const Experiment exp = build_experiment(c);
    const std::vector<std::string> names =
        c.verifications.empty() ? default_verifications(exp.size()) : c.verifications;
    std::vector<VerificationReport> reports;
    for (const auto &name : names) {
        reports.push_back(run_one(name, exp, c, threads));
    }
    return reports;
}

std::string sweep_csv(const RunConfig &c, int threads) {
    if (c.g_levels.size() < 3) {
        throw ConfigError("sweep needs at least three g levels");
    }
    const Experiment exp = build_experiment(c);
    const std::string name = c.verifications.empty() ? default_verifications(exp.size()).front() : c.verifications[0];
    const VerificationReport r = run_one(name, exp, c, threads);
    if (r.levels.empty()) {
        throw ConfigError("verification \"" + name + "\" has no coupling sweep");
    }
    std::ostringstream os;
    os << "g_product,lhs,rhs,residual";
    for (int k = 1; k <= exp.size(); ++k) {
        os << ",g_" << k;
    }
    os << "\n";
    for (const auto &lv : r.levels) {
        double prod = 1.0;
        for (double g : lv.g) {
            prod *= g;
        }
        os << fmt(prod) << "," << fmt(lv.lhs.real()) << "," << fmt(lv.rhs.real()) << "," << fmt(lv.residual);
        for (double g : lv.g) {
            os << "," << fmt(g);
        }
        os << "\n";
    }
    return os.str();
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"wmc: sequential weak-measurement cumulant simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_path;
    int threads = 1;
    std::optional<std::uint64_t> seed;
    app.add_option("--out", out_path, "output file (default: config \"output\", else stdout)");
    app.add_option("--threads", threads, "worker threads for per-subset experiments")->check(CLI::Range(1, 256));
    app.add_option("--seed", seed, "seed for random scenarios");

    auto *scenario = app.add_subcommand("scenario", "scenario registry");
    scenario->require_subcommand(1);
    std::string filter;
    auto *list = scenario->add_subcommand("list", "list registered scenarios");
    list->add_option("filter", filter, "substring filter on scenario names");

    std::string config_path;
    auto *run = app.add_subcommand("run", "run an engine and write JSON results");
    run->add_option("config", config_path)->required();
    auto *verify = app.add_subcommand("verify", "run verifications and write JSON reports");
    verify->add_option("config", config_path)->required();
    auto *sweep = app.add_subcommand("sweep", "write per-level residuals as CSV");
    sweep->add_option("config", config_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (list->parsed()) {
            out << scenario_listing(filter);
            return kExitOk;
        }
        RunConfig c = load_config(config_path);
        if (seed) {
            c.scenario_params.seed = *seed;
        }
        const std::string path = out_path.empty() ? c.output : out_path;
        if (run->parsed()) {
            emit(run_results(c, threads).dump(2) + "\n", path, out);
            return kExitOk;
        }
        if (verify->parsed()) {
            const auto reports = run_verifications(c, threads);
            ordered_json j;
            j["inputs"] = echo(c);
            j["reports"] = ordered_json::array();
            bool all = true;
            for (const auto &r : reports) {
                j["reports"].push_back(report_json(r));
                all = all && r.passed;
            }
            emit(j.dump(2) + "\n", path, out);
            for (const auto &r : reports) {
                err << (r.passed ? "PASS " : "FAIL ") << r.label << "\n";
            }
            return all ? kExitOk : kExitFailure;
        }
        emit(sweep_csv(c, threads), path, out);
        return kExitOk;
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ArgumentError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SingularEtaError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DegeneratePostselectionError &e) {
        err << "degenerate post-selection: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const SizeError &e) {
        err << "memory budget exceeded: " << e.what() << "\n";
        return kExitMemory;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace wmc::cli
