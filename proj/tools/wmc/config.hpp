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

#ifndef WMC_TOOLS_CONFIG_HPP
#define WMC_TOOLS_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wmc/coupling_engine.hpp"
#include "wmc/scenarios.hpp"

namespace wmc::cli {

/// Malformed or schema-violating configuration; maps to exit code 2.
class ConfigError : public Error {
  public:
    using Error::Error;
};

struct GridSpec {
    double q_min = -12.0;
    double q_max = 12.0;
    int m = 256;

    PointerGrid grid() const {
        return PointerGrid(q_min, q_max, m);
    }
};

struct PointerSpec {
    std::string family = "gaussian";  // empty when csv is set
    PointerFamilyParams params;
    std::string csv;
    std::string s = "p";
    std::string r = "q";
    double g = 1e-2;
    std::optional<GridSpec> grid;
};

enum class EngineKind { exact, perturbative, trotter, simultaneous };

struct RunConfig {
    std::string scenario;  // empty when chain is inline
    ScenarioParams scenario_params;
    nlohmann::json chain;  // inline chain spec, null when scenario is named
    GridSpec grid;
    std::vector<PointerSpec> pointers;
    std::vector<double> g_levels{4e-2, 2e-2, 1e-2, 5e-3};
    double reference = 1e-2;
    EngineKind engine = EngineKind::exact;
    int order = 2;
    int trotter_steps = 64;
    std::vector<int> trotter_schedule{16, 32, 64, 128};
    std::vector<std::string> verifications;
    std::uint64_t memory_budget = kDefaultMemoryBudget;
    std::string output;
};

std::string to_string(EngineKind engine);

/// Verification names accepted in "verifications".
const std::vector<std::string> &verification_names();

/// Parses and validates; unknown keys and wrong types throw ConfigError.
RunConfig parse_config(const nlohmann::json &j);
RunConfig parse_config_text(const std::string &text);
RunConfig load_config(const std::string &path);

/// Fully expanded configuration; parse_config(echo(c)) reproduces c.
nlohmann::ordered_json echo(const RunConfig &config);

EvolutionChain build_chain(const RunConfig &config);
Experiment build_experiment(const RunConfig &config);

}  // namespace wmc::cli

#endif  // WMC_TOOLS_CONFIG_HPP
