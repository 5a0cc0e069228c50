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

#ifndef WMC_TOOLS_COMMANDS_HPP
#define WMC_TOOLS_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "wmc/config.hpp"
#include "wmc/theorem_harness.hpp"

namespace wmc::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitDegenerate = 3,
    kExitMemory = 4,
};

std::string scenario_listing(const std::string &filter);

/// Verifications run when the config selects none.
std::vector<std::string> default_verifications(int n);

nlohmann::ordered_json complex_json(cplx z);
nlohmann::ordered_json report_json(const VerificationReport &report);

nlohmann::ordered_json run_results(const RunConfig &config, int threads);
std::vector<VerificationReport> run_verifications(const RunConfig &config, int threads);
std::string sweep_csv(const RunConfig &config, int threads);

/// Entry point for the wmc executable; returns the process exit code.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace wmc::cli

#endif  // WMC_TOOLS_COMMANDS_HPP
