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

#ifndef WMC_SCENARIOS_HPP
#define WMC_SCENARIOS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wmc/pointer_space.hpp"
#include "wmc/quantum_core.hpp"

namespace wmc {

/// (1/sqrt 2) [[1, i], [i, 1]].
CMatrix beamsplitter();

/// Two 50/50 interferometers in series on a two-mode space, with projectors onto mode 0
/// after each of the first two beamsplitters. Weak values 0, 0 and -1/2 for the pair.
EvolutionChain double_interferometer();

/// Two interferometers joined by a single link: mode 0 passes through, the other arm is
/// swapped into a dump mode that the post-selection excludes. Weak values 1/2, 1/2, 1/4.
EvolutionChain bottleneck_interferometer();

/// Four-observable chain made of two double interferometers joined by the bottleneck link.
/// Pairs {1,2} and {3,4} each have weak value -1/2 and are weakly independent.
EvolutionChain bottleneck4();

/// 2 (x) 2 chain with every ingredient factorised; A_1 acts on the first factor, A_2 on the
/// second.
EvolutionChain product_bipartite();

/// d = 2, A_1 = sigma_x, A_2 = sigma_z, identity unitaries, generic pre/post selection.
EvolutionChain noncommuting_pair();

/// d = 2, two diagonal observables, identity unitaries.
EvolutionChain commuting_pair();

/// Seeded random chain: Haar unitaries, Hermitian observables of spectral norm 1, random
/// pre/post selection. Redrawn (at most 1000 times) until |amplitude| >= min_amplitude.
/// d <= 8, 0 <= n <= 4.
EvolutionChain random_chain(int d, int n, std::uint64_t seed, double min_amplitude = 0.1);

/// As random_chain, with every observable a random rank-1 projector.
EvolutionChain random_projector_chain(int d, int n, std::uint64_t seed, double min_amplitude = 0.1);

/// Random chain on 2a modes built by the bottleneck recipe: observables 1..split act before a
/// link that passes only mode 0 onward; the remaining arms are swapped with empty dump modes.
/// Observables on both sides act within the first a modes.
EvolutionChain random_bottleneck_chain(int a, int n, int split, std::uint64_t seed);

/// Haar-distributed unitary from a seeded generator.
CMatrix random_unitary(int d, std::uint64_t seed);

enum class PointerFamily { gaussian, real_nongaussian, chirped, boosted };

struct PointerFamilyParams {
    double sigma2 = 0.5;
    double q0 = 0.0;
    double alpha = 0.3;
    double k0 = 0.7;

    /// Family defaults: boosted pointers are also displaced to q0 = 0.5.
    static PointerFamilyParams defaults(PointerFamily family);
};

std::string to_string(PointerFamily family);
/// Throws ArgumentError on an unknown name.
PointerFamily parse_pointer_family(const std::string &name);
std::vector<PointerFamily> all_pointer_families();

/// gaussian:         exp(-(q - q0)^2 / (4 sigma2))
/// real_nongaussian: exp(-(q - q0)^2 / (16 sigma2)) / (1 + (q - q0)^2)
/// chirped:          gaussian * exp(i alpha q^2)
/// boosted:          gaussian * exp(i k0 q)
PointerWavefunction pointer_family(PointerFamily family, const PointerFamilyParams &params,
                                   const PointerGrid &grid = PointerGrid::standard());
PointerWavefunction pointer_family(PointerFamily family, const PointerGrid &grid = PointerGrid::standard());

/// Gaussian envelope with random width, centre, boost and chirp, plus a displaced second
/// component so that the profile is not Gaussian.
PointerWavefunction random_pointer(std::uint64_t seed, const PointerGrid &grid = PointerGrid::standard());

struct ScenarioParameter {
    std::string name;
    std::string type;
    std::string default_value;
    std::string description;
};

struct ScenarioInfo {
    std::string name;
    std::string description;
    int observables;  // -1 when set by the "n" parameter
    std::vector<ScenarioParameter> parameters;
};

struct ScenarioParams {
    int d = 4;
    int n = 2;
    std::uint64_t seed = 1;
};

const std::vector<ScenarioInfo> &scenario_registry();
/// Throws ArgumentError for an unknown name.
EvolutionChain build_scenario(const std::string &name, const ScenarioParams &params = {});

}  // namespace wmc

#endif  // WMC_SCENARIOS_HPP
