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

#include <random>

#include "benchmark/benchmark.h"
#include "wmc/scenarios.hpp"
#include "wmc/theorem_harness.hpp"

using namespace wmc;

namespace {

Experiment experiment(const EvolutionChain &chain, int m, double g = 1e-2) {
    const auto phi = pointer_family(PointerFamily::chirped, PointerGrid::standard(m));
    std::vector<PointerConfig> cfgs(chain.size(), PointerConfig{phi, PointerObservable::P(), PointerObservable::Q(), g});
    return Experiment(chain, cfgs);
}

}  // namespace

static void BM_partitions_enumerate(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        std::int64_t count = 0;
        for_each_partition(n, [&](std::span<const SubsetMask>) { ++count; });
        benchmark::DoNotOptimize(count);
    }
}
BENCHMARK(BM_partitions_enumerate)->DenseRange(6, 12, 2);

static void BM_cumulant(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    const auto m = MomentFunctional::from_function(n, [&](SubsetMask) { return cplx(nd(rng), nd(rng)); });
    for (auto _ : state) {
        benchmark::DoNotOptimize(cumulant(m));
    }
}
BENCHMARK(BM_cumulant)->DenseRange(2, 10, 2);

static void BM_run_exact(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const int m = static_cast<int>(state.range(1));
    const Experiment e = experiment(random_chain(4, n, 3), m);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_exact(e, full_mask(n)).norm2);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(std::pow(m, n)));
}
BENCHMARK(BM_run_exact)->Args({1, 256})->Args({2, 128})->Args({2, 256})->Args({3, 64})->Args({3, 128});

static void BM_pointer_cumulant(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    MomentOptions o;
    o.threads = static_cast<int>(state.range(1));
    const Experiment e = experiment(random_chain(4, n, 5), 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pointer_cumulant(e, o));
    }
}
BENCHMARK(BM_pointer_cumulant)->Args({2, 1})->Args({3, 1})->Args({3, 4})->UseRealTime();

static void BM_trotter(benchmark::State &state) {
    const int steps = static_cast<int>(state.range(0));
    const Experiment e = experiment(noncommuting_pair(), 128, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trotter_simultaneous(e, steps).norm2);
    }
}
BENCHMARK(BM_trotter)->RangeMultiplier(4)->Range(4, 256);

static void BM_perturbative(benchmark::State &state) {
    const int order = static_cast<int>(state.range(0));
    const Experiment e = experiment(random_chain(4, 2, 7), 128);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_perturbative(e, 0b11, order));
    }
}
BENCHMARK(BM_perturbative)->DenseRange(1, 4);

BENCHMARK_MAIN();
