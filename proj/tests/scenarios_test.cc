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

#include "wmc/scenarios.hpp"

#include <Eigen/Eigenvalues>

#include "gtest/gtest.h"

using namespace wmc;

TEST(scenarios, beamsplitter_is_unitary_and_symmetric) {
    const CMatrix b = beamsplitter();
    EXPECT_LT((b.adjoint() * b - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(std::abs(b(0, 1) - b(1, 0)), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(b(0, 1) - kI / std::sqrt(2.0)), 0.0, 1e-16);
}

TEST(scenarios, bottleneck4_pairs_and_independence) {
    const EvolutionChain c = bottleneck4();
    ASSERT_EQ(c.size(), 4);
    EXPECT_NEAR(std::abs(sequential_weak_value(c, SubsetMask{0b0011}) - (-0.5)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(sequential_weak_value(c, SubsetMask{0b1100}) - (-0.5)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(sequential_weak_value(c, SubsetMask{0b1111}) - 0.25), 0.0, 1e-12);
    EXPECT_TRUE(is_weakly_independent(c, 0b0011, 0b1100));
    EXPECT_NEAR(std::abs(weak_value_cumulant(c)), 0.0, 1e-12);
}

TEST(scenarios, random_chain_is_deterministic) {
    const EvolutionChain a = random_chain(4, 3, 42);
    const EvolutionChain b = random_chain(4, 3, 42);
    const EvolutionChain c = random_chain(4, 3, 43);
    for (int k = 1; k <= 4; ++k) {
        EXPECT_EQ(a.unitary(k).matrix(), b.unitary(k).matrix());
    }
    EXPECT_EQ(a.observable(2).matrix(), b.observable(2).matrix());
    EXPECT_NE(a.observable(1).matrix(), c.observable(1).matrix());
    EXPECT_EQ(random_unitary(5, 7), random_unitary(5, 7));
    EXPECT_EQ(random_pointer(3).samples(), random_pointer(3).samples());
}

TEST(scenarios, random_chains_are_non_degenerate_20_seeds) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (int d : {2, 4, 8}) {
            EXPECT_GE(std::abs(random_chain(d, 3, seed).amplitude()), 0.1 - 1e-15) << seed << " " << d;
            EXPECT_GE(std::abs(random_projector_chain(d, 2, seed).amplitude()), 0.1 - 1e-15);
        }
    }
}

TEST(scenarios, random_observables_are_unit_norm) {
    const EvolutionChain c = random_chain(4, 2, 3);
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(c.observable(1).matrix());
    EXPECT_NEAR(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0, 1e-12);
    const EvolutionChain p = random_projector_chain(4, 2, 3);
    const CMatrix m = p.observable(1).matrix();
    EXPECT_LT((m * m - m).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(m.trace().real(), 1.0, 1e-12);
}

TEST(scenarios, random_bottleneck_is_weakly_independent) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const EvolutionChain c = random_bottleneck_chain(2, 4, 2, seed);
        EXPECT_EQ(c.dim(), 4);
        EXPECT_TRUE(is_weakly_independent(c, 0b0011, 0b1100)) << seed;
    }
}

TEST(scenarios, product_and_pair_chains) {
    EXPECT_EQ(product_bipartite().dim(), 4);
    EXPECT_TRUE(is_weakly_independent(product_bipartite(), 0b01, 0b10));
    const EvolutionChain nc = noncommuting_pair();
    const CMatrix comm = nc.observable(1).matrix() * nc.observable(2).matrix() -
                         nc.observable(2).matrix() * nc.observable(1).matrix();
    EXPECT_GT(comm.cwiseAbs().maxCoeff(), 1.0);
    const EvolutionChain cp = commuting_pair();
    const CMatrix zero = cp.observable(1).matrix() * cp.observable(2).matrix() -
                         cp.observable(2).matrix() * cp.observable(1).matrix();
    EXPECT_LT(zero.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(pointer_families, parse_round_trip_and_normalisation) {
    for (PointerFamily f : all_pointer_families()) {
        EXPECT_EQ(parse_pointer_family(to_string(f)), f);
        const auto phi = pointer_family(f, PointerGrid::standard(128));
        EXPECT_NEAR(std::abs(inner_product(phi.grid(), phi.samples(), phi.samples()) - 1.0), 0.0, 1e-12);
    }
    EXPECT_THROW(parse_pointer_family("lorentzian"), ArgumentError);
    EXPECT_THROW(pointer_family(PointerFamily::gaussian, {-1.0, 0.0, 0.0, 0.0}), ArgumentError);
}

TEST(pointer_families, real_nongaussian_is_real_with_zero_mean_momentum) {
    const auto phi = pointer_family(PointerFamily::real_nongaussian);
    EXPECT_LT(phi.samples().imag().cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(std::abs(moment(phi, {PointerOperator(PointerObservable::P())})), 0.0, 1e-12);
    // Not Gaussian: excess kurtosis of |phi|^2 is non-zero.
    const PointerOperator q(PointerObservable::Q());
    const double m2 = moment(phi, {q, q}).real();
    const double m4 = moment(phi, {q, q, q, q}).real();
    EXPECT_GT(std::abs(m4 / (m2 * m2) - 3.0), 0.1);
}

TEST(registry, lists_and_builds) {
    const auto &reg = scenario_registry();
    std::vector<std::string> names;
    for (const auto &info : reg) names.push_back(info.name);
    EXPECT_NE(std::find(names.begin(), names.end(), "double_interferometer"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "bottleneck"), names.end());
    for (const auto &info : reg) {
        const EvolutionChain c = build_scenario(info.name);
        if (info.observables >= 0) {
            EXPECT_EQ(c.size(), info.observables) << info.name;
        }
    }
    ScenarioParams p;
    p.d = 3;
    p.n = 4;
    p.seed = 9;
    EXPECT_EQ(build_scenario("random", p).size(), 4);
    EXPECT_EQ(build_scenario("random", p).dim(), 3);
    EXPECT_THROW(build_scenario("hardy"), ArgumentError);
    p.d = 9;
    EXPECT_THROW(build_scenario("random", p), ArgumentError);
}
