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

#include "wmc/quantum_core.hpp"

#include <random>

#include "gtest/gtest.h"
#include "wmc/scenarios.hpp"

using namespace wmc;

namespace {

// Sum over basis paths x_0..x_n of prod <x_{k}|U_{k+1}|x_{k-1}> with observables inserted as
// their matrix elements; independent of the library's chain contraction.
cplx path_sum(const EvolutionChain &chain, const std::vector<int> &powers) {
    const int d = chain.dim();
    const int n = chain.size();
    std::vector<CMatrix> steps;
    for (int k = 1; k <= n; ++k) {
        CMatrix a = CMatrix::Identity(d, d);
        for (int p = 0; p < powers[k - 1]; ++p) {
            a = a * chain.observable(k).matrix();
        }
        steps.push_back(a);
    }
    cplx total = 0.0;
    std::vector<int> x(2 * n + 1, 0);
    const long paths = static_cast<long>(std::pow(d, 2 * n + 1));
    for (long idx = 0; idx < paths; ++idx) {
        long t = idx;
        for (auto &xi : x) {
            xi = static_cast<int>(t % d);
            t /= d;
        }
        cplx amp = 0.0;
        for (int a = 0; a < d; ++a) {
            amp += chain.unitary(1).matrix()(x[0], a) * chain.psi_i().amplitudes()(a);
        }
        for (int k = 1; k <= n; ++k) {
            amp *= steps[k - 1](x[2 * k - 1], x[2 * k - 2]);
            amp *= chain.unitary(k + 1).matrix()(x[2 * k], x[2 * k - 1]);
        }
        amp *= std::conj(chain.psi_f().amplitudes()(x[2 * n]));
        total += amp;
    }
    return total;
}

CVector basis(int d, int i) {
    return CVector::Unit(d, i);
}

}  // namespace

TEST(system_state, validation) {
    EXPECT_THROW(SystemState(CVector::Constant(2, 1.0)), ArgumentError);
    const SystemState s = SystemState::normalized(CVector::Constant(2, 3.0));
    EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-15);
    EXPECT_EQ(SystemState::basis(3, 1).amplitudes(), basis(3, 1));
}

TEST(observable, validation) {
    CMatrix m(2, 2);
    m << 1.0, kI, 0.0, 1.0;
    EXPECT_THROW(Observable{m}, ArgumentError);
    EXPECT_THROW(Observable{CMatrix::Zero(2, 3)}, ArgumentError);
    const Observable p = Observable::projector(CVector::Constant(2, 1.0));
    EXPECT_NEAR(std::abs(p.matrix()(0, 1) - 0.5), 0.0, 1e-15);
    EXPECT_EQ(hermiticity_defect(m), std::abs(kI));
}

TEST(unitary_op, validation) {
    EXPECT_THROW(UnitaryOp(CMatrix::Constant(2, 2, 1.0)), ArgumentError);
    EXPECT_TRUE(UnitaryOp::identity(3).is_identity());
    EXPECT_FALSE(UnitaryOp(beamsplitter()).is_identity());
}

TEST(weak_value, single_observable) {
    // sigma_x between |0> and |+>-like state: <f|A|i>/<f|i>.
    CMatrix sx(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    const SystemState i = SystemState::basis(2, 0);
    CVector f(2);
    f << 0.6, 0.8 * kI;
    const cplx want = (std::conj(f(1)) * 1.0) / std::conj(f(0));
    EXPECT_NEAR(std::abs(weak_value(Observable(sx), i, SystemState(f)) - want), 0.0, 1e-14);
}

TEST(weak_value, orthogonal_postselection_rejected) {
    try {
        weak_value(Observable::identity(2), SystemState::basis(2, 0), SystemState::basis(2, 1));
        FAIL();
    } catch (const DegeneratePostselectionError &e) {
        EXPECT_LT(e.magnitude(), 1e-8);
    }
}

TEST(evolution_chain, validation) {
    const auto i = SystemState::basis(2, 0);
    const auto u = UnitaryOp::identity(2);
    EXPECT_THROW(EvolutionChain(i, i, {u}, {Observable::identity(2)}), ArgumentError);
    EXPECT_THROW(EvolutionChain(i, SystemState::basis(3, 0), {u, u}, {Observable::identity(2)}), ArgumentError);
    EXPECT_THROW(EvolutionChain(i, SystemState::basis(2, 1), {u, u}, {Observable::identity(2)}),
                 DegeneratePostselectionError);
    const EvolutionChain empty(i, i, {u}, {});
    EXPECT_EQ(empty.size(), 0);
    EXPECT_NEAR(std::abs(empty.amplitude() - 1.0), 0.0, 1e-15);
}

TEST(interferometers, double_interferometer_weak_values) {
    const EvolutionChain c = double_interferometer();
    EXPECT_NEAR(std::abs(sequential_weak_value(c, SubsetMask{0b01})), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(sequential_weak_value(c, SubsetMask{0b10})), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(sequential_weak_value(c, SubsetMask{0b11}) - (-0.5)), 0.0, 1e-12);
}

TEST(interferometers, bottleneck_weak_values) {
    const EvolutionChain c = bottleneck_interferometer();
    EXPECT_NEAR(std::abs(sequential_weak_value(c, SubsetMask{0b01}) - 0.5), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(sequential_weak_value(c, SubsetMask{0b10}) - 0.5), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(sequential_weak_value(c, SubsetMask{0b11}) - 0.25), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(weak_value_cumulant(c)), 0.0, 1e-12);
    EXPECT_TRUE(is_weakly_independent(c, 0b01, 0b10));
    EXPECT_FALSE(is_weakly_independent(double_interferometer(), 0b01, 0b10));
}

TEST(sequential_weak_value, matches_basis_path_sums) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int d = 2 + static_cast<int>(seed % 2);
        const int n = 1 + static_cast<int>(seed % 3);
        const EvolutionChain c = random_chain(d, n, seed);
        const cplx denom = path_sum(c, std::vector<int>(n, 0));
        EXPECT_NEAR(std::abs(denom - c.amplitude()), 0.0, 1e-12);
        for (SubsetMask m = 1; m <= full_mask(n); ++m) {
            std::vector<int> powers(n, 0);
            for (int k : mask_elements(m)) powers[k - 1] = 1;
            EXPECT_NEAR(std::abs(sequential_weak_value(c, m) - path_sum(c, powers) / denom), 0.0, 1e-10)
                << seed << " " << m;
        }
        std::vector<int> sq(n, 2);
        EXPECT_NEAR(std::abs(power_weak_value(c, sq) - path_sum(c, sq) / denom), 0.0, 1e-10);
    }
}

TEST(sequential_weak_value, projector_path_ratio) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const EvolutionChain c = random_projector_chain(3, 2, seed);
        EXPECT_NEAR(std::abs(path_amplitude_ratio(c) - sequential_weak_value(c, full_mask(2))), 0.0, 1e-10);
    }
    EXPECT_THROW(path_amplitude_ratio(random_chain(3, 2, 1)), ArgumentError);
}

TEST(sequential_weak_value, zero_powers_give_one) {
    const EvolutionChain c = random_chain(3, 3, 4);
    const std::vector<int> zeros(3, 0);
    EXPECT_NEAR(std::abs(power_weak_value(c, zeros) - 1.0), 0.0, 1e-14);
}

TEST(simultaneous_weak_value, commuting_observables_match_sequential) {
    const EvolutionChain c = commuting_pair();
    for (SubsetMask m = 1; m <= 3; ++m) {
        EXPECT_NEAR(std::abs(simultaneous_weak_value(c, m) - sequential_weak_value(c, m)), 0.0, 1e-12);
    }
}

TEST(simultaneous_weak_value, symmetrises_noncommuting_pair) {
    const EvolutionChain c = noncommuting_pair();
    const cplx s12 = sequential_weak_value(c, SubsetMask{0b11});
    // Reversed order: A_1 A_2 inside the same identity evolution.
    const CMatrix rev = c.observable(1).matrix() * c.observable(2).matrix();
    const cplx r = c.psi_f().amplitudes().dot(rev * c.psi_i().amplitudes()) / c.amplitude();
    EXPECT_NEAR(std::abs(simultaneous_weak_value(c, SubsetMask{0b11}) - 0.5 * (s12 + r)), 0.0, 1e-12);
    EXPECT_GT(std::abs(s12 - r), 1e-3);
}

TEST(weak_value_functional, cumulant_of_product_chain_vanishes) {
    const EvolutionChain c = product_bipartite();
    EXPECT_TRUE(is_weakly_independent(c, 0b01, 0b10));
    EXPECT_NEAR(std::abs(weak_value_cumulant(c)), 0.0, 1e-12);
    const MomentFunctional f = weak_value_functional(c);
    EXPECT_NEAR(std::abs(f(0b11) - f(0b01) * f(0b10)), 0.0, 1e-12);
}
