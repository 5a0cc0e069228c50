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

#include "wmc/pointer_space.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gtest/gtest.h"
#include "wmc/scenarios.hpp"

using namespace wmc;

namespace {

const PointerOperator kQ{PointerObservable::Q()};
const PointerOperator kP{PointerObservable::P()};

PointerWavefunction gaussian(double s2, double q0, const PointerGrid &grid = PointerGrid::standard()) {
    return pointer_family(PointerFamily::gaussian, {s2, q0, 0.0, 0.0}, grid);
}

}  // namespace

TEST(pointer_grid, validation) {
    EXPECT_THROW(PointerGrid(-1, 1, 48), ArgumentError);
    EXPECT_THROW(PointerGrid(-1, 1, 16), ArgumentError);
    EXPECT_THROW(PointerGrid(-1, 1, 2048), ArgumentError);
    EXPECT_THROW(PointerGrid(1, 1, 64), ArgumentError);
    const PointerGrid g(-4, 4, 64);
    EXPECT_DOUBLE_EQ(g.spacing(), 0.125);
    EXPECT_DOUBLE_EQ(g.coordinate(0), -4.0);
    EXPECT_EQ(g.coordinates().size(), 64u);
    const auto k = g.wavenumbers();
    EXPECT_DOUBLE_EQ(k[1], 2.0 * M_PI / 8.0);
    EXPECT_DOUBLE_EQ(k[63], -2.0 * M_PI / 8.0);
}

TEST(pointer_wavefunction, validation) {
    const PointerGrid g = PointerGrid::standard(64);
    EXPECT_THROW(PointerWavefunction(g, CVector::Zero(64)), ArgumentError);
    EXPECT_THROW(PointerWavefunction::normalized(g, CVector::Constant(64, 1.0)), ArgumentError);
    EXPECT_THROW(PointerWavefunction(g, CVector::Zero(32)), ArgumentError);
    const auto phi = gaussian(0.5, 0.0, g);
    EXPECT_NEAR(std::abs(inner_product(g, phi.samples(), phi.samples()) - 1.0), 0.0, 1e-12);
}

TEST(pointer_observable, hermitian_matrix_only) {
    CMatrix m = CMatrix::Zero(32, 32);
    m(0, 1) = 1.0;
    EXPECT_THROW(PointerObservable::matrix(m), ArgumentError);
    m(1, 0) = 1.0;
    EXPECT_EQ(PointerObservable::matrix(m).name(), "matrix");
    EXPECT_EQ(PointerObservable::Q().name(), "q");
    EXPECT_EQ(PointerObservable::P().name(), "p");
}

TEST(pointer_operators, momentum_is_derivative) {
    const PointerGrid g = PointerGrid::standard(256);
    const double s2 = 0.7, q0 = 0.4;
    const auto phi = gaussian(s2, q0, g);
    const CVector pphi = apply(kP, g, phi.samples());
    double gap = 0.0;
    for (int j = 0; j < g.size(); ++j) {
        const double x = g.coordinate(j) - q0;
        // -i d/dq of exp(-x^2/(4 s2)) = i x/(2 s2) phi.
        gap = std::max(gap, std::abs(pphi(j) - kI * x / (2.0 * s2) * phi.samples()(j)));
    }
    EXPECT_LT(gap, 1e-10);
}

TEST(pointer_operators, canonical_commutator) {
    const PointerGrid g = PointerGrid::standard(256);
    const auto phi = pointer_family(PointerFamily::chirped, g);
    const CVector qp = apply(kQ, g, apply(kP, g, phi.samples()));
    const CVector pq = apply(kP, g, apply(kQ, g, phi.samples()));
    EXPECT_LT((qp - pq - kI * phi.samples()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(pointer_operators, dense_matches_apply) {
    const PointerGrid g = PointerGrid::standard(64);
    const auto phi = pointer_family(PointerFamily::boosted, g);
    const auto op = PointerOperator::linear(0.3, cplx(0.0, 2.0));
    const CMatrix m = make_operator(op, g);
    EXPECT_LT((m * phi.samples() - apply(op, g, phi.samples())).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LT(hermiticity_defect(make_operator(PointerObservable::P(), g)), 1e-12);
    EXPECT_FALSE(op.is_hermitian());
    EXPECT_TRUE(PointerOperator::linear(0.3, 2.0).is_hermitian());
}

TEST(pointer_moments, gaussian_closed_forms) {
    const double s2 = 0.6, q0 = 0.3;
    const auto phi = gaussian(s2, q0);
    const MomentSet ms = moment_set(phi);
    EXPECT_NEAR(std::abs(ms.mu - q0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(ms.nu), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(ms.zeta - 1.0 / (4.0 * s2)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(ms.rho - 0.5 * kI), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(ms.sigma - q0 / (4.0 * s2)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(ms.tau - q0 / (4.0 * s2)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(moment(phi, {kQ, kQ}) - (s2 + q0 * q0)), 0.0, 1e-10);
}

TEST(pointer_moments, chirped_and_boosted_closed_forms) {
    const PointerFamilyParams c = PointerFamilyParams::defaults(PointerFamily::chirped);
    const auto chirped = pointer_family(PointerFamily::chirped, c);
    // Momentum density shifted by 2 alpha q.
    EXPECT_NEAR(std::abs(moment(chirped, {kP}) - 2.0 * c.alpha * c.q0), 0.0, 1e-10);
    const double var_p = 1.0 / (4.0 * c.sigma2) + 4.0 * c.alpha * c.alpha * c.sigma2;
    EXPECT_NEAR(std::abs(moment(chirped, {kP, kP}) - (var_p + std::pow(2.0 * c.alpha * c.q0, 2))), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(xi_single(chirped, kQ, PointerObservable::P()) - cplx(1.0, -4.0 * c.alpha * c.sigma2)),
                0.0, 1e-10);

    const PointerFamilyParams b = PointerFamilyParams::defaults(PointerFamily::boosted);
    const auto boosted = pointer_family(PointerFamily::boosted, b);
    EXPECT_NEAR(std::abs(moment(boosted, {kP}) - b.k0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(moment(boosted, {kQ}) - b.q0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(xi_single(boosted, kQ, PointerObservable::P()) - 1.0), 0.0, 1e-10);
}

TEST(pointer_moments, word_order_is_right_to_left) {
    const auto phi = pointer_family(PointerFamily::chirped);
    // <q p> - <p q> = i for any normalisable state.
    EXPECT_NEAR(std::abs(moment(phi, {kQ, kP}) - moment(phi, {kP, kQ}) - kI), 0.0, 1e-8);
}

TEST(xi, gaussian_products) {
    const auto phi = gaussian(0.5, 0.0);
    const PointerSetting s{phi, kQ, PointerObservable::P()};
    const std::vector<PointerSetting> two{s, s};
    // 2 (-i)^2 ((i/2)^2 - 0) = 1/2
    EXPECT_NEAR(std::abs(xi_factor(two) - 0.5), 0.0, 1e-10);
    const std::vector<PointerSetting> three{s, s, s};
    // 2 (-i)^3 (i/2)^3 = 1/4
    EXPECT_NEAR(std::abs(xi_factor(three) - 0.25), 0.0, 1e-10);
}

TEST(eta, gaussian_lowering_annihilates) {
    const double s2 = 0.8;
    const auto phi = gaussian(s2, 0.0);
    const cplx e = eta(phi, PointerObservable::P());
    EXPECT_NEAR(std::abs(e - 1.0 / (2.0 * s2)), 0.0, 1e-10);
    const auto a = PointerOperator::linear(1.0, kI / e);
    EXPECT_LT(apply(a, phi.grid(), phi.samples()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(eta, singular_when_xi_q_vanishes) {
    const PointerGrid g = PointerGrid::standard(64);
    const auto phi = gaussian(0.5, 0.0, g);
    // s = identity carries no correlation with q.
    EXPECT_THROW(eta(phi, PointerObservable::matrix(CMatrix::Identity(64, 64))), SingularEtaError);
    EXPECT_NO_THROW(eta(phi, PointerObservable::Q()));
}

TEST(theta, equals_one_for_p_coupling_with_zero_mean_momentum) {
    const PointerGrid g = PointerGrid::standard();
    const std::vector<PointerWavefunction> phis{
        gaussian(0.5, 0.0, g), gaussian(0.9, 0.4, g), pointer_family(PointerFamily::real_nongaussian, g),
        pointer_family(PointerFamily::chirped, {0.5, 0.0, 0.3, 0.0}, g)};
    for (int n = 1; n <= 3; ++n) {
        for (const auto &phi : phis) {
            const std::vector<PointerCoupling> c(n, PointerCoupling{phi, PointerObservable::P()});
            EXPECT_NEAR(std::abs(theta_factor(c) - 1.0), 0.0, 1e-12) << n;
        }
    }
}

TEST(varpi, vanishes_for_random_pointers) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int n = 1 + static_cast<int>(seed % 3);
        std::vector<PointerCoupling> c;
        for (int k = 0; k < n; ++k) {
            c.push_back({random_pointer(seed * 7 + k), k % 2 ? PointerObservable::Q() : PointerObservable::P()});
        }
        EXPECT_LT(std::abs(varpi_factor(c)), 1e-10) << seed;
    }
}

TEST(uv_coefficients, gaussian_values) {
    const double s2 = 0.6, q0 = 0.3;
    const auto phi = gaussian(s2, q0);
    const auto s = PointerObservable::P();
    auto uv = [&](int l, int m) { return uv_coefficients(phi, s, kQ, l, m); };
    EXPECT_NEAR(std::abs(uv(0, 0).u - q0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(uv(0, 0).v - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(uv(1, 0).u - (-kI) * (0.5 * kI)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(uv(1, 1).u - q0 / (4.0 * s2)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(uv(2, 0).u + q0 / (8.0 * s2)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(uv(1, 1).v - 1.0 / (4.0 * s2)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(uv(0, 2).v + 1.0 / (8.0 * s2)), 0.0, 1e-10);
    EXPECT_THROW(uv(5, 0), SizeError);
}

TEST(wavefunction_csv, round_trip) {
    const PointerGrid g(-10, 10, 128);
    const auto phi = random_pointer(3, g);
    std::stringstream ss;
    write_wavefunction_csv(ss, phi);
    const std::string text = ss.str();
    EXPECT_EQ(text.rfind("#grid q_min=-10 q_max=10 m=128\nq,re,im\n", 0), 0u);
    const auto back = read_wavefunction_csv(ss);
    EXPECT_TRUE(back.grid() == g);
    EXPECT_LT((back.samples() - phi.samples()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(wavefunction_csv, rejects_bad_input) {
    std::stringstream missing("q,re,im\n0,1,0\n");
    EXPECT_THROW(read_wavefunction_csv(missing), Error);
    std::stringstream short_rows("#grid q_min=-1 q_max=1 m=32\nq,re,im\n0,1,0\n");
    EXPECT_THROW(read_wavefunction_csv(short_rows), Error);
    EXPECT_THROW(load_wavefunction_csv("/nonexistent/phi.csv"), Error);
}

TEST(coupling_propagator, p_shifts_and_q_kicks) {
    const PointerGrid g = PointerGrid::standard(256);
    const auto phi = gaussian(0.5, 0.0, g);
    const auto shifted = gaussian(0.5, 0.7, g);
    const CouplingPropagator prop_p(PointerObservable::P(), g);
    EXPECT_LT((prop_p.apply(0.7, phi.samples()) - shifted.samples()).cwiseAbs().maxCoeff(), 1e-10);
    const CouplingPropagator prop_q(PointerObservable::Q(), g);
    const CVector kicked = prop_q.apply(0.4, phi.samples());
    for (int j = 0; j < g.size(); j += 17) {
        EXPECT_NEAR(std::abs(kicked(j) - std::exp(-0.4 * kI * g.coordinate(j)) * phi.samples()(j)), 0.0, 1e-14);
    }
}

TEST(coupling_propagator, matrix_kind_matches_eigendecomposition) {
    const PointerGrid g(-6, 6, 32);
    CMatrix h = CMatrix::Random(32, 32);
    h = (h + h.adjoint()).eval() * 0.5;
    const auto phi = gaussian(0.5, 0.0, g);
    const CouplingPropagator prop(PointerObservable::matrix(h), g);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const CVector phase = (-0.3 * kI * es.eigenvalues().cast<cplx>().array()).exp();
    const CVector want = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * phi.samples();
    EXPECT_LT((prop.apply(0.3, phi.samples()) - want).cwiseAbs().maxCoeff(), 1e-11);
    CVector v = phi.samples();
    prop.to_eigenbasis(std::span<cplx>(v.data(), v.size()));
    prop.from_eigenbasis(std::span<cplx>(v.data(), v.size()));
    EXPECT_LT((v - phi.samples()).cwiseAbs().maxCoeff(), 1e-12);
}
