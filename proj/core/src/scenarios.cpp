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

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace wmc {

namespace {

CMatrix embed(const CMatrix &block, int d) {
    CMatrix out = CMatrix::Identity(d, d);
    out.topLeftCorner(block.rows(), block.cols()) = block;
    return out;
}

CMatrix projector_matrix(int d, int k) {
    CMatrix p = CMatrix::Zero(d, d);
    p(k, k) = 1.0;
    return p;
}

CMatrix swap_modes(int d, int a, int b) {
    CMatrix s = CMatrix::Identity(d, d);
    s(a, a) = 0.0;
    s(b, b) = 0.0;
    s(a, b) = 1.0;
    s(b, a) = 1.0;
    return s;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {
    }
    double normal() {
        return normal_(engine_);
    }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    CMatrix complex_gaussian(int rows, int cols) {
        CMatrix m(rows, cols);
        for (int j = 0; j < cols; ++j) {
            for (int i = 0; i < rows; ++i) {
                m(i, j) = cplx(normal(), normal());
            }
        }
        return m;
    }
    CMatrix unitary(int d) {
        Eigen::HouseholderQR<CMatrix> qr(complex_gaussian(d, d));
        CMatrix q = qr.householderQ();
        const CMatrix r = qr.matrixQR();
        for (int j = 0; j < d; ++j) {
            const double mag = std::abs(r(j, j));
            q.col(j) *= mag > 0.0 ? r(j, j) / mag : cplx(1.0);
        }
        return q;
    }
    CMatrix hermitian(int d) {
        const CMatrix g = complex_gaussian(d, d);
        CMatrix h = 0.5 * (g + g.adjoint());
        const Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
        h /= norm;
        return 0.5 * (h + h.adjoint());
    }
    CVector state(int d) {
        CVector v = complex_gaussian(d, 1).col(0);
        return v / v.norm();
    }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};


EvolutionChain draw_until_valid(int d, int n, std::uint64_t seed, double min_amplitude,
                                const std::function<EvolutionChain(Rng &)> &draw) {
    if (d < 1 || d > 8) {
        throw ArgumentError("random chains need 1 <= d <= 8");
    }
    if (n < 0 || n > 4) {
        throw ArgumentError("random chains need 0 <= n <= 4");
    }
    Rng rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        try {
            EvolutionChain chain = draw(rng);
            if (std::abs(chain.amplitude()) >= min_amplitude) {
                return chain;
            }
        } catch (const DegeneratePostselectionError &) {
        }
    }
    throw Error("random chain retries exhausted for seed " + std::to_string(seed));
}

}  // namespace

CMatrix beamsplitter() {
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix b(2, 2);
    b << s, kI * s, kI * s, s;
    return b;
}

EvolutionChain double_interferometer() {
    const UnitaryOp b(beamsplitter());
    const Observable p0(projector_matrix(2, 0));
    return EvolutionChain(SystemState::basis(2, 0), SystemState::basis(2, 0), {b, b, b}, {p0, p0});
}

EvolutionChain bottleneck_interferometer() {
    const CMatrix b = embed(beamsplitter(), 3);
    CMatrix z = CMatrix::Identity(3, 3);
    z(1, 1) = -1.0;
    const CMatrix link = b * swap_modes(3, 1, 2) * b * z;
    const Observable p0(projector_matrix(3, 0));
    return EvolutionChain(SystemState::basis(3, 0), SystemState::basis(3, 1),
                          {UnitaryOp(b), UnitaryOp(link), UnitaryOp(b)}, {p0, p0});
}

EvolutionChain bottleneck4() {
    const CMatrix b = embed(beamsplitter(), 3);
    const CMatrix link = b * swap_modes(3, 1, 2) * b;
    const Observable p0(projector_matrix(3, 0));
    return EvolutionChain(SystemState::basis(3, 0), SystemState::basis(3, 0),
                          {UnitaryOp(b), UnitaryOp(b), UnitaryOp(link), UnitaryOp(b), UnitaryOp(b)},
                          {p0, p0, p0, p0});
}

EvolutionChain product_bipartite() {
    auto kron = [](const CMatrix &a, const CMatrix &b) {
        CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
            }
        }
        return out;
    };
    auto kron_v = [&](const CVector &a, const CVector &b) { return CVector(kron(a, b).col(0)); };
    const CMatrix id = CMatrix::Identity(2, 2);
    const CMatrix bs = beamsplitter();
    CMatrix phase = CMatrix::Identity(2, 2);
    phase(1, 1) = std::exp(kI * 0.7);
    CMatrix sx(2, 2);
    sx << 0, 1, 1, 0;
    CMatrix sz(2, 2);
    sz << 1, 0, 0, -1;
    CVector a_i(2);
    a_i << 1.0, 0.0;
    CVector b_i(2);
    b_i << 0.6, cplx(0.0, 0.8);
    CVector a_f(2);
    a_f << std::cos(0.4), std::sin(0.4);
    CVector b_f(2);
    b_f << cplx(0.8, 0.0), cplx(0.36, 0.48);
    return EvolutionChain(SystemState::normalized(kron_v(a_i, b_i)), SystemState::normalized(kron_v(a_f, b_f)),
                          {UnitaryOp(kron(bs, phase)), UnitaryOp(kron(phase, bs)), UnitaryOp(kron(bs, bs))},
                          {Observable(kron(sz, id)), Observable(kron(id, sx))});
}

EvolutionChain noncommuting_pair() {
    CMatrix sx(2, 2);
    sx << 0, 1, 1, 0;
    CMatrix sz(2, 2);
    sz << 1, 0, 0, -1;
    CVector psi_i(2);
    psi_i << 1.0, cplx(0.5, 0.3);
    CVector psi_f(2);
    psi_f << 0.8, cplx(0.6, -0.2);
    const UnitaryOp id = UnitaryOp::identity(2);
    return EvolutionChain(SystemState::normalized(psi_i), SystemState::normalized(psi_f), {id, id, id},
                          {Observable(sx), Observable(sz)});
}

EvolutionChain commuting_pair() {
    CMatrix a1 = CMatrix::Zero(2, 2);
    a1(0, 0) = 1.0;
    a1(1, 1) = -0.5;
    CMatrix a2 = CMatrix::Zero(2, 2);
    a2(0, 0) = 0.3;
    a2(1, 1) = 1.0;
    CVector psi_i(2);
    psi_i << 1.0, cplx(0.5, 0.3);
    CVector psi_f(2);
    psi_f << 0.8, cplx(0.6, -0.2);
    const UnitaryOp id = UnitaryOp::identity(2);
    return EvolutionChain(SystemState::normalized(psi_i), SystemState::normalized(psi_f), {id, id, id},
                          {Observable(a1), Observable(a2)});
}

CMatrix random_unitary(int d, std::uint64_t seed) {
    Rng rng(seed);
    return rng.unitary(d);
}

EvolutionChain random_chain(int d, int n, std::uint64_t seed, double min_amplitude) {
    return draw_until_valid(d, n, seed, min_amplitude, [d, n](Rng &rng) {
        const SystemState psi_i(rng.state(d));
        const SystemState psi_f(rng.state(d));
        std::vector<UnitaryOp> us;
        std::vector<Observable> as;
        for (int k = 0; k <= n; ++k) {
            us.emplace_back(rng.unitary(d));
            if (k < n) {
                as.emplace_back(rng.hermitian(d));
            }
        }
        return EvolutionChain(psi_i, psi_f, std::move(us), std::move(as));
    });
}

EvolutionChain random_projector_chain(int d, int n, std::uint64_t seed, double min_amplitude) {
    return draw_until_valid(d, n, seed, min_amplitude, [d, n](Rng &rng) {
        const SystemState psi_i(rng.state(d));
        const SystemState psi_f(rng.state(d));
        std::vector<UnitaryOp> us;
        std::vector<Observable> as;
        for (int k = 0; k <= n; ++k) {
            us.emplace_back(rng.unitary(d));
            if (k < n) {
                as.push_back(Observable::projector(rng.state(d)));
            }
        }
        return EvolutionChain(psi_i, psi_f, std::move(us), std::move(as));
    });
}

EvolutionChain random_bottleneck_chain(int a, int n, int split, std::uint64_t seed) {
    if (a < 2 || a > 4) {
        throw ArgumentError("bottleneck chains need 2 <= a <= 4 arm modes");
    }
    if (split < 1 || split >= n) {
        throw ArgumentError("bottleneck split must leave observables on both sides");
    }
    const int d = 2 * a;
    return draw_until_valid(d, n, seed, 0.05, [a, d, n, split](Rng &rng) {
        auto arm_state = [&] {
            CVector v = CVector::Zero(d);
            v.head(a) = rng.state(a);
            return SystemState(v);
        };
        auto arm_observable = [&] {
            CMatrix m = CMatrix::Zero(d, d);
            m.topLeftCorner(a, a) = rng.hermitian(a);
            return Observable(m);
        };
        const SystemState psi_i = arm_state();
        const SystemState psi_f = arm_state();
        CMatrix link_swap = CMatrix::Identity(d, d);
        for (int j = 1; j < a; ++j) {
            link_swap = swap_modes(d, j, a + j) * link_swap;
        }
        std::vector<UnitaryOp> us;
        std::vector<Observable> as;
        for (int k = 1; k <= n + 1; ++k) {
            if (k == split + 1) {
                const CMatrix before = embed(rng.unitary(a), d);
                const CMatrix after = embed(rng.unitary(a), d);
                us.emplace_back(after * link_swap * before);
            } else {
                us.emplace_back(embed(rng.unitary(a), d));
            }
            if (k <= n) {
                as.push_back(arm_observable());
            }
        }
        return EvolutionChain(psi_i, psi_f, std::move(us), std::move(as));
    });
}

PointerFamilyParams PointerFamilyParams::defaults(PointerFamily family) {
    PointerFamilyParams p;
    if (family == PointerFamily::boosted) {
        p.q0 = 0.5;
    }
    return p;
}

std::string to_string(PointerFamily family) {
    switch (family) {
        case PointerFamily::gaussian:
            return "gaussian";
        case PointerFamily::real_nongaussian:
            return "real_nongaussian";
        case PointerFamily::chirped:
            return "chirped";
        case PointerFamily::boosted:
            return "boosted";
    }
    return "?";
}

PointerFamily parse_pointer_family(const std::string &name) {
    for (PointerFamily f : all_pointer_families()) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw ArgumentError("unknown pointer family: " + name);
}

std::vector<PointerFamily> all_pointer_families() {
    return {PointerFamily::gaussian, PointerFamily::real_nongaussian, PointerFamily::chirped, PointerFamily::boosted};
}

PointerWavefunction pointer_family(PointerFamily family, const PointerFamilyParams &params, const PointerGrid &grid) {
    if (!(params.sigma2 > 0.0)) {
        throw ArgumentError("pointer width sigma2 must be positive");
    }
    const double s2 = params.sigma2;
    const double q0 = params.q0;
    switch (family) {
        case PointerFamily::gaussian:
            return PointerWavefunction::from_function(
                grid, [=](double q) { return cplx(std::exp(-(q - q0) * (q - q0) / (4.0 * s2))); });
        case PointerFamily::real_nongaussian:
            return PointerWavefunction::from_function(grid, [=](double q) {
                const double x = q - q0;
                return cplx(std::exp(-x * x / (16.0 * s2)) / (1.0 + x * x));
            });
        case PointerFamily::chirped:
            return PointerWavefunction::from_function(grid, [=](double q) {
                return std::exp(-(q - q0) * (q - q0) / (4.0 * s2)) * std::exp(kI * (params.alpha * q * q));
            });
        case PointerFamily::boosted:
            return PointerWavefunction::from_function(grid, [=](double q) {
                return std::exp(-(q - q0) * (q - q0) / (4.0 * s2)) * std::exp(kI * (params.k0 * q));
            });
    }
    throw ArgumentError("unknown pointer family");
}

PointerWavefunction pointer_family(PointerFamily family, const PointerGrid &grid) {
    return pointer_family(family, PointerFamilyParams::defaults(family), grid);
}

PointerWavefunction random_pointer(std::uint64_t seed, const PointerGrid &grid) {
    Rng rng(seed);
    const double s2 = rng.uniform(0.35, 0.9);
    const double q0 = rng.uniform(-0.8, 0.8);
    const double k0 = rng.uniform(-0.8, 0.8);
    const double alpha = rng.uniform(-0.3, 0.3);
    const double shift = rng.uniform(0.5, 1.2);
    const cplx weight(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    return PointerWavefunction::from_function(grid, [=](double q) {
        const double x = q - q0;
        const double y = x - shift;
        const cplx envelope = std::exp(-x * x / (4.0 * s2)) + weight * std::exp(-y * y / (4.0 * s2));
        return envelope * std::exp(kI * (k0 * q + alpha * q * q));
    });
}

const std::vector<ScenarioInfo> &scenario_registry() {
    static const std::vector<ScenarioInfo> registry = [] {
        const ScenarioParameter d{"d", "integer", "4", "system dimension, 1..8"};
        const ScenarioParameter n{"n", "integer", "2", "number of observables, 0..4"};
        const ScenarioParameter seed{"seed", "u64", "1", "generator seed"};
        return std::vector<ScenarioInfo>{
            {"double_interferometer", "two interferometers in series, d=2; weak values 0, 0, -1/2", 2, {}},
            {"bottleneck", "interferometers joined through a single link, d=3; weak values 1/2, 1/2, 1/4", 2, {}},
            {"bottleneck4", "two double interferometers joined by a link, d=3, n=4", 4, {}},
            {"product_bipartite", "factorised 2x2 chain, A_1 on the first factor, A_2 on the second", 2, {}},
            {"noncommuting_pair", "d=2, sigma_x then sigma_z, identity evolution", 2, {}},
            {"commuting_pair", "d=2, two diagonal observables, identity evolution", 2, {}},
            {"random", "Haar unitaries and unit-norm Hermitian observables", -1, {d, n, seed}},
            {"random_projectors", "Haar unitaries and random rank-1 projectors", -1, {d, n, seed}},
        };
    }();
    return registry;
}

EvolutionChain build_scenario(const std::string &name, const ScenarioParams &params) {
    if (name == "double_interferometer") {
        return double_interferometer();
    }
    if (name == "bottleneck") {
        return bottleneck_interferometer();
    }
    if (name == "bottleneck4") {
        return bottleneck4();
    }
    if (name == "product_bipartite") {
        return product_bipartite();
    }
    if (name == "noncommuting_pair") {
        return noncommuting_pair();
    }
    if (name == "commuting_pair") {
        return commuting_pair();
    }
    if (name == "random") {
        return random_chain(params.d, params.n, params.seed);
    }
    if (name == "random_projectors") {
        return random_projector_chain(params.d, params.n, params.seed);
    }
    throw ArgumentError("unknown scenario: " + name);
}

}  // namespace wmc
