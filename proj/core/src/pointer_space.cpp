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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "wmc/quantum_core.hpp"
#include "wmc/spectral.hpp"

namespace wmc {

namespace {

bool is_power_of_two(int m) {
    return m > 0 && (m & (m - 1)) == 0;
}

double grid_norm2(const PointerGrid &grid, const CVector &samples) {
    return grid.spacing() * samples.squaredNorm();
}

void require_matrix_size(const CMatrix &m, const PointerGrid &grid) {
    if (m.rows() != grid.size() || m.cols() != grid.size()) {
        throw ArgumentError("pointer matrix does not match the grid size");
    }
}

void apply_momentum(const PointerGrid &grid, std::span<cplx> psi, const std::function<cplx(double)> &symbol) {
    spectral::forward(psi);
    const std::vector<double> k = grid.wavenumbers();
    for (std::size_t j = 0; j < psi.size(); ++j) {
        psi[j] *= symbol(k[j]);
    }
    spectral::inverse(psi);
}

struct MomentumCache {
    std::mutex mutex;
    std::map<std::pair<int, double>, std::shared_ptr<const CMatrix>> entries;
};

MomentumCache &momentum_cache() {
    static MomentumCache cache;
    return cache;
}

std::shared_ptr<const CMatrix> dense_momentum(const PointerGrid &grid) {
    auto &cache = momentum_cache();
    const auto key = std::make_pair(grid.size(), grid.length());
    {
        std::lock_guard<std::mutex> lock(cache.mutex);
        auto it = cache.entries.find(key);
        if (it != cache.entries.end()) {
            return it->second;
        }
    }
    const int m = grid.size();
    auto p = std::make_shared<CMatrix>(m, m);
    CVector column(m);
    for (int j = 0; j < m; ++j) {
        column.setZero();
        column[j] = 1.0;
        apply_momentum(grid, std::span<cplx>(column.data(), m), [](double k) { return cplx(k); });
        p->col(j) = column;
    }
    std::lock_guard<std::mutex> lock(cache.mutex);
    return cache.entries.emplace(key, std::move(p)).first->second;
}

cplx xi_from_moments(int n, cplx prod_rs, cplx prod_r_s) {
    cplx factor = 2.0;
    for (int k = 0; k < n; ++k) {
        factor *= -kI;
    }
    return factor * (prod_rs - prod_r_s);
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) {
        f *= i;
    }
    return f;
}

}  // namespace

PointerGrid::PointerGrid(double q_min, double q_max, int m) : q_min_(q_min), q_max_(q_max), m_(m) {
    if (!is_power_of_two(m) || m < 32 || m > 1024) {
        throw ArgumentError("grid size must be a power of two in [32, 1024], got " + std::to_string(m));
    }
    if (!(q_max > q_min) || !std::isfinite(q_min) || !std::isfinite(q_max)) {
        throw ArgumentError("grid requires finite q_max > q_min");
    }
}

PointerGrid PointerGrid::standard(int m) {
    return PointerGrid(-12.0, 12.0, m);
}

std::vector<double> PointerGrid::coordinates() const {
    std::vector<double> q(m_);
    for (int j = 0; j < m_; ++j) {
        q[j] = coordinate(j);
    }
    return q;
}

std::vector<double> PointerGrid::wavenumbers() const {
    return spectral::wavenumbers(m_, length());
}

PointerWavefunction::PointerWavefunction(PointerGrid grid, CVector samples)
    : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size()) {
        throw ArgumentError("wavefunction sample count does not match the grid");
    }
    const double norm2 = grid_norm2(grid_, samples_);
    if (std::abs(norm2 - 1.0) > 1e-10) {
        throw ArgumentError("wavefunction is not normalised (norm^2 = " + std::to_string(norm2) + ")");
    }
    const double peak = samples_.cwiseAbs().maxCoeff();
    const double edge = std::max(std::abs(samples_[0]), std::abs(samples_[samples_.size() - 1]));
    if (edge > 1e-6 * peak) {
        throw ArgumentError("wavefunction does not decay at the grid edges");
    }
}

PointerWavefunction PointerWavefunction::normalized(PointerGrid grid, CVector samples) {
    if (samples.size() != grid.size()) {
        throw ArgumentError("wavefunction sample count does not match the grid");
    }
    const double norm2 = grid_norm2(grid, samples);
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw ArgumentError("cannot normalise a zero or non-finite wavefunction");
    }
    samples /= std::sqrt(norm2);
    return PointerWavefunction(grid, std::move(samples));
}

PointerWavefunction PointerWavefunction::from_function(PointerGrid grid, const std::function<cplx(double)> &f) {
    CVector samples(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        samples[j] = f(grid.coordinate(j));
    }
    return normalized(grid, std::move(samples));
}

PointerObservable PointerObservable::matrix(CMatrix m) {
    if (m.rows() != m.cols()) {
        throw ArgumentError("pointer observable matrix must be square");
    }
    if (hermiticity_defect(m) > 1e-12) {
        throw ArgumentError("pointer observable matrix is not Hermitian");
    }
    return PointerObservable(Kind::Matrix, std::move(m));
}

std::string PointerObservable::name() const {
    switch (kind_) {
        case Kind::Q:
            return "q";
        case Kind::P:
            return "p";
        case Kind::Matrix:
            return "matrix";
    }
    return "?";
}

PointerOperator::PointerOperator(const PointerObservable &obs)
    : cq_(obs.kind() == PointerObservable::Kind::Q ? 1.0 : 0.0),
      cp_(obs.kind() == PointerObservable::Kind::P ? 1.0 : 0.0),
      matrix_(obs.kind() == PointerObservable::Kind::Matrix ? std::make_shared<const CMatrix>(obs.dense()) : nullptr) {}

PointerOperator PointerOperator::linear(cplx cq, cplx cp) {
    PointerOperator op;
    op.cq_ = cq;
    op.cp_ = cp;
    return op;
}

PointerOperator PointerOperator::dense(CMatrix m) {
    if (m.rows() != m.cols()) {
        throw ArgumentError("pointer operator matrix must be square");
    }
    PointerOperator op;
    op.matrix_ = std::make_shared<const CMatrix>(std::move(m));
    return op;
}

bool PointerOperator::is_hermitian() const {
    if (cq_.imag() != 0.0 || cp_.imag() != 0.0) {
        return false;
    }
    return !matrix_ || hermiticity_defect(*matrix_) <= 1e-12;
}

CMatrix make_operator(const PointerObservable &obs, const PointerGrid &grid) {
    return make_operator(PointerOperator(obs), grid);
}

CMatrix make_operator(const PointerOperator &op, const PointerGrid &grid) {
    const int m = grid.size();
    CMatrix out = CMatrix::Zero(m, m);
    if (op.q_coefficient() != 0.0) {
        for (int j = 0; j < m; ++j) {
            out(j, j) += op.q_coefficient() * grid.coordinate(j);
        }
    }
    if (op.p_coefficient() != 0.0) {
        out += op.p_coefficient() * (*dense_momentum(grid));
    }
    if (op.matrix_part()) {
        require_matrix_size(*op.matrix_part(), grid);
        out += *op.matrix_part();
    }
    return out;
}

void apply_in_place(const PointerOperator &op, const PointerGrid &grid, std::span<cplx> psi) {
    const int m = grid.size();
    if (static_cast<int>(psi.size()) != m) {
        throw ArgumentError("vector length does not match the grid");
    }
    Eigen::Map<CVector> in(psi.data(), m);
    CVector out = CVector::Zero(m);
    if (op.q_coefficient() != 0.0) {
        for (int j = 0; j < m; ++j) {
            out[j] += op.q_coefficient() * grid.coordinate(j) * in[j];
        }
    }
    if (op.p_coefficient() != 0.0) {
        CVector tmp = in;
        apply_momentum(grid, std::span<cplx>(tmp.data(), m), [](double k) { return cplx(k); });
        out += op.p_coefficient() * tmp;
    }
    if (op.matrix_part()) {
        require_matrix_size(*op.matrix_part(), grid);
        out += *op.matrix_part() * in;
    }
    in = out;
}

CVector apply(const PointerOperator &op, const PointerGrid &grid, const CVector &psi) {
    CVector out = psi;
    apply_in_place(op, grid, std::span<cplx>(out.data(), out.size()));
    return out;
}

cplx inner_product(const PointerGrid &grid, const CVector &a, const CVector &b) {
    if (a.size() != grid.size() || b.size() != grid.size()) {
        throw ArgumentError("vector length does not match the grid");
    }
    return grid.spacing() * a.dot(b);
}

cplx moment(const PointerWavefunction &phi, std::span<const PointerOperator> word) {
    if (word.empty()) {
        throw ArgumentError("moment word must be non-empty");
    }
    CVector v = phi.samples();
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        apply_in_place(*it, phi.grid(), std::span<cplx>(v.data(), v.size()));
    }
    return inner_product(phi.grid(), phi.samples(), v);
}

cplx moment(const PointerWavefunction &phi, std::initializer_list<PointerOperator> word) {
    return moment(phi, std::span<const PointerOperator>(word.begin(), word.size()));
}

MomentSet moment_set(const PointerWavefunction &phi) {
    const PointerOperator q(PointerObservable::Q());
    const PointerOperator p(PointerObservable::P());
    MomentSet ms;
    ms.mu = moment(phi, {q});
    ms.nu = moment(phi, {p});
    ms.zeta = moment(phi, {p, p});
    ms.rho = moment(phi, {q, p});
    ms.sigma = moment(phi, {q, p, p});
    ms.tau = moment(phi, {p, q, p});
    return ms;
}

cplx xi_factor(std::span<const PointerSetting> pointers) {
    if (pointers.empty()) {
        throw ArgumentError("xi needs at least one pointer");
    }
    cplx prod_rs = 1.0;
    cplx prod_r_s = 1.0;
    for (const auto &ptr : pointers) {
        const PointerOperator s(ptr.s);
        prod_rs *= moment(ptr.phi, {ptr.r, s});
        prod_r_s *= moment(ptr.phi, {ptr.r}) * moment(ptr.phi, {s});
    }
    return xi_from_moments(static_cast<int>(pointers.size()), prod_rs, prod_r_s);
}

cplx xi_single(const PointerWavefunction &phi, const PointerOperator &r, const PointerObservable &s) {
    const PointerSetting setting{phi, r, s};
    return xi_factor(std::span<const PointerSetting>(&setting, 1));
}

cplx eta(const PointerWavefunction &phi, const PointerObservable &s) {
    const cplx xi_q = xi_single(phi, PointerObservable::Q(), s);
    const cplx xi_p = xi_single(phi, PointerObservable::P(), s);
    if (std::abs(xi_q) <= 1e-10) {
        throw SingularEtaError("xi_q vanishes; the lowering operator is undefined");
    }
    if (std::abs(xi_p) <= 1e-10) {
        throw SingularEtaError("xi_p vanishes; the lowering operator is undefined");
    }
    return -kI * std::conj(xi_p) / std::conj(xi_q);
}

namespace {

cplx binary_sum(std::span<const PointerCoupling> pointers, bool conjugate_leading) {
    const int n = static_cast<int>(pointers.size());
    if (n < 1 || n > 16) {
        throw ArgumentError("theta/varpi need between 1 and 16 pointers");
    }
    const PointerOperator q(PointerObservable::Q());
    const PointerOperator p(PointerObservable::P());
    // Single-pointer factors: [k][0] = xi_q, [k][1] = xi_p. Joint factors reuse the moments.
    std::vector<std::array<cplx, 2>> single(n);
    std::vector<std::array<cplx, 2>> rs(n);
    std::vector<std::array<cplx, 2>> r_s(n);
    cplx denom = 2.0;
    for (int k = 0; k < n; ++k) {
        const auto &ptr = pointers[k];
        const PointerOperator s(ptr.s);
        const cplx mean_s = moment(ptr.phi, {s});
        for (int b = 0; b < 2; ++b) {
            const PointerOperator &r = b == 0 ? q : p;
            rs[k][b] = moment(ptr.phi, {r, s});
            r_s[k][b] = moment(ptr.phi, {r}) * mean_s;
            single[k][b] = xi_from_moments(1, rs[k][b], r_s[k][b]);
        }
        if (std::abs(single[k][0]) <= 1e-10 || std::abs(single[k][1]) <= 1e-10) {
            throw SingularEtaError("theta/varpi denominator vanishes");
        }
        denom *= std::conj(single[k][1]);
    }
    cplx total = 0.0;
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        cplx prod_rs = 1.0;
        cplx prod_r_s = 1.0;
        cplx others = 1.0;
        int ones = 0;
        for (int k = 0; k < n; ++k) {
            const int b = (bits >> k) & 1u;
            ones += b;
            prod_rs *= rs[k][b];
            prod_r_s *= r_s[k][b];
            others *= std::conj(single[k][1 - b]);
        }
        cplx joint = xi_from_moments(n, prod_rs, prod_r_s);
        if (conjugate_leading) {
            joint = std::conj(joint);
        }
        total += (ones % 2 == 0 ? 1.0 : -1.0) * joint * others;
    }
    return total / denom;
}

}  // namespace

cplx theta_factor(std::span<const PointerCoupling> pointers) {
    return binary_sum(pointers, false);
}

cplx varpi_factor(std::span<const PointerCoupling> pointers) {
    return binary_sum(pointers, true);
}

UVCoefficients uv_coefficients(const PointerWavefunction &phi, const PointerObservable &s, const PointerOperator &r,
                               int l, int m, int order_cap) {
    if (l < 0 || m < 0 || l > order_cap || m > order_cap) {
        throw SizeError("u/v index exceeds the series order cap");
    }
    const PointerOperator minus_is = [&] {
        switch (s.kind()) {
            case PointerObservable::Kind::Q:
                return PointerOperator::linear(-kI, 0.0);
            case PointerObservable::Kind::P:
                return PointerOperator::linear(0.0, -kI);
            case PointerObservable::Kind::Matrix:
                break;
        }
        return PointerOperator::dense(-kI * s.dense());
    }();
    auto raise = [&](int power) {
        CVector v = phi.samples();
        for (int i = 0; i < power; ++i) {
            apply_in_place(minus_is, phi.grid(), std::span<cplx>(v.data(), v.size()));
        }
        return v;
    };
    const CVector ket = raise(l);
    const CVector bra = raise(m);
    const double scale = 1.0 / (factorial(l) * factorial(m));
    const CVector r_ket = apply(r, phi.grid(), ket);
    return {scale * inner_product(phi.grid(), bra, r_ket), scale * inner_product(phi.grid(), bra, ket)};
}

void write_wavefunction_csv(std::ostream &out, const PointerWavefunction &phi) {
    const PointerGrid &grid = phi.grid();
    char buf[128];
    std::snprintf(buf, sizeof(buf), "#grid q_min=%.17g q_max=%.17g m=%d\n", grid.q_min(), grid.q_max(), grid.size());
    out << buf << "q,re,im\n";
    for (int j = 0; j < grid.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", grid.coordinate(j), phi.samples()[j].real(),
                      phi.samples()[j].imag());
        out << buf;
    }
}

PointerWavefunction read_wavefunction_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ArgumentError("wavefunction CSV is empty");
    }
    double q_min = 0.0;
    double q_max = 0.0;
    int m = 0;
    if (std::sscanf(line.c_str(), "#grid q_min=%lf q_max=%lf m=%d", &q_min, &q_max, &m) != 3) {
        throw ArgumentError("wavefunction CSV lacks a '#grid q_min=.. q_max=.. m=..' line");
    }
    const PointerGrid grid(q_min, q_max, m);
    if (!std::getline(in, line) || line.rfind("q,re,im", 0) != 0) {
        throw ArgumentError("wavefunction CSV lacks the 'q,re,im' header");
    }
    CVector samples(m);
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        double q = 0.0;
        double re = 0.0;
        double im = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &q, &re, &im) != 3) {
            throw ArgumentError("malformed wavefunction CSV row: " + line);
        }
        if (row >= m) {
            throw ArgumentError("wavefunction CSV has more rows than grid points");
        }
        if (std::abs(q - grid.coordinate(row)) > 1e-9 * std::max(1.0, std::abs(q))) {
            throw ArgumentError("wavefunction CSV coordinate does not match the grid at row " +
                                std::to_string(row));
        }
        samples[row++] = cplx(re, im);
    }
    if (row != m) {
        throw ArgumentError("wavefunction CSV has fewer rows than grid points");
    }
    return PointerWavefunction::normalized(grid, std::move(samples));
}

PointerWavefunction load_wavefunction_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("cannot open wavefunction CSV: " + path);
    }
    return read_wavefunction_csv(in);
}

CouplingPropagator::CouplingPropagator(const PointerObservable &s, const PointerGrid &grid, bool with_eigenbasis)
    : kind_(s.kind()), grid_(grid) {
    switch (kind_) {
        case PointerObservable::Kind::Q:
            eigenvalues_ = grid.coordinates();
            break;
        case PointerObservable::Kind::P:
            eigenvalues_ = grid.wavenumbers();
            break;
        case PointerObservable::Kind::Matrix: {
            require_matrix_size(s.dense(), grid);
            s_ = s.dense();
            if (!with_eigenbasis) {
                break;
            }
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(s_);
            eigenvectors_ = solver.eigenvectors();
            eigenvalues_.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + grid.size());
            break;
        }
    }
}

CVector CouplingPropagator::apply(double theta, const CVector &psi) const {
    if (psi.size() != grid_.size()) {
        throw ArgumentError("vector length does not match the grid");
    }
    CVector out = psi;
    switch (kind_) {
        case PointerObservable::Kind::Q:
            for (int j = 0; j < grid_.size(); ++j) {
                out[j] *= std::exp(-kI * (theta * eigenvalues_[j]));
            }
            break;
        case PointerObservable::Kind::P:
            apply_momentum(grid_, std::span<cplx>(out.data(), out.size()),
                           [theta](double k) { return std::exp(-kI * (theta * k)); });
            break;
        case PointerObservable::Kind::Matrix: {
            const CMatrix generator = (-kI * theta) * s_;
            const CMatrix u = generator.exp();
            out = u * psi;
            break;
        }
    }
    return out;
}

void CouplingPropagator::to_eigenbasis(std::span<cplx> psi) const {
    if (eigenvalues_.empty()) {
        throw Error("propagator was built without an eigenbasis");
    }
    switch (kind_) {
        case PointerObservable::Kind::Q:
            break;
        case PointerObservable::Kind::P:
            spectral::forward(psi);
            break;
        case PointerObservable::Kind::Matrix: {
            Eigen::Map<CVector> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
            const CVector tmp = eigenvectors_.adjoint() * v;
            v = tmp;
            break;
        }
    }
}

void CouplingPropagator::from_eigenbasis(std::span<cplx> psi) const {
    if (eigenvalues_.empty()) {
        throw Error("propagator was built without an eigenbasis");
    }
    switch (kind_) {
        case PointerObservable::Kind::Q:
            break;
        case PointerObservable::Kind::P:
            spectral::inverse(psi);
            break;
        case PointerObservable::Kind::Matrix: {
            Eigen::Map<CVector> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
            const CVector tmp = eigenvectors_ * v;
            v = tmp;
            break;
        }
    }
}

}  // namespace wmc
