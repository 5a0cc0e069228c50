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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace wmc {

namespace {

void require_square(const CMatrix &m, const char *what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw ArgumentError(std::string(what) + " must be a non-empty square matrix");
    }
}

std::vector<int> subset_vector(SubsetMask mask) {
    return mask_elements(mask);
}

// <psi_f| U_{n+1} X_n U_n ... X_1 U_1 |psi_i> with X_k = ops[k-1] or identity when null.
cplx amplitude_with(const EvolutionChain &chain, std::span<const CMatrix *const> ops) {
    CVector v = chain.unitary(1).matrix() * chain.psi_i().amplitudes();
    for (int k = 1; k <= chain.size(); ++k) {
        if (ops[k - 1] != nullptr) {
            v = (*ops[k - 1]) * v;
        }
        v = chain.unitary(k + 1).matrix() * v;
    }
    return chain.psi_f().amplitudes().dot(v);
}

void check_subset(const EvolutionChain &chain, std::span<const int> subset) {
    int last = 0;
    for (int k : subset) {
        if (k <= last || k > chain.size()) {
            throw ArgumentError("subset must be ascending indices within 1..n");
        }
        last = k;
    }
}

}  // namespace

double hermiticity_defect(const CMatrix &m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

SystemState::SystemState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) {
        throw ArgumentError("system state must be non-empty");
    }
    if (std::abs(amplitudes_.norm() - 1.0) > 1e-12) {
        throw ArgumentError("system state must have unit norm, got " + std::to_string(amplitudes_.norm()));
    }
}

SystemState SystemState::normalized(CVector amplitudes) {
    double norm = amplitudes.norm();
    if (!(norm > 0.0)) {
        throw ArgumentError("cannot normalise a zero vector");
    }
    return SystemState(amplitudes / norm);
}

SystemState SystemState::basis(int dim, int index) {
    if (index < 0 || index >= dim) {
        throw ArgumentError("basis index out of range");
    }
    CVector v = CVector::Zero(dim);
    v(index) = 1.0;
    return SystemState(std::move(v));
}

Observable::Observable(CMatrix matrix) : matrix_(std::move(matrix)) {
    require_square(matrix_, "observable");
    if (hermiticity_defect(matrix_) > 1e-12) {
        throw ArgumentError("observable must be Hermitian");
    }
}

Observable Observable::projector(const CVector &v) {
    CVector u = v / v.norm();
    return Observable(u * u.adjoint());
}

Observable Observable::identity(int dim) {
    return Observable(CMatrix::Identity(dim, dim));
}

UnitaryOp::UnitaryOp(CMatrix matrix) : matrix_(std::move(matrix)) {
    require_square(matrix_, "unitary");
    CMatrix defect = matrix_.adjoint() * matrix_ - CMatrix::Identity(matrix_.rows(), matrix_.cols());
    if (defect.cwiseAbs().maxCoeff() > 1e-10) {
        throw ArgumentError("matrix is not unitary");
    }
}

UnitaryOp UnitaryOp::identity(int dim) {
    return UnitaryOp(CMatrix::Identity(dim, dim));
}

bool UnitaryOp::is_identity(double tol) const {
    return (matrix_ - CMatrix::Identity(matrix_.rows(), matrix_.cols())).cwiseAbs().maxCoeff() <= tol;
}

EvolutionChain::EvolutionChain(SystemState psi_i, SystemState psi_f, std::vector<UnitaryOp> unitaries,
                               std::vector<Observable> observables, double threshold)
    : psi_i_(std::move(psi_i)),
      psi_f_(std::move(psi_f)),
      unitaries_(std::move(unitaries)),
      observables_(std::move(observables)),
      threshold_(threshold) {
    if (unitaries_.size() != observables_.size() + 1) {
        throw ArgumentError("chain needs exactly one more unitary than observables");
    }
    int d = psi_i_.dim();
    if (psi_f_.dim() != d) {
        throw ArgumentError("initial and final states differ in dimension");
    }
    for (const auto &u : unitaries_) {
        if (u.dim() != d) {
            throw ArgumentError("unitary dimension does not match the system");
        }
    }
    for (const auto &a : observables_) {
        if (a.dim() != d) {
            throw ArgumentError("observable dimension does not match the system");
        }
    }
    CVector v = psi_i_.amplitudes();
    for (const auto &u : unitaries_) {
        v = u.matrix() * v;
    }
    amplitude_ = psi_f_.amplitudes().dot(v);
    if (std::abs(amplitude_) <= threshold_) {
        throw DegeneratePostselectionError("chain post-selection amplitude vanishes", std::abs(amplitude_));
    }
}

cplx weak_value(const Observable &a, const SystemState &psi_i, const SystemState &psi_f, double threshold) {
    if (a.dim() != psi_i.dim() || psi_f.dim() != psi_i.dim()) {
        throw ArgumentError("weak value operands differ in dimension");
    }
    cplx overlap = psi_f.amplitudes().dot(psi_i.amplitudes());
    if (std::abs(overlap) <= threshold) {
        throw DegeneratePostselectionError("pre- and post-selected states are nearly orthogonal",
                                           std::abs(overlap));
    }
    return psi_f.amplitudes().dot(a.matrix() * psi_i.amplitudes()) / overlap;
}

cplx chain_amplitude(const EvolutionChain &chain, std::span<const int> powers) {
    if (static_cast<int>(powers.size()) != chain.size()) {
        throw ArgumentError("one power per observable required");
    }
    CVector v = chain.unitary(1).matrix() * chain.psi_i().amplitudes();
    for (int k = 1; k <= chain.size(); ++k) {
        int p = powers[k - 1];
        if (p < 0) {
            throw ArgumentError("observable powers must be non-negative");
        }
        for (int j = 0; j < p; ++j) {
            v = chain.observable(k).matrix() * v;
        }
        v = chain.unitary(k + 1).matrix() * v;
    }
    return chain.psi_f().amplitudes().dot(v);
}

cplx power_weak_value(const EvolutionChain &chain, std::span<const int> powers) {
    return chain_amplitude(chain, powers) / chain.amplitude();
}

cplx sequential_weak_value(const EvolutionChain &chain, std::span<const int> subset) {
    check_subset(chain, subset);
    std::vector<int> powers(chain.size(), 0);
    for (int k : subset) {
        powers[k - 1] = 1;
    }
    return power_weak_value(chain, powers);
}

cplx sequential_weak_value(const EvolutionChain &chain, SubsetMask subset) {
    return sequential_weak_value(chain, subset_vector(subset));
}

cplx path_amplitude_ratio(const EvolutionChain &chain) {
    int d = chain.dim();
    int n = chain.size();
    // Eigenbasis of each projector, with the projected vector x_k in column 0.
    std::vector<CMatrix> bases;
    bases.reserve(n);
    for (int k = 1; k <= n; ++k) {
        const CMatrix &a = chain.observable(k).matrix();
        if ((a * a - a).cwiseAbs().maxCoeff() > 1e-10 || std::abs(a.trace() - 1.0) > 1e-10) {
            throw ArgumentError("observable " + std::to_string(k) + " is not a rank-1 projector");
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
        CMatrix basis(d, d);
        // Eigenvalues ascend, so the eigenvalue-1 vector is last.
        basis.col(0) = eig.eigenvectors().col(d - 1);
        for (int j = 0; j < d - 1; ++j) {
            basis.col(j + 1) = eig.eigenvectors().col(j);
        }
        bases.push_back(std::move(basis));
    }
    double paths = std::pow(static_cast<double>(d), n);
    if (paths > 1e7) {
        throw SizeError("path sum too large");
    }

    // step[k](y_k, y_{k-1}) = <y_k| U_k |y_{k-1}> for k = 2..n.
    std::vector<CMatrix> step(n);
    for (int k = 1; k < n; ++k) {
        step[k] = bases[k].adjoint() * chain.unitary(k + 1).matrix() * bases[k - 1];
    }
    CVector first = n > 0 ? CVector(bases[0].adjoint() * chain.unitary(1).matrix() * chain.psi_i().amplitudes())
                          : CVector();
    Eigen::RowVectorXcd last =
        n > 0 ? Eigen::RowVectorXcd(chain.psi_f().amplitudes().adjoint() * chain.unitary(n + 1).matrix() * bases[n - 1])
              : Eigen::RowVectorXcd();
    if (n == 0) {
        return 1.0;
    }

    cplx total = 0.0;
    cplx marked = 0.0;
    std::vector<int> y(n, 0);
    while (true) {
        cplx amp = first(y[0]);
        for (int k = 1; k < n; ++k) {
            amp *= step[k](y[k], y[k - 1]);
        }
        amp *= last(y[n - 1]);
        total += amp;
        if (std::all_of(y.begin(), y.end(), [](int v) { return v == 0; })) {
            marked = amp;
        }
        int pos = 0;
        while (pos < n && ++y[pos] == d) {
            y[pos++] = 0;
        }
        if (pos == n) {
            break;
        }
    }
    if (std::abs(total) <= chain.threshold()) {
        throw DegeneratePostselectionError("path sum vanishes", std::abs(total));
    }
    return marked / total;
}

cplx simultaneous_weak_value(const EvolutionChain &chain, std::span<const int> subset) {
    check_subset(chain, subset);
    int k = static_cast<int>(subset.size());
    if (k > 8) {
        throw SizeError("simultaneous weak value supports at most 8 observables");
    }
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<const CMatrix *> ops(chain.size(), nullptr);
    cplx total = 0.0;
    int count = 0;
    do {
        for (int j = 0; j < k; ++j) {
            ops[subset[j] - 1] = &chain.observable(subset[perm[j]]).matrix();
        }
        total += amplitude_with(chain, ops);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total / (static_cast<double>(count) * chain.amplitude());
}

cplx simultaneous_weak_value(const EvolutionChain &chain, SubsetMask subset) {
    return simultaneous_weak_value(chain, subset_vector(subset));
}

MomentFunctional weak_value_functional(const EvolutionChain &chain, WeakValueMode mode) {
    if (chain.size() < 1) {
        throw ArgumentError("weak value functional needs at least one observable");
    }
    return MomentFunctional::from_function(chain.size(), [&](SubsetMask s) {
        return mode == WeakValueMode::sequential ? sequential_weak_value(chain, s)
                                                 : simultaneous_weak_value(chain, s);
    });
}

cplx weak_value_cumulant(const EvolutionChain &chain, WeakValueMode mode) {
    return cumulant(weak_value_functional(chain, mode));
}

bool is_weakly_independent(const EvolutionChain &chain, SubsetMask s1, SubsetMask s2, double tol) {
    return is_independent(weak_value_functional(chain), s1, s2, tol);
}

}  // namespace wmc
