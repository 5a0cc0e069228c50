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

#ifndef WMC_QUANTUM_CORE_HPP
#define WMC_QUANTUM_CORE_HPP

#include <span>
#include <vector>

#include "wmc/common.hpp"
#include "wmc/partitions.hpp"

namespace wmc {

inline constexpr double kPostselectionThreshold = 1e-8;

/// Normalised pure state of the finite-dimensional system.
class SystemState {
  public:
    /// Throws ArgumentError unless the norm is 1 within 1e-12.
    explicit SystemState(CVector amplitudes);
    /// Rescales `amplitudes` to unit norm.
    static SystemState normalized(CVector amplitudes);
    static SystemState basis(int dim, int index);

    int dim() const {
        return static_cast<int>(amplitudes_.size());
    }
    const CVector &amplitudes() const {
        return amplitudes_;
    }

  private:
    CVector amplitudes_;
};

/// Hermitian operator on the system.
class Observable {
  public:
    /// Throws ArgumentError unless the matrix is square and max|M - M^dagger| <= 1e-12.
    explicit Observable(CMatrix matrix);
    static Observable projector(const CVector &v);
    static Observable identity(int dim);

    int dim() const {
        return static_cast<int>(matrix_.rows());
    }
    const CMatrix &matrix() const {
        return matrix_;
    }

  private:
    CMatrix matrix_;
};

/// Unitary evolution of the system.
class UnitaryOp {
  public:
    /// Throws ArgumentError unless max|U^dagger U - I| <= 1e-10.
    explicit UnitaryOp(CMatrix matrix);
    static UnitaryOp identity(int dim);

    int dim() const {
        return static_cast<int>(matrix_.rows());
    }
    const CMatrix &matrix() const {
        return matrix_;
    }
    bool is_identity(double tol = 1e-12) const;

  private:
    CMatrix matrix_;
};

/// psi_i, then U_1, A_1, U_2, ..., A_n, U_{n+1}, then post-selection on psi_f.
/// Observables are indexed 1..n in the public API.
class EvolutionChain {
  public:
    EvolutionChain(SystemState psi_i, SystemState psi_f, std::vector<UnitaryOp> unitaries,
                   std::vector<Observable> observables, double threshold = kPostselectionThreshold);

    int dim() const {
        return psi_i_.dim();
    }
    int size() const {
        return static_cast<int>(observables_.size());
    }
    const SystemState &psi_i() const {
        return psi_i_;
    }
    const SystemState &psi_f() const {
        return psi_f_;
    }
    const std::vector<UnitaryOp> &unitaries() const {
        return unitaries_;
    }
    const std::vector<Observable> &observables() const {
        return observables_;
    }
    /// U_k, 1-based (k = 1..n+1).
    const UnitaryOp &unitary(int k) const {
        return unitaries_.at(k - 1);
    }
    /// A_k, 1-based (k = 1..n).
    const Observable &observable(int k) const {
        return observables_.at(k - 1);
    }
    /// <psi_f| U_{n+1} ... U_1 |psi_i>.
    cplx amplitude() const {
        return amplitude_;
    }
    double threshold() const {
        return threshold_;
    }

  private:
    SystemState psi_i_;
    SystemState psi_f_;
    std::vector<UnitaryOp> unitaries_;
    std::vector<Observable> observables_;
    double threshold_;
    cplx amplitude_;
};

/// <psi_f|A|psi_i> / <psi_f|psi_i>.
cplx weak_value(const Observable &a, const SystemState &psi_i, const SystemState &psi_f,
                double threshold = kPostselectionThreshold);

/// <psi_f| U_{n+1} A_n^{p_n} U_n ... A_1^{p_1} U_1 |psi_i>, powers indexed 1..n as powers[k-1].
cplx chain_amplitude(const EvolutionChain &chain, std::span<const int> powers);

/// (A_n^{p_n}, ..., A_1^{p_1})_w: chain_amplitude(powers) / chain.amplitude().
cplx power_weak_value(const EvolutionChain &chain, std::span<const int> powers);

/// Arrow-ordered sequential weak value of the observables in `subset` (1-based, ascending).
cplx sequential_weak_value(const EvolutionChain &chain, std::span<const int> subset);
cplx sequential_weak_value(const EvolutionChain &chain, SubsetMask subset);

/// Explicit path sum for chains whose observables are all rank-1 projectors |x_k><x_k|:
/// amplitude(x) / sum_y amplitude(y), y running over an orthonormal basis containing x_k at
/// each step. Throws ArgumentError if an observable is not a rank-1 projector.
cplx path_amplitude_ratio(const EvolutionChain &chain);

/// (1/k!) sum over orderings of the subset's observables, placed at the subset's chain
/// positions with the unitaries held fixed. k <= 8.
cplx simultaneous_weak_value(const EvolutionChain &chain, std::span<const int> subset);
cplx simultaneous_weak_value(const EvolutionChain &chain, SubsetMask subset);

enum class WeakValueMode { sequential, simultaneous };

/// S -> arrow-ordered (or symmetrised) weak value of the observables in S.
MomentFunctional weak_value_functional(const EvolutionChain &chain,
                                       WeakValueMode mode = WeakValueMode::sequential);

/// (A_n, ..., A_1)^c_w, or the simultaneous variant.
cplx weak_value_cumulant(const EvolutionChain &chain, WeakValueMode mode = WeakValueMode::sequential);

/// Weak independence of the observables labelled by s1 and s2 (disjoint, covering 1..n).
bool is_weakly_independent(const EvolutionChain &chain, SubsetMask s1, SubsetMask s2, double tol = 1e-10);

/// Largest |M - M^dagger| entry.
double hermiticity_defect(const CMatrix &m);

}  // namespace wmc

#endif  // WMC_QUANTUM_CORE_HPP
