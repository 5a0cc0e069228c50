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

#ifndef WMC_COUPLING_ENGINE_HPP
#define WMC_COUPLING_ENGINE_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "wmc/common.hpp"
#include "wmc/partitions.hpp"
#include "wmc/pointer_space.hpp"
#include "wmc/quantum_core.hpp"

namespace wmc {

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 26;
inline constexpr double kDefaultCouplingLimit = 0.5;
inline constexpr int kMaxTrotterSteps = 10000;

/// One pointer: initial wavefunction, coupling observable s, readout r and strength g.
struct PointerConfig {
    PointerWavefunction phi;
    PointerObservable s;
    PointerObservable r;
    double g;
};

/// An evolution chain with one pointer per observable; pointer k couples between U_k and U_{k+1}.
class Experiment {
  public:
    /// Throws ArgumentError on a size mismatch or a coupling outside [0, coupling_limit].
    Experiment(EvolutionChain chain, std::vector<PointerConfig> pointers,
               double coupling_limit = kDefaultCouplingLimit);

    const EvolutionChain &chain() const {
        return chain_;
    }
    const std::vector<PointerConfig> &pointers() const {
        return pointers_;
    }
    /// Pointer k, 1-based.
    const PointerConfig &pointer(int k) const {
        return pointers_.at(k - 1);
    }
    int size() const {
        return chain_.size();
    }
    double coupling_limit() const {
        return coupling_limit_;
    }
    /// Copy with new couplings g_1..g_n.
    Experiment with_couplings(const std::vector<double> &g) const;
    /// Copy with every g multiplied by `factor`.
    Experiment scaled(double factor) const;
    std::vector<double> couplings() const;

  private:
    EvolutionChain chain_;
    std::vector<PointerConfig> pointers_;
    double coupling_limit_;
};

/// Unnormalised post-selected state of the coupled pointers, a row-major tensor whose axes
/// follow `subset` in ascending order.
struct JointPointerState {
    std::vector<int> subset;
    std::vector<PointerGrid> grids;
    std::vector<int> shape;
    std::vector<cplx> samples;
    /// Integral of |Psi|^2 over the coupled pointers.
    double norm2 = 0.0;
};

/// Couples only the pointers in `subset`, evolves and post-selects. Throws SizeError if
/// d * prod m exceeds `budget` and DegeneratePostselectionError if norm2 < 1e-16.
JointPointerState run_exact(const Experiment &exp, SubsetMask subset, std::size_t budget = kDefaultMemoryBudget);

/// Single joint exponential exp(-i sum_k g_k s_k A_k) over the coupled pointers. Requires
/// U_2..U_n to be the identity.
JointPointerState run_simultaneous_exact(const Experiment &exp, SubsetMask subset,
                                         std::size_t budget = kDefaultMemoryBudget);

/// (exp(-i g_2/N s_2 A_2) exp(-i g_1/N s_1 A_1))^N between U_1 and U_3, for n = 2 and U_2 = I.
/// With a one-pointer subset the other pointer is uncoupled and the product is exact.
JointPointerState run_trotter_simultaneous(const Experiment &exp, int steps, SubsetMask subset = 0b11,
                                           std::size_t budget = kDefaultMemoryBudget);

/// <prod r_k> as the normalised quadratic form; readouts[i] acts on axis i of the state.
cplx expectation_product_complex(const JointPointerState &state, std::span<const PointerOperator> readouts);

/// Real-valued variant for Hermitian readouts; throws Error if the imaginary part exceeds
/// 1e-9 * max(1, |value|).
double expectation_product(const JointPointerState &state, std::span<const PointerObservable> readouts);

/// <r^dagger r> - |<r>|^2 for a readout acting on one axis of the state.
double axis_variance(const JointPointerState &state, int axis, const PointerOperator &readout);

/// L2 distance between two states on identical grids, relative to the norm of `reference`.
double relative_state_distance(const JointPointerState &state, const JointPointerState &reference);

enum class CouplingEngine { sequential, simultaneous, trotter };

struct MomentOptions {
    CouplingEngine engine = CouplingEngine::sequential;
    /// Per-pointer readouts overriding PointerConfig::r (e.g. lowering operators).
    std::optional<std::vector<PointerOperator>> readouts;
    int threads = 1;
    int trotter_steps = 1;
    std::size_t budget = kDefaultMemoryBudget;
};

/// S -> <prod_{k in S} r_k>, each value taken from a separate experiment in which only the
/// pointers in S are coupled. Results do not depend on the thread count.
MomentFunctional pointer_moments(const Experiment &exp, const MomentOptions &options = {});

/// Cumulant of pointer_moments; real for Hermitian readouts.
cplx pointer_cumulant(const Experiment &exp, const MomentOptions &options = {});

/// Multi-index coefficients of the truncated series for a coupled subset.
struct SeriesExpansion {
    int order = 0;
    std::vector<int> subset;
    /// alpha over multi-indices of length n (zero outside the subset), total degree <= order.
    std::map<std::vector<int>, cplx> alpha;
    /// uv[i][l][m] for the i-th pointer of the subset.
    std::vector<std::vector<std::vector<UVCoefficients>>> uv;
};

SeriesExpansion build_series(const Experiment &exp, SubsetMask subset, int order,
                             std::span<const PointerOperator> readouts = {});

/// Coefficients R_0..R_K of <prod r> in total degree of the couplings, from the numerator and
/// denominator series by formal series division.
std::vector<cplx> perturbative_orders(const SeriesExpansion &series);

/// sum_{d <= K} R_d. K <= 4.
cplx run_perturbative(const Experiment &exp, SubsetMask subset, int order,
                      std::span<const PointerOperator> readouts = {});

}  // namespace wmc

#endif  // WMC_COUPLING_ENGINE_HPP
