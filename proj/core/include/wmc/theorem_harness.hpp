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

#ifndef WMC_THEOREM_HARNESS_HPP
#define WMC_THEOREM_HARNESS_HPP

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wmc/coupling_engine.hpp"

namespace wmc {

/// One coupling level of a sweep. Couplings are g_k = level * w_k, w_k = g_k / max_j g_j.
struct LevelResult {
    double level = 0.0;
    std::vector<double> g;
    cplx lhs;
    cplx rhs;
    double residual = 0.0;
    /// Residuals at or below this size are treated as rounding noise by the slope fit.
    double noise_floor = 0.0;
};

struct VerificationReport {
    std::string label;
    cplx lhs;
    cplx rhs;
    /// |lhs - rhs| at the reference level.
    double residual = 0.0;
    std::vector<double> g_values;
    /// Fitted log-log slope of residual against level; empty when every residual (or all
    /// but one) is at the noise floor, i.e. the identity holds to all orders.
    std::optional<double> scaling_exponent;
    /// Exponent the identity claims; the report passes at claimed_order - 0.2.
    double claimed_order = 0.0;
    bool passed = false;
    std::vector<LevelResult> levels;
    std::vector<std::pair<std::string, double>> metrics;
    std::string details;

    std::optional<double> metric(const std::string &name) const;
};

struct SweepOptions {
    std::vector<double> levels{4e-2, 2e-2, 1e-2, 5e-3};
    double reference = 1e-2;
    MomentOptions moments;
};

/// Least-squares slope of log(residual) on log(level) over points above their noise floor.
/// Returns nullopt when fewer than two points remain.
std::optional<double> fit_loglog_slope(std::span<const double> levels, std::span<const double> residuals,
                                       std::span<const double> floors);

/// Cumulant of the readouts from the exact engine against prod g * Re(xi * (A_n..A_1)^c_w).
/// Uses the simultaneous engine and weak values when options.moments.engine says so. n >= 2.
VerificationReport verify_cumulant_theorem(const Experiment &exp, const SweepOptions &options = {});

/// n = 1: <r> against <r>_i + g Re(xi A_w). For r = q the metric "im_term_form_gap" records the
/// largest difference between the xi form and the form with the explicit Im A_w term.
VerificationReport verify_n1(const Experiment &exp, const SweepOptions &options = {});

/// Exact expectation of the subset's readout product against the truncated series of order K.
VerificationReport verify_perturbative(const Experiment &exp, SubsetMask subset, int order,
                                       const SweepOptions &options = {});

/// a = q + i p / eta for a pointer with coupling s.
struct LoweringOperator {
    PointerOperator op;
    cplx eta;

    static LoweringOperator build(const PointerWavefunction &phi, const PointerObservable &s);
    CMatrix matrix(const PointerGrid &grid) const {
        return make_operator(op, grid);
    }
};

enum class LoweringMode { n1, cumulant, anticumulant_corollary };

/// n1: <a> against <a>_i + theta g A_w. cumulant: <a_1..a_n>^c against prod g theta
/// (A_n..A_1)^c_w. anticumulant_corollary: <a_1..a_n> against prod g (A_n..A_1)_w, whose
/// hypothesis <p>_i = <q>_i = 0 is recorded in the details.
VerificationReport verify_lowering(const Experiment &exp, LoweringMode mode, const SweepOptions &options = {});

/// Weak values entering the second-order closed forms.
struct WeakValueBundle {
    cplx a1;
    cplx a2;
    cplx a1_sq;
    cplx a2_sq;
    cplx a21;

    static WeakValueBundle from_chain(const EvolutionChain &chain);
};

/// Coefficients of g^0, g^1, g^2 in <q> for one pointer coupled through s = p, with the
/// weak values (A)_w = wv.a1 and (A^2)_w = wv.a1_sq.
std::array<cplx, 3> appendix_oracle_q_orders(const MomentSet &ms, const WeakValueBundle &wv);
cplx appendix_oracle_q(const MomentSet &ms, const WeakValueBundle &wv, double g);

/// <q_1 q_2> to second order in (g_1, g_2) for s = p couplings.
cplx appendix_oracle_q1q2(const MomentSet &ms1, const MomentSet &ms2, const WeakValueBundle &wv, double g1,
                          double g2);

/// Second-order truncation of oracle_q1q2 - oracle_q(1) oracle_q(2) against
/// g_1 g_2 {(A_2,A_1)_w - (A_1)_w (A_2)_w}(mu_1 nu_1 mu_2 nu_2 - rho_1 rho_2) + c.c.; passes at
/// 1e-10 relative.
VerificationReport appendix_cumulant_identity(const MomentSet &ms1, const MomentSet &ms2, const WeakValueBundle &wv,
                                              double g1, double g2);

/// Exact <q_1 q_2> (both pointers coupled) against appendix_oracle_q1q2; claimed order 3.
VerificationReport verify_appendix_oracle(const Experiment &exp, const SweepOptions &options = {});

/// Delta r_1 Delta r_2 in the jointly coupled state against g_1 g_2 Re(xi (A_2,A_1)^c_w).
VerificationReport heisenberg_check(const Experiment &exp, double tolerance = 1e-9);

/// n = 4: cumulant and covariance of the readouts across a sweep. Passes when {1,2} and {3,4}
/// are weakly independent, the cumulant falls at least as g^5 (or vanishes), the covariance
/// does not, and |cumulant| <= 1e-3 |covariance| at the reference level.
VerificationReport covariance_counterexample(const Experiment &exp, const SweepOptions &options = {});

/// Relative state error of the Trotterised pair against the joint exponential at each N.
/// Passes when every doubling of N divides the error by a factor in [1.6, 2.4].
VerificationReport verify_trotter_convergence(const Experiment &exp, const std::vector<int> &steps);

}  // namespace wmc

#endif  // WMC_THEOREM_HARNESS_HPP
