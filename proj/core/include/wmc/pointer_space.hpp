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

#ifndef WMC_POINTER_SPACE_HPP
#define WMC_POINTER_SPACE_HPP

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wmc/common.hpp"

namespace wmc {

/// Periodic grid of m points q_j = q_min + j*(q_max - q_min)/m, j = 0..m-1.
class PointerGrid {
  public:
    /// m must be a power of two in [32, 1024] and q_max > q_min.
    PointerGrid(double q_min, double q_max, int m);
    /// [-12, 12] with m points.
    static PointerGrid standard(int m = 256);

    double q_min() const {
        return q_min_;
    }
    double q_max() const {
        return q_max_;
    }
    int size() const {
        return m_;
    }
    double spacing() const {
        return (q_max_ - q_min_) / m_;
    }
    double length() const {
        return q_max_ - q_min_;
    }
    double coordinate(int j) const {
        return q_min_ + j * spacing();
    }
    std::vector<double> coordinates() const;
    std::vector<double> wavenumbers() const;

    bool operator==(const PointerGrid &other) const = default;

  private:
    double q_min_;
    double q_max_;
    int m_;
};

/// Pointer wavefunction sampled on a grid, normalised so that spacing * sum |phi_j|^2 = 1.
class PointerWavefunction {
  public:
    /// Validates normalisation (1e-10) and decay at both grid edges (<= 1e-6 of the peak).
    PointerWavefunction(PointerGrid grid, CVector samples);
    static PointerWavefunction normalized(PointerGrid grid, CVector samples);
    static PointerWavefunction from_function(PointerGrid grid, const std::function<cplx(double)> &f);

    const PointerGrid &grid() const {
        return grid_;
    }
    const CVector &samples() const {
        return samples_;
    }

  private:
    PointerGrid grid_;
    CVector samples_;
};

/// Hermitian pointer observable: position, momentum, or an explicit grid matrix.
class PointerObservable {
  public:
    enum class Kind { Q, P, Matrix };

    static PointerObservable Q() {
        return PointerObservable(Kind::Q, {});
    }
    static PointerObservable P() {
        return PointerObservable(Kind::P, {});
    }
    /// Throws ArgumentError unless the matrix is square and Hermitian to 1e-12.
    static PointerObservable matrix(CMatrix m);

    Kind kind() const {
        return kind_;
    }
    /// Only meaningful for Kind::Matrix.
    const CMatrix &dense() const {
        return dense_;
    }
    std::string name() const;

  private:
    PointerObservable(Kind kind, CMatrix dense) : kind_(kind), dense_(std::move(dense)) {
    }
    Kind kind_;
    CMatrix dense_;
};

/// General linear pointer operator c_q Q + c_p P + M, not necessarily Hermitian. Readouts are
/// expressed in this form so that lowering operators and observables share one code path.
class PointerOperator {
  public:
    PointerOperator(const PointerObservable &obs);  // NOLINT: implicit by design of the readout API
    static PointerOperator linear(cplx cq, cplx cp);
    static PointerOperator dense(CMatrix m);

    cplx q_coefficient() const {
        return cq_;
    }
    cplx p_coefficient() const {
        return cp_;
    }
    /// Null when the operator has no dense part.
    const CMatrix *matrix_part() const {
        return matrix_.get();
    }
    /// True for operators built from a PointerObservable or a real linear combination.
    bool is_hermitian() const;

  private:
    PointerOperator() = default;
    cplx cq_ = 0.0;
    cplx cp_ = 0.0;
    std::shared_ptr<const CMatrix> matrix_;
};

/// Dense grid matrix of an observable. Q is diagonal; P = F^-1 diag(k) F.
CMatrix make_operator(const PointerObservable &obs, const PointerGrid &grid);
CMatrix make_operator(const PointerOperator &op, const PointerGrid &grid);

/// op * psi without forming dense matrices for the Q and P parts.
CVector apply(const PointerOperator &op, const PointerGrid &grid, const CVector &psi);
/// In-place variant on a contiguous fibre.
void apply_in_place(const PointerOperator &op, const PointerGrid &grid, std::span<cplx> psi);

/// spacing * sum conj(a_j) b_j.
cplx inner_product(const PointerGrid &grid, const CVector &a, const CVector &b);

/// <phi| O_1 O_2 ... O_w |phi>. The word must be non-empty.
cplx moment(const PointerWavefunction &phi, std::span<const PointerOperator> word);
cplx moment(const PointerWavefunction &phi, std::initializer_list<PointerOperator> word);

/// <q>, <p>, <p^2>, <qp>, <qp^2>, <pqp> of the initial pointer state.
struct MomentSet {
    cplx mu;
    cplx nu;
    cplx zeta;
    cplx rho;
    cplx sigma;
    cplx tau;
};

MomentSet moment_set(const PointerWavefunction &phi);

/// A pointer's initial state with its readout r and coupling s.
struct PointerSetting {
    PointerWavefunction phi;
    PointerOperator r;
    PointerObservable s;
};

/// 2(-i)^n (prod <r_k s_k> - prod <r_k><s_k>).
cplx xi_factor(std::span<const PointerSetting> pointers);

/// xi for a single pointer with readout r.
cplx xi_single(const PointerWavefunction &phi, const PointerOperator &r, const PointerObservable &s);

/// -i conj(xi_p) / conj(xi_q). Throws SingularEtaError if |xi_q| <= 1e-10.
cplx eta(const PointerWavefunction &phi, const PointerObservable &s);

/// A pointer's initial state with its coupling; the readout is implied by the caller.
struct PointerCoupling {
    PointerWavefunction phi;
    PointerObservable s;
};

/// Weight of (A_n..A_1)^c_w in the cumulant of lowering-operator readouts. Sums over
/// binary words i in {0,1}^n with r_0 = q, r_1 = p.
cplx theta_factor(std::span<const PointerCoupling> pointers);

/// Same sum with the leading xi conjugated; the lowering-operator cumulant contains
/// varpi * conj((A_n..A_1)^c_w), and varpi vanishes identically.
cplx varpi_factor(std::span<const PointerCoupling> pointers);

inline constexpr int kSeriesOrderCap = 4;

struct UVCoefficients {
    cplx u;
    cplx v;
};

/// u = <(-is)^m phi| r |(-is)^l phi> / (l! m!), v the same without r.
UVCoefficients uv_coefficients(const PointerWavefunction &phi, const PointerObservable &s, const PointerOperator &r,
                               int l, int m, int order_cap = kSeriesOrderCap);

/// Grid CSV: a line "#grid q_min=<x> q_max=<x> m=<k>", the header "q,re,im", then one row per point.
void write_wavefunction_csv(std::ostream &out, const PointerWavefunction &phi);
PointerWavefunction read_wavefunction_csv(std::istream &in);
PointerWavefunction load_wavefunction_csv(const std::string &path);

/// Exponentials exp(-i theta s) of a coupling observable on a grid. Q and P use exact
/// diagonal / Fourier phases; Matrix kind uses a scaling-and-squaring matrix exponential.
class CouplingPropagator {
  public:
    /// The eigen-decomposition of a Matrix-kind s is only computed when `with_eigenbasis` is set.
    CouplingPropagator(const PointerObservable &s, const PointerGrid &grid, bool with_eigenbasis = true);

    CVector apply(double theta, const CVector &psi) const;

    /// Eigen-decomposition of s for the joint-exponential engines.
    const std::vector<double> &eigenvalues() const {
        return eigenvalues_;
    }
    void to_eigenbasis(std::span<cplx> psi) const;
    void from_eigenbasis(std::span<cplx> psi) const;

  private:
    PointerObservable::Kind kind_;
    PointerGrid grid_;
    CMatrix s_;
    CMatrix eigenvectors_;
    std::vector<double> eigenvalues_;
};

}  // namespace wmc

#endif  // WMC_POINTER_SPACE_HPP
