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

#ifndef WMC_PARTITIONS_HPP
#define WMC_PARTITIONS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wmc/common.hpp"

namespace wmc {

/// Bit set over a ground set {1..n}; bit i-1 set means element i is present.
using SubsetMask = std::uint32_t;

inline constexpr int kMaxPartitionSize = 12;

inline SubsetMask full_mask(int n) {
    return n >= 32 ? ~SubsetMask{0} : (SubsetMask{1} << n) - 1;
}

/// Elements of a mask in ascending order, 1-based.
std::vector<int> mask_elements(SubsetMask mask);
SubsetMask mask_of(std::span<const int> elements);

/// A set partition of {1..n}. Blocks are kept ascending internally and ordered by their
/// smallest element, so two equal partitions compare equal.
class Partition {
  public:
    Partition(int n, std::vector<std::vector<int>> blocks);

    int n() const {
        return n_;
    }
    std::size_t size() const {
        return blocks_.size();
    }
    const std::vector<std::vector<int>> &blocks() const {
        return blocks_;
    }
    std::vector<SubsetMask> block_masks() const;

    bool operator==(const Partition &other) const = default;

  private:
    int n_;
    std::vector<std::vector<int>> blocks_;
};

/// Calls visit(block_masks) once per set partition of {1..n}, in lexicographic order of the
/// restricted-growth string. The span is only valid during the call.
void for_each_partition(int n, const std::function<void(std::span<const SubsetMask>)> &visit);

/// All set partitions of {1..n} (Bell-number many). Throws SizeError unless 1 <= n <= 12.
std::vector<Partition> enumerate_partitions(int n);

/// (k-1)! (-1)^(k-1).
std::int64_t cumulant_coefficient(int k);

/// A map from non-empty subsets of {1..n} to complex numbers. Both pointer moments and
/// arrow-ordered weak values are fed through this type.
class MomentFunctional {
  public:
    /// `table` is indexed by SubsetMask and must have 2^n entries; entry 0 is ignored.
    MomentFunctional(int n, std::vector<cplx> table);

    static MomentFunctional from_function(int n, const std::function<cplx(SubsetMask)> &eval);

    int n() const {
        return n_;
    }
    cplx operator()(SubsetMask mask) const {
        return table_[mask];
    }
    cplx at(std::span<const int> elements) const {
        return table_[mask_of(elements)];
    }
    const std::vector<cplx> &table() const {
        return table_;
    }
    /// Largest |m(S)| over non-empty S.
    double max_abs() const;

    /// The functional on the elements of `mask`, relabelled 1..|mask| in ascending order.
    MomentFunctional restrict_to(SubsetMask mask) const;

  private:
    int n_;
    std::vector<cplx> table_;
};

/// Sum over partitions b of a_k * prod_j m(b_j).
cplx cumulant(const MomentFunctional &m);

/// Sum over partitions of |a_k| * prod_j |m(b_j)|; the size of the terms that cancel inside
/// cumulant(m), used to judge how much of a small result is rounding noise.
double cumulant_term_scale(const MomentFunctional &m);

/// Sum over partitions b of prod_j c(b_j).
cplx moments_from_cumulants(const MomentFunctional &c);

/// S -> cumulant of m restricted to S, for every non-empty S.
MomentFunctional cumulants_of(const MomentFunctional &m);

/// S -> moments_from_cumulants of c restricted to S, for every non-empty S.
MomentFunctional moments_of(const MomentFunctional &c);

/// <prod_i (x_i - <x_i>)> expanded through the subset moments. Supported for n in {2,3,4}.
cplx covariance(const MomentFunctional &m);

/// True iff m(S1'∪S2') factorises as m(S1')m(S2') for all non-empty S1' ⊆ S1, S2' ⊆ S2.
/// Each comparison is relative: |diff| <= tol * max(1, |m(S1'∪S2')|, |m(S1')||m(S2')|).
/// S1 and S2 must be disjoint and cover {1..n}.
bool is_independent(const MomentFunctional &m, SubsetMask s1, SubsetMask s2, double tol = 1e-10);

}  // namespace wmc

#endif  // WMC_PARTITIONS_HPP
