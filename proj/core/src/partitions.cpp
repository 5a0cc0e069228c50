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

#include "wmc/partitions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace wmc {

std::vector<int> mask_elements(SubsetMask mask) {
    std::vector<int> out;
    out.reserve(std::popcount(mask));
    for (int i = 0; mask != 0; ++i, mask >>= 1) {
        if (mask & 1) {
            out.push_back(i + 1);
        }
    }
    return out;
}

SubsetMask mask_of(std::span<const int> elements) {
    SubsetMask mask = 0;
    for (int e : elements) {
        if (e < 1 || e > 32) {
            throw ArgumentError("subset element out of range: " + std::to_string(e));
        }
        mask |= SubsetMask{1} << (e - 1);
    }
    return mask;
}

Partition::Partition(int n, std::vector<std::vector<int>> blocks) : n_(n), blocks_(std::move(blocks)) {
    if (n < 1 || n > 32) {
        throw SizeError("partition ground set size out of range: " + std::to_string(n));
    }
    SubsetMask seen = 0;
    for (auto &block : blocks_) {
        if (block.empty()) {
            throw ArgumentError("partition has an empty block");
        }
        std::sort(block.begin(), block.end());
        for (int e : block) {
            if (e < 1 || e > n) {
                throw ArgumentError("partition element outside {1..n}: " + std::to_string(e));
            }
            SubsetMask bit = SubsetMask{1} << (e - 1);
            if (seen & bit) {
                throw ArgumentError("partition blocks overlap at element " + std::to_string(e));
            }
            seen |= bit;
        }
    }
    if (seen != full_mask(n)) {
        throw ArgumentError("partition blocks do not cover {1..n}");
    }
    std::sort(blocks_.begin(), blocks_.end(), [](const auto &a, const auto &b) {
        return a.front() < b.front();
    });
}

std::vector<SubsetMask> Partition::block_masks() const {
    std::vector<SubsetMask> out;
    out.reserve(blocks_.size());
    for (const auto &b : blocks_) {
        out.push_back(mask_of(b));
    }
    return out;
}

void for_each_partition(int n, const std::function<void(std::span<const SubsetMask>)> &visit) {
    if (n < 1 || n > kMaxPartitionSize) {
        throw SizeError("partition size must be in [1, 12], got " + std::to_string(n));
    }
    // Restricted-growth string: rgs[0] = 0, rgs[i] <= 1 + max(rgs[0..i-1]).
    std::vector<int> rgs(n, 0);
    std::vector<int> prefix_max(n, 0);
    std::vector<SubsetMask> blocks;
    blocks.reserve(n);
    while (true) {
        int k = prefix_max[n - 1] + 1;
        blocks.assign(k, 0);
        for (int i = 0; i < n; ++i) {
            blocks[rgs[i]] |= SubsetMask{1} << i;
        }
        visit(blocks);

        int i = n - 1;
        while (i > 0 && rgs[i] == prefix_max[i - 1] + 1) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++rgs[i];
        prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
        for (int j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
}

std::vector<Partition> enumerate_partitions(int n) {
    std::vector<Partition> out;
    for_each_partition(n, [&](std::span<const SubsetMask> masks) {
        std::vector<std::vector<int>> blocks;
        blocks.reserve(masks.size());
        for (SubsetMask m : masks) {
            blocks.push_back(mask_elements(m));
        }
        out.emplace_back(n, std::move(blocks));
    });
    return out;
}

std::int64_t cumulant_coefficient(int k) {
    if (k < 1) {
        throw ArgumentError("cumulant coefficient needs k >= 1");
    }
    std::int64_t factorial = 1;
    for (int j = 2; j < k; ++j) {
        factorial *= j;
    }
    return (k % 2 == 1) ? factorial : -factorial;
}

MomentFunctional::MomentFunctional(int n, std::vector<cplx> table) : n_(n), table_(std::move(table)) {
    if (n < 1 || n > kMaxPartitionSize) {
        throw SizeError("moment functional size must be in [1, 12], got " + std::to_string(n));
    }
    if (table_.size() != (std::size_t{1} << n)) {
        throw ArgumentError("moment functional table must have 2^n entries");
    }
}

MomentFunctional MomentFunctional::from_function(int n, const std::function<cplx(SubsetMask)> &eval) {
    if (n < 1 || n > kMaxPartitionSize) {
        throw SizeError("moment functional size must be in [1, 12], got " + std::to_string(n));
    }
    std::vector<cplx> table(std::size_t{1} << n);
    for (SubsetMask s = 1; s < table.size(); ++s) {
        table[s] = eval(s);
    }
    return MomentFunctional(n, std::move(table));
}

double MomentFunctional::max_abs() const {
    double best = 0.0;
    for (std::size_t s = 1; s < table_.size(); ++s) {
        best = std::max(best, std::abs(table_[s]));
    }
    return best;
}

MomentFunctional MomentFunctional::restrict_to(SubsetMask mask) const {
    if (mask == 0 || (mask & ~full_mask(n_)) != 0) {
        throw ArgumentError("restriction mask must be a non-empty subset of {1..n}");
    }
    std::vector<int> elements = mask_elements(mask);
    int k = static_cast<int>(elements.size());
    return from_function(k, [&](SubsetMask local) {
        SubsetMask global = 0;
        for (int i = 0; i < k; ++i) {
            if (local & (SubsetMask{1} << i)) {
                global |= SubsetMask{1} << (elements[i] - 1);
            }
        }
        return table_[global];
    });
}

cplx cumulant(const MomentFunctional &m) {
    cplx total = 0.0;
    for_each_partition(m.n(), [&](std::span<const SubsetMask> blocks) {
        cplx term = static_cast<double>(cumulant_coefficient(static_cast<int>(blocks.size())));
        for (SubsetMask b : blocks) {
            term *= m(b);
        }
        total += term;
    });
    return total;
}

double cumulant_term_scale(const MomentFunctional &m) {
    double total = 0.0;
    for_each_partition(m.n(), [&](std::span<const SubsetMask> blocks) {
        double term = std::abs(static_cast<double>(cumulant_coefficient(static_cast<int>(blocks.size()))));
        for (SubsetMask b : blocks) {
            term *= std::abs(m(b));
        }
        total += term;
    });
    return total;
}

cplx moments_from_cumulants(const MomentFunctional &c) {
    cplx total = 0.0;
    for_each_partition(c.n(), [&](std::span<const SubsetMask> blocks) {
        cplx term = 1.0;
        for (SubsetMask b : blocks) {
            term *= c(b);
        }
        total += term;
    });
    return total;
}

MomentFunctional cumulants_of(const MomentFunctional &m) {
    return MomentFunctional::from_function(m.n(), [&](SubsetMask s) {
        return cumulant(m.restrict_to(s));
    });
}

MomentFunctional moments_of(const MomentFunctional &c) {
    return MomentFunctional::from_function(c.n(), [&](SubsetMask s) {
        return moments_from_cumulants(c.restrict_to(s));
    });
}

cplx covariance(const MomentFunctional &m) {
    int n = m.n();
    if (n < 2 || n > 4) {
        throw SizeError("covariance is supported for n in {2,3,4}, got " + std::to_string(n));
    }
    // sum over S of (-1)^{n-|S|} m(S) prod_{i not in S} m({i}), with m(empty) = 1.
    cplx total = 0.0;
    SubsetMask all = full_mask(n);
    for (SubsetMask s = 0; s <= all; ++s) {
        cplx term = (s == 0) ? cplx{1.0} : m(s);
        SubsetMask rest = all & ~s;
        for (int i = 0; i < n; ++i) {
            if (rest & (SubsetMask{1} << i)) {
                term *= -m(SubsetMask{1} << i);
            }
        }
        total += term;
    }
    return total;
}

bool is_independent(const MomentFunctional &m, SubsetMask s1, SubsetMask s2, double tol) {
    SubsetMask all = full_mask(m.n());
    if ((s1 & s2) != 0 || (s1 | s2) != all || s1 == 0 || s2 == 0) {
        throw ArgumentError("independence split must be two disjoint non-empty sets covering {1..n}");
    }
    // Iterate non-empty submasks of s1 and s2.
    for (SubsetMask a = s1; a != 0; a = (a - 1) & s1) {
        for (SubsetMask b = s2; b != 0; b = (b - 1) & s2) {
            cplx joint = m(a | b);
            cplx product = m(a) * m(b);
            double scale = std::max({1.0, std::abs(joint), std::abs(product)});
            if (std::abs(joint - product) > tol * scale) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace wmc
