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
#include <random>
#include <set>

#include "gtest/gtest.h"

using namespace wmc;

namespace {

// Restricted growth strings: label[0] = 0, label[i] <= 1 + max(label[0..i-1]).
std::vector<std::vector<SubsetMask>> brute_partitions(int n) {
    std::vector<std::vector<SubsetMask>> out;
    std::vector<int> label(n, 0);
    std::function<void(int, int)> rec = [&](int i, int max_label) {
        if (i == n) {
            std::vector<SubsetMask> blocks(max_label + 1, 0);
            for (int k = 0; k < n; ++k) {
                blocks[label[k]] |= SubsetMask{1} << k;
            }
            std::sort(blocks.begin(), blocks.end());
            out.push_back(blocks);
            return;
        }
        for (int l = 0; l <= max_label + 1; ++l) {
            label[i] = l;
            rec(i + 1, std::max(max_label, l));
        }
    };
    if (n == 0) {
        return {{}};
    }
    label[0] = 0;
    rec(1, 0);
    return out;
}

MomentFunctional random_functional(int n, std::mt19937_64 &rng) {
    std::normal_distribution<double> nd;
    return MomentFunctional::from_function(n, [&](SubsetMask) { return cplx(nd(rng), nd(rng)); });
}

double table_gap(const MomentFunctional &a, const MomentFunctional &b) {
    double gap = 0.0;
    for (SubsetMask m = 1; m <= full_mask(a.n()); ++m) {
        gap = std::max(gap, std::abs(a(m) - b(m)));
    }
    return gap;
}

}  // namespace

TEST(partitions, bell_numbers) {
    const std::int64_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597};
    for (int n = 1; n <= 10; ++n) {
        EXPECT_EQ(static_cast<std::int64_t>(enumerate_partitions(n).size()), bell[n]) << n;
    }
    std::int64_t count = 0;
    for_each_partition(12, [&](std::span<const SubsetMask>) { ++count; });
    EXPECT_EQ(count, bell[12]);
}

TEST(partitions, matches_brute_force) {
    for (int n = 1; n <= 7; ++n) {
        std::set<std::vector<SubsetMask>> got;
        for_each_partition(n, [&](std::span<const SubsetMask> b) {
            std::vector<SubsetMask> v(b.begin(), b.end());
            std::sort(v.begin(), v.end());
            SubsetMask cover = 0;
            for (SubsetMask m : v) {
                EXPECT_NE(m, 0u);
                EXPECT_EQ(cover & m, 0u);
                cover |= m;
            }
            EXPECT_EQ(cover, full_mask(n));
            EXPECT_TRUE(got.insert(v).second);
        });
        const auto want = brute_partitions(n);
        EXPECT_EQ(got, std::set<std::vector<SubsetMask>>(want.begin(), want.end())) << n;
    }
}

TEST(partitions, enumerate_blocks_are_sorted_partitions) {
    for (const Partition &p : enumerate_partitions(4)) {
        SubsetMask cover = 0;
        for (SubsetMask m : p.block_masks()) {
            cover |= m;
        }
        EXPECT_EQ(cover, full_mask(4));
        EXPECT_EQ(p.n(), 4);
    }
}

TEST(partitions, size_limits) {
    EXPECT_THROW(enumerate_partitions(0), Error);
    EXPECT_THROW(enumerate_partitions(13), SizeError);
}

TEST(partitions, masks) {
    EXPECT_EQ(mask_elements(0b1011), (std::vector<int>{1, 2, 4}));
    const std::vector<int> e{1, 3};
    EXPECT_EQ(mask_of(e), 0b101u);
    EXPECT_EQ(full_mask(3), 0b111u);
}

TEST(cumulant, coefficients) {
    // (k-1)! (-1)^(k-1)
    EXPECT_EQ(cumulant_coefficient(1), 1);
    EXPECT_EQ(cumulant_coefficient(2), -1);
    EXPECT_EQ(cumulant_coefficient(3), 2);
    EXPECT_EQ(cumulant_coefficient(4), -6);
    EXPECT_EQ(cumulant_coefficient(5), 24);
}

TEST(cumulant, closed_forms_n2_n3) {
    std::mt19937_64 rng(7);
    const MomentFunctional m2 = random_functional(2, rng);
    EXPECT_NEAR(std::abs(cumulant(m2) - (m2(0b11) - m2(0b01) * m2(0b10))), 0.0, 1e-14);
    const MomentFunctional m = random_functional(3, rng);
    const cplx a = m(1), b = m(2), c = m(4);
    const cplx want = m(7) - m(3) * c - m(5) * b - m(6) * a + 2.0 * a * b * c;
    EXPECT_NEAR(std::abs(cumulant(m) - want), 0.0, 1e-13);
}

TEST(cumulant, n1_is_the_mean) {
    const MomentFunctional m(1, {0.0, cplx(0.3, -0.2)});
    EXPECT_EQ(cumulant(m), cplx(0.3, -0.2));
}

TEST(cumulant, gaussian_has_only_pair_cumulants) {
    // Moments of a zero-mean Gaussian vector: sums over pairings of the covariance.
    const double cov[4][4] = {{1.0, 0.3, 0.2, 0.1}, {0.3, 2.0, 0.4, 0.0}, {0.2, 0.4, 1.5, 0.5}, {0.1, 0.0, 0.5, 1.2}};
    auto isserlis = [&](SubsetMask mask) -> cplx {
        const auto e = mask_elements(mask);
        if (e.size() % 2) return 0.0;
        if (e.size() == 2) return cov[e[0] - 1][e[1] - 1];
        return cov[e[0] - 1][e[1] - 1] * cov[e[2] - 1][e[3] - 1] + cov[e[0] - 1][e[2] - 1] * cov[e[1] - 1][e[3] - 1] +
               cov[e[0] - 1][e[3] - 1] * cov[e[1] - 1][e[2] - 1];
    };
    const auto m = MomentFunctional::from_function(4, isserlis);
    EXPECT_NEAR(std::abs(cumulant(m)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(cumulant(m.restrict_to(0b0101)) - 0.2), 0.0, 1e-14);
}

TEST(cumulant, round_trip_100_seeds) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        const int n = 1 + static_cast<int>(seed % 6);
        const MomentFunctional m = random_functional(n, rng);
        const MomentFunctional c = cumulants_of(m);
        EXPECT_LT(table_gap(moments_of(c), m), 1e-10 * std::max(1.0, m.max_abs())) << seed;
        EXPECT_NEAR(std::abs(moments_from_cumulants(c) - m(full_mask(n))), 0.0, 1e-10 * std::max(1.0, m.max_abs()));
        EXPECT_NEAR(std::abs(c(full_mask(n)) - cumulant(m)), 0.0, 1e-12);
    }
}

TEST(cumulant, vanishes_on_independent_blocks_100_seeds) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(1000 + seed);
        const int n = 2 + static_cast<int>(seed % 5);
        std::uniform_int_distribution<SubsetMask> pick(1, full_mask(n) - 1);
        const SubsetMask s1 = pick(rng);
        const SubsetMask s2 = full_mask(n) & ~s1;
        const MomentFunctional a = random_functional(n, rng);
        const MomentFunctional b = random_functional(n, rng);
        // m(S) = a(S & s1) b(S & s2), with the empty set weighted 1.
        const auto m = MomentFunctional::from_function(n, [&](SubsetMask s) {
            const cplx x = (s & s1) ? a(s & s1) : cplx(1.0);
            const cplx y = (s & s2) ? b(s & s2) : cplx(1.0);
            return x * y;
        });
        EXPECT_TRUE(is_independent(m, s1, s2));
        EXPECT_LT(std::abs(cumulant(m)), 1e-10 * std::max(1.0, cumulant_term_scale(m))) << seed;
    }
}

TEST(cumulant, independence_detects_dependence) {
    std::mt19937_64 rng(3);
    const MomentFunctional m = random_functional(3, rng);
    EXPECT_FALSE(is_independent(m, 0b001, 0b110));
}

TEST(cumulant, covariance_n2_to_n4) {
    std::mt19937_64 rng(11);
    const MomentFunctional m2 = random_functional(2, rng);
    EXPECT_NEAR(std::abs(covariance(m2) - cumulant(m2)), 0.0, 1e-14);
    const MomentFunctional m3 = random_functional(3, rng);
    EXPECT_NEAR(std::abs(covariance(m3) - cumulant(m3)), 0.0, 1e-13);
    // Cov(x1..x4) = <(x1-<x1>)...(x4-<x4>)> expanded over subsets.
    const MomentFunctional m4 = random_functional(4, rng);
    cplx want = 0.0;
    for (SubsetMask s = 0; s <= full_mask(4); ++s) {
        cplx term = s ? m4(s) : cplx(1.0);
        for (int k = 1; k <= 4; ++k) {
            if (!(s & (1u << (k - 1)))) term *= -m4(1u << (k - 1));
        }
        want += term;
    }
    EXPECT_NEAR(std::abs(covariance(m4) - want), 0.0, 1e-12);
}

TEST(moment_functional, restrict_relabels) {
    std::mt19937_64 rng(5);
    const MomentFunctional m = random_functional(4, rng);
    const MomentFunctional r = m.restrict_to(0b1010);
    EXPECT_EQ(r.n(), 2);
    EXPECT_EQ(r(0b01), m(0b0010));
    EXPECT_EQ(r(0b10), m(0b1000));
    EXPECT_EQ(r(0b11), m(0b1010));
}

TEST(moment_functional, rejects_bad_table) {
    EXPECT_THROW(MomentFunctional(2, std::vector<cplx>(3)), Error);
}
