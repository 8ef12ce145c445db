// Copyright 2026 The latnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>

#include "latnet/lattice.hpp"

using latnet::LatticeVec;
using latnet::TorusSpec;

TEST(ModTorus, WrapsIntoCanonicalRange)
{
    EXPECT_EQ(latnet::mod_torus({2}, TorusSpec(1, 1)), (LatticeVec{-1}));
    EXPECT_EQ(latnet::mod_torus({0}, TorusSpec(1, 1)), (LatticeVec{0}));
    EXPECT_EQ(latnet::mod_torus({4, -2}, TorusSpec(2, 1)), (LatticeVec{1, 1}));
}

TEST(ModTorus, RejectsDimensionMismatch)
{
    EXPECT_THROW(latnet::mod_torus({1, 2}, TorusSpec(1, 3)), std::invalid_argument);
}

TEST(ModTorus, IdempotentAndPeriodic)
{
    for (int n : {0, 1, 2, 5}) {
        const TorusSpec spec(2, n);
        const int s = spec.side();
        for (int a = -3 * s; a <= 3 * s; ++a)
            for (int b = -2 * s; b <= 2 * s; b += 3) {
                const LatticeVec j{a, b};
                const auto r = latnet::mod_torus(j, spec);
                EXPECT_TRUE(spec.contains(r));
                EXPECT_EQ(latnet::mod_torus(r, spec), r);
                EXPECT_EQ(latnet::mod_torus(j + LatticeVec{s, 0}, spec), r);
                EXPECT_EQ(latnet::mod_torus(j + LatticeVec{0, -s}, spec), r);
                EXPECT_EQ(((a - r[0]) % s + s) % s, 0);
            }
    }
}

TEST(TorusSpec, VolumeAndIndexRoundTrip)
{
    const TorusSpec spec(3, 2);
    EXPECT_EQ(spec.volume(), 125u);
    for (std::size_t i = 0; i < spec.volume(); ++i) EXPECT_EQ(spec.index_of(spec.vec_of(i)), i);
    EXPECT_THROW(TorusSpec(0, 1), std::invalid_argument);
    EXPECT_THROW(TorusSpec(1, -1), std::invalid_argument);
}

TEST(CubeIter, Examples)
{
    const auto one = latnet::cube_iter(TorusSpec(1, 1));
    ASSERT_EQ(one.size(), 3u);
    EXPECT_EQ(one[0], (LatticeVec{-1}));
    EXPECT_EQ(one[1], (LatticeVec{0}));
    EXPECT_EQ(one[2], (LatticeVec{1}));

    const auto point = latnet::cube_iter(TorusSpec(2, 0));
    ASSERT_EQ(point.size(), 1u);
    EXPECT_EQ(point[0], (LatticeVec{0, 0}));

    const auto sq = latnet::cube_iter(TorusSpec(2, 1));
    ASSERT_EQ(sq.size(), 9u);
    EXPECT_EQ(sq.front(), (LatticeVec{-1, -1}));
    EXPECT_EQ(sq.back(), (LatticeVec{1, 1}));
}

TEST(CubeIter, DistinctAndLexicographic)
{
    const auto pts = latnet::cube_iter(TorusSpec(3, 1));
    EXPECT_EQ(std::set<LatticeVec>(pts.begin(), pts.end()).size(), pts.size());
    EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end()));
}

TEST(ShiftConfig, Examples)
{
    const TorusSpec spec(1, 1);
    const std::vector<char> x{'a', 'b', 'c'};
    EXPECT_EQ(latnet::shift_config(x, {0}, spec), x);
    EXPECT_EQ(latnet::shift_config(x, {1}, spec), (std::vector<char>{'b', 'c', 'a'}));
    EXPECT_EQ(latnet::shift_config(latnet::shift_config(x, {1}, spec), {-1}, spec), x);
}

TEST(ShiftConfig, ComposesAdditively)
{
    const TorusSpec spec(2, 2);
    std::vector<int> x(spec.volume());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<int>(i * 7 + 3);
    for (const auto& a : latnet::cube_points(2, 3))
        for (const LatticeVec& b : {LatticeVec{1, 0}, LatticeVec{-2, 4}, LatticeVec{5, -5}}) {
            const auto ab = latnet::shift_config(latnet::shift_config(x, b, spec), a, spec);
            EXPECT_EQ(ab, latnet::shift_config(x, a + b, spec));
        }
}

TEST(ShiftConfig, MatchesDefinitionSitewise)
{
    const TorusSpec spec(2, 1);
    std::vector<int> x(spec.volume());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<int>(i);
    const LatticeVec k{1, -1};
    const auto y = latnet::shift_config(x, k, spec);
    for (std::size_t m = 0; m < x.size(); ++m) EXPECT_EQ(y[m], x[latnet::torus_index(spec.vec_of(m) + k, spec)]);
    EXPECT_THROW(latnet::shift_config(std::vector<int>(4), k, spec), std::invalid_argument);
}

TEST(NeighbourTable, AgreesWithTorusIndex)
{
    const TorusSpec spec(2, 1);
    const auto nbr = latnet::neighbour_table(spec);
    for (std::size_t j = 0; j < spec.volume(); ++j) {
        EXPECT_EQ(nbr[j][spec.index_of({0, 0})], j);
        std::set<std::size_t> row(nbr[j].begin(), nbr[j].end());
        EXPECT_EQ(row.size(), spec.volume());
    }
}

TEST(LatticeVec, Arithmetic)
{
    const LatticeVec a{1, -3};
    EXPECT_EQ(a.sup_norm(), 3);
    EXPECT_EQ(-a, (LatticeVec{-1, 3}));
    EXPECT_EQ(a - a, (LatticeVec{0, 0}));
    EXPECT_THROW(a + LatticeVec{1}, std::invalid_argument);
    EXPECT_EQ(a.str(), "(1 -3)");
}
