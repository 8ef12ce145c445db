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

#include <cmath>
#include <set>

#include "latnet/numeric.hpp"
#include "latnet/rng.hpp"

using latnet::CounterRng;
using latnet::Philox4x32;
using latnet::Stream;

// Known-answer vectors distributed with the Random123 library.
TEST(Philox, KnownAnswerZero)
{
    const auto r = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(r, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes)
{
    const auto r = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(r, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi)
{
    const auto r = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(r, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, PureFunctionOfAddress)
{
    const CounterRng a(42), b(42), c(43);
    EXPECT_EQ(a.raw(Stream::noise, 1, 2, 3), b.raw(Stream::noise, 1, 2, 3));
    EXPECT_NE(a.raw(Stream::noise, 1, 2, 3), c.raw(Stream::noise, 1, 2, 3));
    EXPECT_NE(a.raw(Stream::noise, 1, 2, 3), a.raw(Stream::connections, 1, 2, 3));
    EXPECT_NE(a.raw(Stream::noise, 1, 2, 3), a.raw(Stream::noise, 1, 3, 2));
    EXPECT_EQ(a.seed(), 42u);
    EXPECT_EQ(CounterRng(0x123456789abcdefull).seed(), 0x123456789abcdefull);
}

TEST(CounterRng, UniformsInOpenInterval)
{
    const CounterRng rng(7);
    for (std::uint32_t i = 0; i < 20000; ++i) {
        const auto [u, v] = rng.uniform2(Stream::test, i, 0, 0);
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

// Sample mean and variance of N(0,1) within 5 standard errors.
TEST(CounterRng, NormalMoments)
{
    const CounterRng rng(11);
    const std::size_t N = 200000;
    std::vector<double> x(N), x2(N);
    for (std::size_t i = 0; i < N; ++i) {
        x[i] = rng.normal(Stream::test, static_cast<std::uint32_t>(i), 1, 0);
        x2[i] = x[i] * x[i];
    }
    const auto mv = latnet::mean_var(x);
    EXPECT_NEAR(mv.mean, 0.0, 5.0 / std::sqrt(double(N)));
    EXPECT_NEAR(mv.var, 1.0, 5.0 * std::sqrt(2.0 / double(N)));
}

TEST(CounterRng, DerivedSeedsDistinct)
{
    const CounterRng rng(5);
    std::set<std::uint64_t> seeds;
    for (std::uint32_t r = 0; r < 1000; ++r) seeds.insert(rng.derive(3, r));
    EXPECT_EQ(seeds.size(), 1000u);
}

TEST(Numeric, PairwiseSumExactOnIntegers)
{
    std::vector<double> x(1001);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    EXPECT_EQ(latnet::pairwise_sum(x), 500500.0);
}

TEST(Numeric, LogSumExpStable)
{
    const std::vector<double> x{1000.0, 1000.0};
    EXPECT_NEAR(latnet::log_sum_exp(x), 1000.0 + std::log(2.0), 1e-12);
    EXPECT_NEAR(latnet::log_add_exp(-1000.0, -1000.0), -1000.0 + std::log(2.0), 1e-12);
}

// Wilson interval for 0/n has lower limit 0 and upper z^2/(n+z^2).
TEST(Numeric, WilsonZeroHits)
{
    const double z = 1.959963984540054;
    const auto ci = latnet::wilson_interval(0, 100, z);
    EXPECT_NEAR(ci.lo, 0.0, 1e-15);
    EXPECT_NEAR(ci.hi, z * z / (100 + z * z), 1e-12);
}
