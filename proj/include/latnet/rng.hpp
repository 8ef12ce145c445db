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

#ifndef LATNET_RNG_HPP
#define LATNET_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace latnet {

/// Philox4x32-10 block cipher (Salmon et al., SC'11). Stateless: every
/// draw is a pure function of (key, counter), so substreams never overlap
/// and results do not depend on evaluation order.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Counter single_round(const Counter& c, const Key& k)
    {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Purposes of the independent substreams derived from one seed.
enum class Stream : std::uint32_t {
    noise = 1,
    connections = 2,
    metropolis = 3,
    mean_field = 4,
    corpus = 5,
    test = 99,
};

/// Counter-based generator keyed by a 64-bit seed. Draws are addressed by
/// (stream, a, b, c), e.g. (noise, replica, site, step).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
    {
    }

    std::uint64_t seed() const { return (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0]; }

    Philox4x32::Counter raw(Stream s, std::uint32_t a, std::uint32_t b, std::uint32_t c) const
    {
        return Philox4x32::block({c, b, a, static_cast<std::uint32_t>(s)}, key_);
    }

    /// Two uniforms in the open interval (0, 1), 53-bit resolution.
    std::pair<double, double> uniform2(Stream s, std::uint32_t a, std::uint32_t b, std::uint32_t c) const
    {
        const auto r = raw(s, a, b, c);
        return {to_open01(r[0], r[1]), to_open01(r[2], r[3])};
    }

    double uniform(Stream s, std::uint32_t a, std::uint32_t b, std::uint32_t c) const
    {
        return uniform2(s, a, b, c).first;
    }

    /// Standard normal via Box-Muller on the two uniforms of one block.
    double normal(Stream s, std::uint32_t a, std::uint32_t b, std::uint32_t c) const
    {
        const auto [u1, u2] = uniform2(s, a, b, c);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Derived seed for a child experiment (e.g. one replica), so that the
    /// child can be re-run in isolation.
    std::uint64_t derive(std::uint32_t tag, std::uint32_t index) const
    {
        const auto r = raw(Stream::corpus, tag, index, 0xFFFFFFFFu);
        return (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    }

private:
    static double to_open01(std::uint32_t hi, std::uint32_t lo)
    {
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
};

} // namespace latnet

#endif // LATNET_RNG_HPP
