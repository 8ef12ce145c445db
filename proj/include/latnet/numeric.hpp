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

#ifndef LATNET_NUMERIC_HPP
#define LATNET_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace latnet {

/// Pairwise (cascade) summation. The result depends only on the order of
/// the input, never on how the caller scheduled its computation.
inline double pairwise_sum(std::span<const double> x)
{
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

/// log(sum exp(x_i)), -inf for an empty input.
inline double log_sum_exp(std::span<const double> x)
{
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : x) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double v : x) s += std::exp(v - mx);
    return mx + std::log(s);
}

/// log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b)
{
    if (a < b) std::swap(a, b);
    if (a == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t hits, std::size_t trials, double z = 1.959963984540054)
{
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct MeanVar {
    double mean = 0.0;
    double var = 0.0; // unbiased sample variance
};

inline MeanVar mean_var(std::span<const double> x)
{
    MeanVar r;
    if (x.empty()) return r;
    r.mean = pairwise_sum(x) / static_cast<double>(x.size());
    if (x.size() < 2) return r;
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - r.mean) * (x[i] - r.mean);
    r.var = pairwise_sum(sq) / static_cast<double>(x.size() - 1);
    return r;
}

} // namespace latnet

#endif // LATNET_NUMERIC_HPP
