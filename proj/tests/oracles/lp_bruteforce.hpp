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

// Levy-Prokhorov distance by enumerating every subset on both sides.
// For a distance level D the least admissible eps in [D, next level) is
// max(D, largest mass gap A(S) - B(S^D) over all S, and the mirror).

#ifndef LATNET_TESTS_LP_BRUTEFORCE_HPP
#define LATNET_TESTS_LP_BRUTEFORCE_HPP

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oracle {

inline double max_gap(const std::vector<double>& wa, const std::vector<double>& wb, const std::vector<double>& dist, double level,
                      bool transpose)
{
    const std::size_t na = transpose ? wb.size() : wa.size();
    const std::size_t nb = transpose ? wa.size() : wb.size();
    const auto& from = transpose ? wb : wa;
    const auto& to = transpose ? wa : wb;
    auto d = [&](std::size_t i, std::size_t j) { return transpose ? dist[j * wb.size() + i] : dist[i * wb.size() + j]; };
    double gap = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << na); ++mask) {
        double ms = 0.0;
        for (std::size_t i = 0; i < na; ++i)
            if (mask >> i & 1u) ms += from[i];
        double mn = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            bool near = false;
            for (std::size_t i = 0; i < na && !near; ++i)
                if ((mask >> i & 1u) && d(i, j) <= level) near = true;
            if (near) mn += to[j];
        }
        gap = std::max(gap, ms - mn);
    }
    return gap;
}

inline double lp_bruteforce(const std::vector<double>& wa, const std::vector<double>& wb, const std::vector<double>& dist)
{
    std::vector<double> levels{0.0};
    for (double v : dist) levels.push_back(v);
    std::sort(levels.begin(), levels.end());
    double best = 1.0;
    for (double level : levels) {
        const double g = std::max(max_gap(wa, wb, dist, level, false), max_gap(wa, wb, dist, level, true));
        best = std::min(best, std::max(level, g));
    }
    return best;
}

} // namespace oracle

#endif // LATNET_TESTS_LP_BRUTEFORCE_HPP
