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

// Weights from the geometric series of the cube indicator: with
// q = 1 / (rho |V_m|) and prefactor (rho - 1) / rho,
//   lambda = ((rho-1)/rho) sum_k q^k kappa^{*k},
// where kappa is the indicator of V_m. No Fourier transform involved.

#ifndef LATNET_TESTS_NEUMANN_WEIGHTS_HPP
#define LATNET_TESTS_NEUMANN_WEIGHTS_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct NeumannWeights {
    int d = 1;
    int radius = 0; // support radius of the stored array
    std::vector<double> values; // lexicographic over {-radius..radius}^d

    double at(const std::vector<int>& j) const
    {
        const int side = 2 * radius + 1;
        std::size_t idx = 0;
        for (int c : j) {
            if (c < -radius || c > radius) return 0.0;
            idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(c + radius);
        }
        return values[idx];
    }
};

/// Convolution powers truncated once the remaining mass drops below tol.
inline NeumannWeights neumann_weights(int m, double rho, int d, double tol = 1e-13)
{
    const double vm = std::pow(2.0 * m + 1.0, d);
    // mass of term k is ((rho-1)/rho) rho^{-k}; tail after K terms is rho^{-K}
    int K = 0;
    while (std::pow(rho, -K) > tol) ++K;
    const int R = K * m;
    const int side = 2 * R + 1;
    std::size_t vol = 1;
    for (int p = 0; p < d; ++p) vol *= static_cast<std::size_t>(side);

    auto coords = [&](std::size_t idx) {
        std::vector<int> c(static_cast<std::size_t>(d));
        for (int p = d - 1; p >= 0; --p) {
            c[static_cast<std::size_t>(p)] = static_cast<int>(idx % static_cast<std::size_t>(side)) - R;
            idx /= static_cast<std::size_t>(side);
        }
        return c;
    };
    auto index = [&](const std::vector<int>& c) {
        std::size_t idx = 0;
        for (int v : c) idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(v + R);
        return idx;
    };

    // cube offsets
    std::vector<std::vector<int>> cube;
    {
        const int cs = 2 * m + 1;
        std::size_t cv = 1;
        for (int p = 0; p < d; ++p) cv *= static_cast<std::size_t>(cs);
        for (std::size_t i = 0; i < cv; ++i) {
            std::vector<int> c(static_cast<std::size_t>(d));
            std::size_t t = i;
            for (int p = d - 1; p >= 0; --p) {
                c[static_cast<std::size_t>(p)] = static_cast<int>(t % static_cast<std::size_t>(cs)) - m;
                t /= static_cast<std::size_t>(cs);
            }
            cube.push_back(c);
        }
    }

    std::vector<double> term(vol, 0.0), next(vol), acc(vol, 0.0);
    term[index(std::vector<int>(static_cast<std::size_t>(d), 0))] = (rho - 1.0) / rho;
    const double q = 1.0 / (rho * vm);
    for (int k = 0; k <= K; ++k) {
        for (std::size_t i = 0; i < vol; ++i) acc[i] += term[i];
        if (k == K) break;
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < vol; ++i) {
            if (term[i] == 0.0) continue;
            const auto c = coords(i);
            for (const auto& off : cube) {
                std::vector<int> t(c);
                bool inside = true;
                for (std::size_t p = 0; p < t.size(); ++p) {
                    t[p] += off[p];
                    if (t[p] < -R || t[p] > R) inside = false;
                }
                if (inside) next[index(t)] += q * term[i];
            }
        }
        term.swap(next);
    }
    return {d, R, acc};
}

} // namespace oracle

#endif // LATNET_TESTS_NEUMANN_WEIGHTS_HPP
