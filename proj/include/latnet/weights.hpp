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

#ifndef LATNET_WEIGHTS_HPP
#define LATNET_WEIGHTS_HPP

// Summable lattice weights lambda_m^j, defined as the Fourier coefficients
// of the symbol h / (rho |V_m| - kappa_m(theta)), where kappa_m is the
// Dirichlet kernel of the cube V_m. They dominate the convolution with the
// cube indicator: sum_{k in V_m} lambda^{j-k} <= rho |V_m| lambda^j.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "numeric.hpp"

namespace latnet {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// prod_p sin((2m+1) theta_p / 2) / sin(theta_p / 2), i.e. the real value
/// of sum_{k in V_m} exp(-i <theta, k>).
inline double dirichlet_kernel(std::span<const double> theta, int m)
{
    if (m < 0) throw std::invalid_argument("dirichlet_kernel: m must be non-negative");
    const double w = 2.0 * m + 1.0;
    double r = 1.0;
    for (double t : theta) {
        if (std::abs(t) < 1e-8) {
            r *= w - w * (w * w - 1.0) * t * t / 24.0;
        } else {
            r *= std::sin(w * t / 2.0) / std::sin(t / 2.0);
        }
    }
    return r;
}

inline double dirichlet_kernel(std::initializer_list<double> theta, int m)
{
    return dirichlet_kernel(std::span<const double>(theta.begin(), theta.size()), m);
}

/// Default half-resolution K of the periodic trapezoid grid (2K+1 points per
/// axis). The integrand is analytic and periodic, so convergence is
/// geometric; 64 (2m+1) leaves a wide margin.
inline int default_grid(int m) { return 64 * (2 * m + 1); }

namespace detail {

inline std::size_t ipow(std::size_t b, int e)
{
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

inline std::vector<double> grid_nodes(int K)
{
    const int N = 2 * K + 1;
    std::vector<double> t(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) t[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * (i - K) / N;
    return t;
}

/// 1 / (rho |V_m| - kappa_m(theta)) on the tensor grid, lexicographic order.
inline std::vector<double> resolvent_on_grid(int m, double rho, int d, int K)
{
    const auto nodes = grid_nodes(K);
    const std::size_t N = nodes.size();
    const double vm = static_cast<double>(ipow(static_cast<std::size_t>(2 * m + 1), d));

    // kappa factorises over axes
    std::vector<double> axis(N);
    for (std::size_t i = 0; i < N; ++i) axis[i] = dirichlet_kernel({nodes[i]}, m);

    const std::size_t total = ipow(N, d);
    std::vector<double> out(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double kappa = 1.0;
        for (int p = 0; p < d; ++p) kappa *= axis[idx[static_cast<std::size_t>(p)]];
        out[flat] = 1.0 / (rho * vm - kappa);
        for (int p = d - 1; p >= 0; --p) {
            if (++idx[static_cast<std::size_t>(p)] < N) break;
            idx[static_cast<std::size_t>(p)] = 0;
        }
    }
    return out;
}

/// Cosine coefficients c[r_1..r_d] = mean_theta prod_p cos(r_p theta_p) f(theta)
/// for r_p in [0, R], contracting one axis at a time. f must be even in every
/// coordinate, which makes the sine parts vanish.
inline std::vector<double> cosine_coefficients(const std::vector<double>& f, int d, int K, int R)
{
    const auto nodes = grid_nodes(K);
    const std::size_t N = nodes.size();
    const std::size_t Rp = static_cast<std::size_t>(R) + 1;

    std::vector<double> cosines(Rp * N);
    for (std::size_t r = 0; r < Rp; ++r)
        for (std::size_t i = 0; i < N; ++i) cosines[r * N + i] = std::cos(static_cast<double>(r) * nodes[i]);

    // Invariant: cur has shape (N, rest) with the leading axis still to be
    // contracted; contracted axes are appended at the end.
    std::vector<double> cur = f;
    std::vector<double> column(N);
    for (int step = 0; step < d; ++step) {
        const std::size_t rest = cur.size() / N;
        std::vector<double> next(rest * Rp);
        for (std::size_t q = 0; q < rest; ++q) {
            for (std::size_t r = 0; r < Rp; ++r) {
                for (std::size_t i = 0; i < N; ++i) column[i] = cosines[r * N + i] * cur[i * rest + q];
                next[q * Rp + r] = pairwise_sum(column) / static_cast<double>(N);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

/// Mean of the resolvent over the grid, i.e. the zero-mode integral.
inline double zero_mode(int m, double rho, int d, int K)
{
    const auto f = resolvent_on_grid(m, rho, d, K);
    return pairwise_sum(f) / static_cast<double>(f.size());
}

inline void check_args(int m, double rho, int d)
{
    if (m < 0) throw std::invalid_argument("weights: m must be non-negative");
    if (!(rho > 1.0)) throw std::invalid_argument("weights: rho must exceed 1");
    if (d < 1) throw std::invalid_argument("weights: dimension must be positive");
}

} // namespace detail

struct NormalizerResult {
    double h = 0.0;
    int grid = 0;          // K at which the value was accepted
    double rel_change = 0; // relative change between K/2 and K
};

/// h such that (2 pi)^{-d} int h / (rho |V_m| - kappa_m) dtheta = 1, found by
/// doubling the trapezoid grid until two successive values agree to 1e-10.
inline NormalizerResult normalizer_h(int m, double rho, int d, int grid = 0, int max_doublings = 6)
{
    detail::check_args(m, rho, d);
    int K = grid > 0 ? grid : default_grid(m);
    double prev = 1.0 / detail::zero_mode(m, rho, d, K);
    for (int it = 0; it < max_doublings; ++it) {
        K *= 2;
        const double cur = 1.0 / detail::zero_mode(m, rho, d, K);
        const double rel = std::abs(cur - prev) / std::abs(cur);
        if (rel < 1e-10) return {cur, K, rel};
        prev = cur;
    }
    throw QuadratureError("normalizer_h: trapezoid rule did not stabilise to 1e-10");
}

/// lambda_m^j on the window ||j||_inf <= R.
struct WeightSequence {
    int m = 0;
    double rho = 2.0;
    int d = 1;
    int window = 0;
    int grid = 0;
    /// Scale actually applied to the Fourier coefficients, fixed by
    /// sum_j lambda^j = 1: h = (rho - 1) |V_m|.
    double h = 0.0;
    /// Zero-mode normaliser (coefficient lambda^0 = 1 convention), reported
    /// alongside for the bound h >= |V_m| (rho - 1).
    double h_zero_mode = 0.0;
    /// Values in lexicographic order over cube_points(d, window).
    std::vector<double> values;
    double tail_mass = 0.0;

    std::size_t vm() const { return detail::ipow(static_cast<std::size_t>(2 * m + 1), d); }
    TorusSpec window_spec() const { return TorusSpec(d, window); }
    bool in_window(const LatticeVec& j) const { return j.dim() == d && j.sup_norm() <= window; }

    double at(const LatticeVec& j) const
    {
        if (!in_window(j)) throw std::out_of_range("WeightSequence::at: index outside window " + j.str());
        return values[window_spec().index_of(j)];
    }

    /// Stored value inside the window, direct quadrature outside it.
    double lambda_at(const LatticeVec& j) const;
};

/// Single coefficient by direct quadrature (no window).
inline double weight_coefficient(const LatticeVec& j, int m, double rho, int K, double h)
{
    const int d = j.dim();
    const auto nodes = detail::grid_nodes(K);
    const auto f = detail::resolvent_on_grid(m, rho, d, K);
    const std::size_t N = nodes.size();
    std::vector<double> terms(f.size());
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        double c = 1.0;
        for (int p = 0; p < d; ++p) c *= std::cos(j[p] * nodes[idx[static_cast<std::size_t>(p)]]);
        terms[flat] = c * f[flat];
        for (int p = d - 1; p >= 0; --p) {
            if (++idx[static_cast<std::size_t>(p)] < N) break;
            idx[static_cast<std::size_t>(p)] = 0;
        }
    }
    return h * pairwise_sum(terms) / static_cast<double>(f.size());
}

inline double WeightSequence::lambda_at(const LatticeVec& j) const
{
    if (in_window(j)) return at(j);
    return weight_coefficient(j, m, rho, grid, h);
}

inline WeightSequence compute_weights(int m, double rho, int d, int window = -1, int grid = 0)
{
    detail::check_args(m, rho, d);
    if (window < 0) window = 4 * m;
    if (window < m) throw std::invalid_argument("compute_weights: window must be at least m");

    const auto norm = normalizer_h(m, rho, d, grid);
    int K = grid > 0 ? grid : default_grid(m);
    // the coefficient of order R needs at least R grid points per axis
    K = std::max(K, window + 1);

    WeightSequence w;
    w.m = m;
    w.rho = rho;
    w.d = d;
    w.window = window;
    w.grid = K;
    w.h_zero_mode = norm.h;
    w.h = (rho - 1.0) * static_cast<double>(w.vm());

    const auto f = detail::resolvent_on_grid(m, rho, d, K);
    const auto coeff = detail::cosine_coefficients(f, d, K, window);

    const TorusSpec win(d, window);
    const std::size_t Rp = static_cast<std::size_t>(window) + 1;
    w.values.resize(win.volume());
    for (std::size_t i = 0; i < win.volume(); ++i) {
        const LatticeVec j = win.vec_of(i);
        std::size_t c = 0;
        for (int p = 0; p < d; ++p) c = c * Rp + static_cast<std::size_t>(std::abs(j[p]));
        w.values[i] = w.h * coeff[c];
    }
    w.tail_mass = 1.0 - pairwise_sum(w.values);
    return w;
}

/// Smallest window holding every coefficient of size >= cutoff. The
/// quadrature floor is near 1e-16, so positivity is only resolvable above a
/// cutoff a few orders larger.
inline int resolved_window(int m, double rho, int d, double cutoff = 1e-13)
{
    detail::check_args(m, rho, d);
    if (!(cutoff > 0.0)) throw std::invalid_argument("resolved_window: cutoff must be positive");
    for (int probe = 16 * std::max(m, 1);; probe *= 2) {
        const auto w = compute_weights(m, rho, d, probe);
        const TorusSpec win = w.window_spec();
        int r = m;
        for (std::size_t i = 0; i < win.volume(); ++i)
            if (std::abs(w.values[i]) >= cutoff) r = std::max(r, win.vec_of(i).sup_norm());
        if (r < probe) return r;
        if (probe > 1 << 14) throw QuadratureError("resolved_window: coefficients do not decay below the cutoff");
    }
}

/// Periodised weights bar-lambda^j = sum_{l = j mod V_n} lambda^l for j in
/// V_n. By Poisson summation this is the symbol averaged over the dual grid
/// 2 pi q / (2n+1), which is exact.
inline std::vector<double> periodized_weights(const WeightSequence& w, const TorusSpec& torus)
{
    if (torus.d != w.d) throw std::invalid_argument("periodized_weights: dimension mismatch");
    const int s = torus.side();
    const std::size_t vol = torus.volume();
    const double vm = static_cast<double>(w.vm());

    std::vector<double> axis(static_cast<std::size_t>(s));
    std::vector<double> theta(static_cast<std::size_t>(s));
    for (int q = 0; q < s; ++q) {
        theta[static_cast<std::size_t>(q)] = 2.0 * std::numbers::pi * (q - torus.n) / s;
        axis[static_cast<std::size_t>(q)] = dirichlet_kernel({theta[static_cast<std::size_t>(q)]}, w.m);
    }
    std::vector<double> symbol(vol);
    for (std::size_t qi = 0; qi < vol; ++qi) {
        const LatticeVec q = torus.vec_of(qi);
        double kappa = 1.0;
        for (int p = 0; p < w.d; ++p) kappa *= axis[static_cast<std::size_t>(q[p] + torus.n)];
        symbol[qi] = w.h / (w.rho * vm - kappa);
    }
    std::vector<double> out(vol);
    std::vector<double> terms(vol);
    for (std::size_t ji = 0; ji < vol; ++ji) {
        const LatticeVec j = torus.vec_of(ji);
        for (std::size_t qi = 0; qi < vol; ++qi) {
            const LatticeVec q = torus.vec_of(qi);
            double c = 1.0;
            for (int p = 0; p < w.d; ++p) c *= std::cos(j[p] * theta[static_cast<std::size_t>(q[p] + torus.n)]);
            terms[qi] = c * symbol[qi];
        }
        out[ji] = pairwise_sum(terms) / static_cast<double>(vol);
    }
    return out;
}

struct WeightCertificateEntry {
    LatticeVec j;
    double lambda = 0.0;
    /// rho |V_m| lambda^j - sum_{k in V_m} lambda^{j-k}
    double convolution_slack = 0.0;
    /// |V_m| lambda^j, only meaningful for j in V_m
    double scaled_lambda = 0.0;
    bool in_cube = false;
};

struct WeightCertificate {
    std::vector<WeightCertificateEntry> entries;
    double min_convolution_slack = 0.0;
    double min_scaled_lambda_in_cube = 0.0;
    double lower_bound_threshold = 0.0; // (rho - 1) / rho^2
    double h_lower_bound = 0.0;         // |V_m| (rho - 1)
    bool all_positive = true;
    bool convolution_ok = true;
    bool lower_bound_ok = true;
    bool h_bound_ok = true;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

/// Checks positivity, the convolution inequality at every window index, the
/// finite-m lower bound |V_m| lambda^j >= factor (rho-1)/rho^2 on V_m, and
/// h >= |V_m| (rho - 1) for the zero-mode normaliser.
inline WeightCertificate weight_certificates(const WeightSequence& w, double slack_tol = 1e-8, double lower_bound_factor = 1.0)
{
    WeightCertificate cert;
    const double vm = static_cast<double>(w.vm());
    cert.lower_bound_threshold = (w.rho - 1.0) / (w.rho * w.rho);
    cert.h_lower_bound = vm * (w.rho - 1.0);
    cert.min_convolution_slack = std::numeric_limits<double>::infinity();
    cert.min_scaled_lambda_in_cube = std::numeric_limits<double>::infinity();

    const auto cube = cube_points(w.d, w.m);
    const TorusSpec win = w.window_spec();
    for (std::size_t i = 0; i < win.volume(); ++i) {
        WeightCertificateEntry e;
        e.j = win.vec_of(i);
        e.lambda = w.values[i];
        std::vector<double> conv;
        conv.reserve(cube.size());
        for (const auto& k : cube) conv.push_back(w.lambda_at(e.j - k));
        e.convolution_slack = w.rho * vm * e.lambda - pairwise_sum(conv);
        e.in_cube = e.j.sup_norm() <= w.m;
        e.scaled_lambda = vm * e.lambda;

        if (!(e.lambda > 0.0)) {
            cert.all_positive = false;
            cert.failures.push_back("non-positive weight at " + e.j.str());
        }
        if (e.convolution_slack < -slack_tol) {
            cert.convolution_ok = false;
            cert.failures.push_back("convolution inequality violated at " + e.j.str());
        }
        cert.min_convolution_slack = std::min(cert.min_convolution_slack, e.convolution_slack);
        if (e.in_cube) {
            cert.min_scaled_lambda_in_cube = std::min(cert.min_scaled_lambda_in_cube, e.scaled_lambda);
            if (e.scaled_lambda < lower_bound_factor * cert.lower_bound_threshold) {
                cert.lower_bound_ok = false;
                cert.failures.push_back("lower bound violated at " + e.j.str());
            }
        }
        cert.entries.push_back(std::move(e));
    }
    if (w.h_zero_mode < cert.h_lower_bound * (1.0 - 1e-12)) {
        cert.h_bound_ok = false;
        cert.failures.push_back("zero-mode normaliser below |V_m|(rho-1)");
    }
    return cert;
}

} // namespace latnet

#endif // LATNET_WEIGHTS_HPP
