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

#ifndef LATNET_SOLVER_HPP
#define LATNET_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "connectivity.hpp"
#include "dynamics.hpp"
#include "numeric.hpp"
#include "rng.hpp"
#include "weights.hpp"

namespace latnet {

/// Number of grid steps for horizon T at step dt; dt must divide T.
inline std::size_t grid_steps(double T, double dt)
{
    if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("grid_steps: need dt > 0 and T >= 0");
    const double q = T / dt;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, q)) throw std::invalid_argument("grid_steps: dt does not divide T");
    return static_cast<std::size_t>(r);
}

/// Brownian paths W^j on the grid, one per site, W^j_0 = 0.
struct NoiseField {
    TorusSpec spec;
    double dt = 1e-3;
    std::vector<std::vector<double>> paths;

    std::size_t steps() const { return paths.empty() ? 0 : paths.front().size() - 1; }
    double horizon() const { return dt * static_cast<double>(steps()); }
    double increment(std::size_t site, std::size_t step) const { return paths[site][step + 1] - paths[site][step]; }

    static NoiseField zero(const TorusSpec& spec, double dt, double T)
    {
        NoiseField nf{spec, dt, {}};
        nf.paths.assign(spec.volume(), std::vector<double>(grid_steps(T, dt) + 1, 0.0));
        return nf;
    }

    /// Site m of the result carries the path of site (m + s) mod V_n.
    NoiseField shifted(const LatticeVec& s) const
    {
        NoiseField out{spec, dt, {}};
        out.paths = shift_config(paths, s, spec);
        return out;
    }

    /// Subsample every `factor`-th grid point (same Brownian path, coarser grid).
    NoiseField coarsen(std::size_t factor) const
    {
        if (factor == 0 || steps() % factor != 0) throw std::invalid_argument("NoiseField::coarsen: factor must divide the step count");
        NoiseField out{spec, dt * static_cast<double>(factor), {}};
        for (const auto& p : paths) {
            std::vector<double> c;
            c.reserve(p.size() / factor + 1);
            for (std::size_t i = 0; i < p.size(); i += factor) c.push_back(p[i]);
            out.paths.push_back(std::move(c));
        }
        return out;
    }
};

/// Independent Brownian paths keyed by (seed, replica, site, step).
inline NoiseField sample_noise(const TorusSpec& spec, double dt, double T, std::uint64_t seed, std::uint32_t replica = 0)
{
    const std::size_t n = grid_steps(T, dt);
    const CounterRng rng(seed);
    const double sd = std::sqrt(dt);
    NoiseField nf{spec, dt, {}};
    nf.paths.resize(spec.volume());
    for (std::size_t j = 0; j < spec.volume(); ++j) {
        auto& p = nf.paths[j];
        p.resize(n + 1);
        p[0] = 0.0;
        for (std::size_t s = 0; s < n; ++s)
            p[s + 1] = p[s] + sd * rng.normal(Stream::noise, replica, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(s));
    }
    return nf;
}

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(std::size_t site, double time, double value)
        : std::runtime_error(message(site, time, value)), site_(site), time_(time)
    {
    }
    std::size_t site() const { return site_; }
    double time() const { return time_; }

private:
    static std::string message(std::size_t site, double time, double value)
    {
        std::ostringstream os;
        os << "blow-up at site " << site << ", t = " << time << " (U = " << value << ")";
        return os.str();
    }
    std::size_t site_;
    double time_;
};

inline constexpr double kBlowUpThreshold = 1e6;

/// Learned-weight record of one non-null connection.
struct EdgeTrace {
    std::size_t site = 0;
    std::size_t offset = 0;
    int value = 0;
    double g_min = 0.0;
    double g_max = 0.0;
    double g_final = 0.0;
    std::vector<double> path; // filled only when requested
};

struct NetworkState {
    TorusSpec spec;
    double dt = 1e-3;
    /// Truncation radius of the interaction sum (n for the full equation).
    int truncation = 0;
    std::vector<std::vector<double>> U;
    std::vector<std::vector<double>> w;
    std::vector<EdgeTrace> edges;

    std::size_t steps() const { return U.empty() ? 0 : U.front().size() - 1; }
    double horizon() const { return dt * static_cast<double>(steps()); }
    Trajectory trajectory(std::size_t site) const { return {dt, U[site]}; }
    double sup_norm(std::size_t site) const { return running_sup(U[site]).back(); }
};

struct IntegrateOptions {
    bool store_weight_paths = false;
};

namespace detail {

inline NetworkState integrate_impl(const NoiseField& noise, const ConnectionField& field, const NetworkParams& params, int m,
                                   const IntegrateOptions& opts)
{
    const TorusSpec& spec = noise.spec;
    if (!(field.spec() == spec)) throw std::invalid_argument("integrate: noise and connection field live on different tori");
    if (noise.paths.size() != spec.volume()) throw std::invalid_argument("integrate: noise has wrong site count");
    params.validate();
    const std::size_t vol = spec.volume();
    const std::size_t steps = noise.steps();
    const double dt = noise.dt;
    const auto nbr = neighbour_table(spec);
    const auto offsets = cube_iter(spec);

    // Active edges per row, in increasing offset order.
    struct Active {
        std::size_t target;
        std::size_t trace;
    };
    NetworkState st;
    st.spec = spec;
    st.dt = dt;
    st.truncation = m;
    std::vector<std::vector<Active>> rows(vol);
    std::vector<double> g;
    std::vector<double> ceil;
    for (std::size_t j = 0; j < vol; ++j) {
        for (const auto& e : field.row(j)) {
            if (offsets[e.offset].sup_norm() > m) continue;
            const int val = static_cast<int>(e.value);
            rows[j].push_back({nbr[j][e.offset], st.edges.size()});
            const double g0 = params.initial_weight(val);
            EdgeTrace tr{j, e.offset, val, g0, g0, g0, {}};
            if (opts.store_weight_paths) {
                tr.path.reserve(steps + 1);
                tr.path.push_back(g0);
            }
            st.edges.push_back(std::move(tr));
            g.push_back(g0);
            ceil.push_back(params.ceiling(val));
        }
    }

    st.U.assign(vol, std::vector<double>(steps + 1, 0.0));
    st.w.assign(vol, std::vector<double>(steps + 1, 0.0));
    std::vector<double> y(vol, 0.0);
    std::vector<double> fu(vol);
    const auto& fhn = params.fhn;

    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t j = 0; j < vol; ++j) fu[j] = fhn.f(st.U[j][s]);
        for (std::size_t j = 0; j < vol; ++j) {
            const double u = st.U[j][s];
            double coupling = 0.0;
            for (const auto& a : rows[j]) coupling += g[a.trace] * fu[j] * fu[a.target];
            const double drift = cubic_part(u) - y[j] / fhn.c;
            const double next = u + dt * (drift + coupling) + noise.increment(j, s);
            if (!std::isfinite(next) || std::abs(next) > kBlowUpThreshold) throw BlowUpError(j, dt * static_cast<double>(s + 1), next);
            st.U[j][s + 1] = next;
        }
        for (std::size_t j = 0; j < vol; ++j) {
            const double u = st.U[j][s];
            for (const auto& a : rows[j]) {
                double& gv = g[a.trace];
                gv = hebbian_step(gv, u, st.U[a.target][s], fhn, params.hebb, dt, ceil[a.trace]);
                auto& tr = st.edges[a.trace];
                tr.g_min = std::min(tr.g_min, gv);
                tr.g_max = std::max(tr.g_max, gv);
                if (opts.store_weight_paths) tr.path.push_back(gv);
            }
            y[j] = recovery_step(y[j], u, fhn, dt);
            st.w[j][s + 1] = y[j] / fhn.c;
        }
    }
    for (auto& tr : st.edges) tr.g_final = g[&tr - st.edges.data()];
    return st;
}

} // namespace detail

/// Euler-Maruyama for the torus network with exact exponential updates of
/// the recovery variable and the learned weights.
inline NetworkState integrate_network(const NoiseField& noise, const ConnectionField& field, const NetworkParams& params,
                                      const IntegrateOptions& opts = {})
{
    return detail::integrate_impl(noise, field, params, noise.spec.n, opts);
}

/// Same scheme with the interaction restricted to offsets in V_m.
inline NetworkState psi_m_truncated(const NoiseField& noise, const ConnectionField& field, const NetworkParams& params, int m,
                                    const IntegrateOptions& opts = {})
{
    if (m < 0 || m > noise.spec.n) throw std::invalid_argument("psi_m_truncated: need 0 <= m <= n");
    return detail::integrate_impl(noise, field, params, m, opts);
}

/// Sum of ||omega^{j,k}|| over the row of site j with ||k|| <= m.
inline double row_norm_sum(const ConnectionField& field, const ConnSpace& space, std::size_t j, int m)
{
    const auto& spec = field.spec();
    double s = 0.0;
    for (const auto& e : field.row(j))
        if (spec.vec_of(e.offset).sup_norm() <= m) s += space.norm(static_cast<int>(e.value));
    return s;
}

struct AprioriSite {
    double lhs = 0.0;
    double rhs = 0.0;
    /// Same bound without the offset term T C e^{T(C+S)} (the form stated
    /// for a drift without constant offset).
    double rhs_homogeneous = 0.0;
};

struct AprioriReport {
    std::vector<AprioriSite> sites;
    double max_ratio = 0.0;
    double min_relative_slack = std::numeric_limits<double>::infinity();
    double max_ratio_homogeneous = 0.0;

    bool holds(double tol = 1e-6) const { return min_relative_slack >= -tol; }
};

/// Checks ||U^j||_T <= e^{T(C+2S)} + T C e^{T(C+S)} + 2 e^{T(C+S)} ||W^j||_T
/// with S = sum_{||k|| <= m} ||omega^{j,k}|| and C the affine drift
/// constant. The middle term carries the constant drift offset.
inline AprioriReport apriori_bound_certificate(const NetworkState& state, const NoiseField& noise, const ConnectionField& field,
                                               const ConnSpace& space, double c_affine)
{
    AprioriReport rep;
    const double T = state.horizon();
    for (std::size_t j = 0; j < state.U.size(); ++j) {
        const double S = row_norm_sum(field, space, j, state.truncation);
        const double wn = running_sup(noise.paths[j]).back();
        AprioriSite s;
        s.lhs = state.sup_norm(j);
        const double e1 = std::exp(T * (c_affine + S));
        s.rhs_homogeneous = std::exp(T * (c_affine + 2.0 * S)) + 2.0 * e1 * wn;
        s.rhs = s.rhs_homogeneous + T * c_affine * e1;
        rep.max_ratio = std::max(rep.max_ratio, s.lhs / s.rhs);
        rep.max_ratio_homogeneous = std::max(rep.max_ratio_homogeneous, s.lhs / s.rhs_homogeneous);
        rep.min_relative_slack = std::min(rep.min_relative_slack, (s.rhs - s.lhs) / s.rhs);
        rep.sites.push_back(s);
    }
    return rep;
}

struct PairBoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double prefactor = 0.0;
    double connection_term = 0.0; // (1+sqrt rho) T |V_m|^1/2 (..)^1/2 (..)^1/2
    double noise_term = 0.0;      // 2 sum lambda ||Q - R||
    double tail_term = 0.0;       // T sum lambda ||beta|| (||Z|| + 1) over V_n - V_m
    double relative_slack = 0.0;

    bool holds(double tol = 1e-6) const { return relative_slack >= -tol; }
};

/// Both sides of the truncation-difference bound between X = Psi^m(Q, omega)
/// and Z = Psi^n(R, beta) on the torus, with periodised weights.
inline PairBoundReport pair_bound_certificate(const NetworkState& x_state, const NetworkState& z_state, const NoiseField& q_noise,
                                              const NoiseField& r_noise, const ConnectionField& omega, const ConnectionField& beta,
                                              const ConnSpace& space, const WeightSequence& weights, double c_difference, double c_j)
{
    const TorusSpec& spec = x_state.spec;
    if (!(z_state.spec == spec) || x_state.steps() != z_state.steps())
        throw std::invalid_argument("pair_bound_certificate: states do not share a grid");
    const int m = weights.m;
    if (x_state.truncation != m) throw std::invalid_argument("pair_bound_certificate: weights radius differs from the truncation of X");
    if (z_state.truncation < m) throw std::invalid_argument("pair_bound_certificate: Z must be truncated at n >= m");

    const auto lam = periodized_weights(weights, spec);
    const auto offsets = cube_iter(spec);
    const double T = x_state.horizon();
    const double vm = static_cast<double>(weights.vm());
    const double rho = weights.rho;
    const std::size_t vol = spec.volume();

    std::vector<double> lhs(vol), zsq(vol), dsq(vol), qr(vol), tail(vol);
    for (std::size_t j = 0; j < vol; ++j) {
        const double zn = z_state.sup_norm(j);
        lhs[j] = lam[j] * sup_diff(x_state.U[j], z_state.U[j]);
        zsq[j] = lam[j] * zn * zn;
        qr[j] = lam[j] * sup_diff(q_noise.paths[j], r_noise.paths[j]);
        double dd = 0.0, tt = 0.0;
        for (std::size_t k = 0; k < vol; ++k) {
            const int r = offsets[k].sup_norm();
            if (r <= m) {
                const double dk = space.dist(omega.get(j, k), beta.get(j, k));
                dd += dk * dk;
            } else if (r <= z_state.truncation) {
                tt += space.norm(beta.get(j, k));
            }
        }
        dsq[j] = lam[j] * dd;
        tail[j] = lam[j] * tt * (zn + 1.0);
    }

    PairBoundReport rep;
    rep.lhs = pairwise_sum(lhs);
    rep.prefactor = std::exp(T * c_difference + T * (1.0 + rho) * c_j * vm);
    rep.connection_term = (1.0 + std::sqrt(rho)) * T * std::sqrt(vm) * std::sqrt(pairwise_sum(zsq)) * std::sqrt(pairwise_sum(dsq));
    rep.noise_term = 2.0 * pairwise_sum(qr);
    rep.tail_term = T * pairwise_sum(tail);
    rep.rhs = rep.prefactor * (rep.connection_term + rep.noise_term + rep.tail_term);
    if (rep.rhs > 0.0)
        rep.relative_slack = (rep.rhs - rep.lhs) / rep.rhs;
    else
        rep.relative_slack = rep.lhs == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return rep;
}

struct MeanFieldParams {
    FhnParams fhn;
    double coupling = 0.5; // h(x, y) = coupling f(x) f(y)
    double sigma = 1.0;
};

/// dX^j = [b(X^j) + N^{-1} sum_k h(X^j, X^k)] dt + sigma dW^j, X_0 = 0.
inline std::vector<Trajectory> mean_field_baseline(std::size_t N, const MeanFieldParams& p, double dt, double T, std::uint64_t seed)
{
    if (N < 1) throw std::invalid_argument("mean_field_baseline: need N >= 1");
    const std::size_t steps = grid_steps(T, dt);
    const CounterRng rng(seed);
    const double sd = std::sqrt(dt);
    std::vector<Trajectory> out(N, Trajectory{dt, std::vector<double>(steps + 1, 0.0)});
    std::vector<double> y(N, 0.0), fx(N);
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t j = 0; j < N; ++j) fx[j] = p.fhn.f(out[j].values[s]);
        const double mean_f = pairwise_sum(fx) / static_cast<double>(N);
        for (std::size_t j = 0; j < N; ++j) {
            const double u = out[j].values[s];
            const double drift = cubic_part(u) - y[j] / p.fhn.c + p.coupling * fx[j] * mean_f;
            const double dw = sd * rng.normal(Stream::mean_field, 0, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(s));
            const double next = u + dt * drift + p.sigma * dw;
            if (!std::isfinite(next) || std::abs(next) > kBlowUpThreshold) throw BlowUpError(j, dt * static_cast<double>(s + 1), next);
            out[j].values[s + 1] = next;
            y[j] = recovery_step(y[j], u, p.fhn, dt);
        }
    }
    return out;
}

struct RichardsonResult {
    double coarse_diff = 0.0; // max |U_dt - U_dt/2| on the dt grid
    double fine_diff = 0.0;   // max |U_dt/2 - U_dt/4| on the dt grid
    double ratio = 0.0;
};

/// Successive-difference ratio under step halving. `fine` is the noise at
/// the finest step dt/4; the coarser runs see the same Brownian path.
inline RichardsonResult richardson_ratio(const NoiseField& fine, const ConnectionField& field, const NetworkParams& params)
{
    const auto u4 = integrate_network(fine, field, params);
    const auto u2 = integrate_network(fine.coarsen(2), field, params);
    const auto u1 = integrate_network(fine.coarsen(4), field, params);
    RichardsonResult r;
    for (std::size_t j = 0; j < u1.U.size(); ++j) {
        for (std::size_t i = 0; i < u1.U[j].size(); ++i) {
            r.coarse_diff = std::max(r.coarse_diff, std::abs(u1.U[j][i] - u2.U[j][2 * i]));
            r.fine_diff = std::max(r.fine_diff, std::abs(u2.U[j][2 * i] - u4.U[j][4 * i]));
        }
    }
    r.ratio = r.coarse_diff > 0.0 ? r.fine_diff / r.coarse_diff : 0.0;
    return r;
}

} // namespace latnet

#endif // LATNET_SOLVER_HPP
