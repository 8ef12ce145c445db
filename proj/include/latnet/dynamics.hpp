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

#ifndef LATNET_DYNAMICS_HPP
#define LATNET_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "connectivity.hpp"

namespace latnet {

/// Scalar map with declared bounds: sup |fn| and its Lipschitz constant.
struct ScalarMap {
    std::function<double(double)> fn;
    double sup = 0.0;
    double lip = 0.0;
    std::string name;

    double operator()(double x) const { return fn(x); }

    static ScalarMap tanh_map() { return {[](double x) { return std::tanh(x); }, 1.0, 1.0, "tanh"}; }
    static ScalarMap logistic() { return {[](double x) { return 1.0 / (1.0 + std::exp(-x)); }, 1.0, 0.25, "logistic"}; }
    static ScalarMap constant(double c) { return {[c](double) { return c; }, std::abs(c), 0.0, "const"}; }

    static ScalarMap by_name(const std::string& name)
    {
        if (name == "tanh") return tanh_map();
        if (name == "logistic") return logistic();
        if (name == "zero") return constant(0.0);
        if (name == "one") return constant(1.0);
        throw std::invalid_argument("ScalarMap: unknown function '" + name + "'");
    }
};

struct FhnParams {
    double a = 0.7;
    double c = 0.8;
    ScalarMap f = ScalarMap::tanh_map();
    ScalarMap v_act = ScalarMap::logistic();

    void validate() const
    {
        if (!(a >= 0.0)) throw std::invalid_argument("FhnParams: a must be non-negative");
        if (!(c > 0.0)) throw std::invalid_argument("FhnParams: c must be positive");
        if (!f.fn || !v_act.fn) throw std::invalid_argument("FhnParams: missing scalar map");
        if (!std::isfinite(f.sup) || !std::isfinite(f.lip) || !std::isfinite(v_act.sup) || !std::isfinite(v_act.lip))
            throw std::invalid_argument("FhnParams: scalar map bounds must be finite");
        if (f.sup > 1.0) throw std::invalid_argument("FhnParams: gain f must satisfy sup|f| <= 1");
    }
};

struct HebbParams {
    double j_corr = 1.0;
    double j_dec = 0.5;
    double j_bar = 1.0;
    double g_ini = 0.5;

    void validate() const
    {
        if (j_corr < 0.0 || j_dec < 0.0 || j_bar < 0.0) throw std::invalid_argument("HebbParams: rates and ceiling must be non-negative");
        if (!(g_ini >= 0.0 && g_ini <= j_bar)) throw std::invalid_argument("HebbParams: g_ini must lie in [0, j_bar]");
    }
};

/// Everything the network equation needs besides noise and connections.
struct NetworkParams {
    FhnParams fhn;
    HebbParams hebb;
    ConnSpace space = ConnSpace::binary(1.0);

    void validate() const
    {
        fhn.validate();
        hebb.validate();
        space.validate();
    }

    /// Hebbian ceiling and start value for an edge carrying element `a`.
    double ceiling(int a) const { return space.norm(a); }
    double initial_weight(int a) const
    {
        if (hebb.j_bar == 0.0) return 0.0;
        return hebb.g_ini * space.norm(a) / hebb.j_bar;
    }
};

/// Samples of a path on the uniform grid t_i = i * dt.
struct Trajectory {
    double dt = 1e-3;
    std::vector<double> values;

    std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
    double horizon() const { return dt * static_cast<double>(steps()); }

    /// ||x||_t over the grid points up to index i.
    double sup_norm(std::size_t i) const
    {
        double r = 0.0;
        for (std::size_t s = 0; s <= i && s < values.size(); ++s) r = std::max(r, std::abs(values[s]));
        return r;
    }
    double sup_norm() const { return values.empty() ? 0.0 : sup_norm(values.size() - 1); }
};

/// Running sup norms, r[i] = max_{s <= i} |x_s|.
inline std::vector<double> running_sup(std::span<const double> x)
{
    std::vector<double> r(x.size());
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = m = std::max(m, std::abs(x[i]));
    return r;
}

/// Sup of |x - y| over the common grid.
inline double sup_diff(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw std::invalid_argument("sup_diff: length mismatch");
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(x[i] - y[i]));
    return r;
}

/// One step of y' = u + a - c y with u frozen at the left point; w = y / c.
inline double recovery_step(double y, double u, const FhnParams& p, double dt)
{
    const double e = std::exp(-p.c * dt);
    return e * y + (1.0 - e) / p.c * (u + p.a);
}

/// The recovery variable w along a path, w_i = c^{-1} y_i with y_0 = 0.
inline std::vector<double> recovery_path(std::span<const double> u, const FhnParams& p, double dt)
{
    std::vector<double> w(u.size(), 0.0);
    double y = 0.0;
    for (std::size_t i = 1; i < u.size(); ++i) {
        y = recovery_step(y, u[i - 1], p, dt);
        w[i] = y / p.c;
    }
    return w;
}

inline double cubic_part(double u) { return u - u * u * u / 3.0; }

/// Drift at grid index i of the path prefix: U_t - U_t^3/3 - w_t.
inline double fhn_drift(const Trajectory& u, const FhnParams& p, std::size_t i)
{
    if (i >= u.values.size()) throw std::out_of_range("fhn_drift: index beyond trajectory");
    const auto w = recovery_path(std::span<const double>(u.values).first(i + 1), p, u.dt);
    return cubic_part(u.values[i]) - w[i];
}

/// Drift along the whole path.
inline std::vector<double> fhn_drift_path(const Trajectory& u, const FhnParams& p)
{
    const auto w = recovery_path(u.values, p, u.dt);
    std::vector<double> b(u.values.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = cubic_part(u.values[i]) - w[i];
    return b;
}

/// Exact update of dG/dt = J^corr (ceil - G) v(x) v(y) - J^dec G over dt
/// with the activities frozen, clamped to [0, ceil].
inline double hebbian_step(double g, double x, double y, const FhnParams& fhn, const HebbParams& p, double dt, double ceil)
{
    const double gain = p.j_corr * fhn.v_act(x) * fhn.v_act(y);
    const double rate = gain + p.j_dec;
    if (rate == 0.0) return std::clamp(g, 0.0, ceil);
    const double target = gain * ceil / rate;
    const double next = target + (g - target) * std::exp(-rate * dt);
    return std::clamp(next, 0.0, ceil);
}

inline double hebbian_step(double g, double x, double y, const FhnParams& fhn, const HebbParams& p, double dt)
{
    return hebbian_step(g, x, y, fhn, p, dt, p.j_bar);
}

/// Lambda(conn, U, X) = G f(U) f(X), zero on the null connection.
inline double interaction_lambda(int conn, double g, double u, double x, const NetworkParams& p)
{
    if (p.space.is_null(conn)) return 0.0;
    return g * p.fhn.f(u) * p.fhn.f(x);
}

/// The drift constants: the one-sided Lipschitz constant of the difference,
/// and the affine constant with b <= C(1 + ||Z||) when Z_t >= 0 (and the
/// mirrored lower bound). The affine form is needed because b(0) != 0 for
/// a > 0.
struct DriftConstants {
    double difference = 0.0;
    double affine = 0.0;
};

inline DriftConstants drift_constants(const FhnParams& p)
{
    const double ic2 = 1.0 / (p.c * p.c);
    return {1.0 + ic2, 1.0 + ic2 + p.a * ic2};
}

/// Lipschitz constant of Lambda in its path arguments over [0, T]. The
/// learned weight depends on both paths, which adds
/// sup|f|^2 J^corr ceil sup|v| lip(v) T to the frozen-weight value.
inline double interaction_lipschitz(const NetworkParams& p, double horizon)
{
    const double cj = p.space.c_j();
    const auto& f = p.fhn.f;
    const auto& v = p.fhn.v_act;
    const double learned = f.sup * f.sup * p.hebb.j_corr * cj * v.sup * v.lip * horizon;
    return std::max(cj, cj * f.lip * f.sup + learned);
}

struct AuditViolation {
    std::string kind;
    std::size_t pair = 0;
    std::size_t step = 0;
    double ratio = 0.0;
};

struct AuditReport {
    std::size_t pairs = 0;
    /// Smallest C with the one-sided difference bound over the corpus.
    double c_difference = 0.0;
    /// Smallest C with b <= C ||Z|| (strict form); infinite when b != 0 at
    /// a zero-norm prefix.
    double c_strict = 0.0;
    /// Smallest C with the affine form b <= C (1 + ||Z||).
    double c_affine = 0.0;
    /// Max of |Lambda(x,.,X) - Lambda(x,.,Z)| / (||x|| ||X - Z||) over both slots.
    double lip_ratio = 0.0;
    /// Max of |Lambda(x,U,X) - Lambda(y,U,X)| / ((||U|| + ||X||) d(x, y)).
    double conn_ratio = 0.0;
    /// Max of |Lambda(x,U,X)| / (||x|| (1 + ||U||)).
    double abs_ratio = 0.0;
    double cj_estimate = 0.0;
    std::vector<AuditViolation> violations;

    bool empty() const { return pairs == 0; }
};

namespace detail {

/// Learned weight path along (x, y) for an edge with ceiling `ceil`.
inline std::vector<double> weight_path(std::span<const double> x, std::span<const double> y, const NetworkParams& p, double dt,
                                       double ceil, double g0)
{
    std::vector<double> g(x.size());
    if (g.empty()) return g;
    g[0] = g0;
    for (std::size_t i = 1; i < g.size(); ++i) g[i] = hebbian_step(g[i - 1], x[i - 1], y[i - 1], p.fhn, p.hebb, dt, ceil);
    return g;
}

inline double safe_ratio(double num, double den)
{
    if (num <= 0.0) return 0.0;
    if (den <= 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}

} // namespace detail

/// Audit of the drift and interaction inequalities over a corpus of path
/// pairs sharing one time grid. Ratios above 1 + tolerance (against the
/// reference constants C_difference, C_affine and 1 for the interaction
/// ratios) are reported as violations.
inline AuditReport assumption_audit(const NetworkParams& p, const std::vector<std::pair<Trajectory, Trajectory>>& corpus,
                                    double tolerance = 1e-9)
{
    AuditReport rep;
    rep.pairs = corpus.size();
    if (corpus.empty()) return rep;
    const auto ref = drift_constants(p.fhn);
    auto flag = [&](const char* kind, std::size_t pair, std::size_t step, double ratio, double limit) {
        if (ratio > limit * (1.0 + tolerance) + tolerance) rep.violations.push_back({kind, pair, step, ratio});
    };

    for (std::size_t pi = 0; pi < corpus.size(); ++pi) {
        const auto& [xt, zt] = corpus[pi];
        if (xt.values.size() != zt.values.size() || xt.dt != zt.dt) throw std::invalid_argument("assumption_audit: pair grids differ");
        const auto& x = xt.values;
        const auto& z = zt.values;
        const double dt = xt.dt;
        const auto bx = fhn_drift_path(xt, p.fhn);
        const auto bz = fhn_drift_path(zt, p.fhn);
        const auto sx = running_sup(x);
        const auto sz = running_sup(z);
        std::vector<double> diff(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - z[i];
        const auto sd = running_sup(diff);

        for (std::size_t i = 0; i < x.size(); ++i) {
            const double db = x[i] >= z[i] ? bx[i] - bz[i] : bz[i] - bx[i];
            const double r = detail::safe_ratio(db, sd[i]);
            rep.c_difference = std::max(rep.c_difference, r);
            flag("drift-difference", pi, i, r, ref.difference);

            for (int side = 0; side < 2; ++side) {
                const double u = side == 0 ? x[i] : z[i];
                const double b = side == 0 ? bx[i] : bz[i];
                const double s = side == 0 ? sx[i] : sz[i];
                // both one-sided conditions apply at u = 0
                const double signed_b = u > 0.0 ? b : (u < 0.0 ? -b : std::abs(b));
                rep.c_strict = std::max(rep.c_strict, detail::safe_ratio(signed_b, s));
                const double ra = detail::safe_ratio(signed_b, 1.0 + s);
                rep.c_affine = std::max(rep.c_affine, ra);
                flag("drift-affine", pi, i, ra, ref.affine);
            }
        }

        const int cs = p.space.size();
        std::vector<std::vector<double>> g_cross(static_cast<std::size_t>(cs));
        for (int a = 0; a < cs; ++a)
            if (!p.space.is_null(a)) g_cross[static_cast<std::size_t>(a)] = detail::weight_path(x, z, p, dt, p.ceiling(a), p.initial_weight(a));
        for (int a = 0; a < cs; ++a) {
            if (p.space.is_null(a)) continue;
            const double na = p.space.norm(a);
            // Lambda(a, X, Z), Lambda(a, X, X), Lambda(a, Z, Z)
            const auto& gxz = g_cross[static_cast<std::size_t>(a)];
            const auto gxx = detail::weight_path(x, x, p, dt, p.ceiling(a), p.initial_weight(a));
            const auto gzz = detail::weight_path(z, z, p, dt, p.ceiling(a), p.initial_weight(a));
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double l_xz = interaction_lambda(a, gxz[i], x[i], z[i], p);
                const double l_xx = interaction_lambda(a, gxx[i], x[i], x[i], p);
                const double l_zz = interaction_lambda(a, gzz[i], z[i], z[i], p);
                const double r2 = detail::safe_ratio(std::abs(l_xx - l_xz), na * sd[i]);
                const double r1 = detail::safe_ratio(std::abs(l_xz - l_zz), na * sd[i]);
                rep.lip_ratio = std::max({rep.lip_ratio, r1, r2});
                flag("interaction-lipschitz", pi, i, std::max(r1, r2), 1.0);
                const double rabs = detail::safe_ratio(std::abs(l_xz), na * (1.0 + sx[i]));
                rep.abs_ratio = std::max(rep.abs_ratio, rabs);
                flag("interaction-bound", pi, i, rabs, 1.0);
                for (int b = 0; b < cs; ++b) {
                    if (b == a) continue;
                    const double l_b =
                        p.space.is_null(b) ? 0.0 : interaction_lambda(b, g_cross[static_cast<std::size_t>(b)][i], x[i], z[i], p);
                    const double rc = detail::safe_ratio(std::abs(l_xz - l_b), (sx[i] + sz[i]) * p.space.dist(a, b));
                    rep.conn_ratio = std::max(rep.conn_ratio, rc);
                    flag("interaction-connection", pi, i, rc, 1.0);
                }
            }
        }
    }
    rep.cj_estimate = p.space.c_j() * std::max(1.0, rep.lip_ratio);
    return rep;
}

} // namespace latnet

#endif // LATNET_DYNAMICS_HPP
