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

#ifndef LATNET_MEASURE_HPP
#define LATNET_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "connectivity.hpp"
#include "dynamics.hpp"
#include "numeric.hpp"
#include "solver.hpp"

namespace latnet {

/// Empirical measure of a V_n-periodic configuration: the |V_n| shifts of
/// the periodic interpolant, each with weight 1/|V_n|. Atoms are implicit
/// (atom l is the shift by the l-th point of V_n).
struct EmpiricalMeasure {
    enum class Kind { paths, double_layer };

    Kind kind = Kind::paths;
    TorusSpec spec;
    double dt = 1e-3;
    /// Per-site paths in lexicographic site order.
    std::vector<std::vector<double>> paths;
    /// Dense connection rows (bond id = j |V_n| + k), double layer only.
    std::vector<int> conns;
    ConnSpace space = ConnSpace::binary(1.0);

    std::size_t atom_count() const { return spec.volume(); }
    double atom_weight() const { return 1.0 / static_cast<double>(spec.volume()); }
    bool has_connections() const { return kind == Kind::double_layer; }

    /// omega^{j,k} of the periodic interpolant, null when k is outside V_n.
    int connection(const LatticeVec& j, const LatticeVec& k) const
    {
        if (!spec.contains(k)) return space.null_index;
        const std::size_t v = spec.volume();
        return conns[torus_index(j, spec) * v + spec.index_of(k)];
    }
};

inline EmpiricalMeasure empirical_measure(const NetworkState& state)
{
    EmpiricalMeasure mu;
    mu.kind = EmpiricalMeasure::Kind::paths;
    mu.spec = state.spec;
    mu.dt = state.dt;
    mu.paths = state.U;
    return mu;
}

inline EmpiricalMeasure double_layer_measure(const NoiseField& noise, const ConnectionField& field, const ConnSpace& space)
{
    if (!(noise.spec == field.spec())) throw std::invalid_argument("double_layer_measure: noise and field live on different tori");
    EmpiricalMeasure mu;
    mu.kind = EmpiricalMeasure::Kind::double_layer;
    mu.spec = noise.spec;
    mu.dt = noise.dt;
    mu.paths = noise.paths;
    mu.conns = field.dense();
    mu.space = space;
    return mu;
}

/// Restriction of one atom to the window V_q: paths of the sites in V_q and,
/// for double layers, the connections (j, k) with j, k in V_q.
struct WindowAtom {
    std::vector<std::vector<double>> paths;
    std::vector<int> conns;
    friend bool operator==(const WindowAtom&, const WindowAtom&) = default;
};

struct AtomSet {
    int q = 0;
    std::vector<double> weights;
    std::vector<WindowAtom> atoms;
    bool double_layer = false;
    ConnSpace space = ConnSpace::binary(1.0);
};

/// Atom l of mu restricted to V_q.
inline WindowAtom window_atom(const EmpiricalMeasure& mu, const LatticeVec& shift, int q)
{
    const auto win = cube_points(mu.spec.d, q);
    WindowAtom a;
    a.paths.reserve(win.size());
    for (const auto& j : win) a.paths.push_back(mu.paths[torus_index(j + shift, mu.spec)]);
    if (mu.has_connections()) {
        a.conns.reserve(win.size() * win.size());
        for (const auto& j : win)
            for (const auto& k : win) a.conns.push_back(mu.connection(j + shift, k));
    }
    return a;
}

inline AtomSet project_marginal(const EmpiricalMeasure& mu, int q)
{
    if (q < 0) throw std::invalid_argument("project_marginal: q must be non-negative");
    AtomSet s;
    s.q = q;
    s.double_layer = mu.has_connections();
    s.space = mu.space;
    for (const auto& l : cube_iter(mu.spec)) {
        s.atoms.push_back(window_atom(mu, l, q));
        s.weights.push_back(mu.atom_weight());
    }
    return s;
}

/// sum_j ||x^j - y^j||_T, plus the root-sum-square of connection distances
/// for double layers.
inline double window_distance(const WindowAtom& a, const WindowAtom& b, const ConnSpace& space, bool double_layer)
{
    if (a.paths.size() != b.paths.size()) throw std::invalid_argument("window_distance: windows differ");
    double s = 0.0;
    for (std::size_t j = 0; j < a.paths.size(); ++j) s += sup_diff(a.paths[j], b.paths[j]);
    if (double_layer) {
        double c = 0.0;
        for (std::size_t i = 0; i < a.conns.size(); ++i) {
            const double dij = space.dist(a.conns[i], b.conns[i]);
            c += dij * dij;
        }
        s += std::sqrt(c);
    }
    return s;
}

inline std::vector<double> distance_matrix(const AtomSet& a, const AtomSet& b)
{
    std::vector<double> d(a.atoms.size() * b.atoms.size());
    for (std::size_t i = 0; i < a.atoms.size(); ++i)
        for (std::size_t j = 0; j < b.atoms.size(); ++j)
            d[i * b.atoms.size() + j] = window_distance(a.atoms[i], b.atoms[j], a.space, a.double_layer);
    return d;
}

namespace detail {

/// Edmonds-Karp max flow on the bipartite graph source -> A -> B -> sink.
/// A-B edges (capacity infinite) are those with dist <= eps.
inline double bipartite_max_flow(const std::vector<double>& wa, const std::vector<double>& wb, const std::vector<double>& dist,
                                 double eps)
{
    const std::size_t na = wa.size(), nb = wb.size();
    const std::size_t N = na + nb + 2, src = na + nb, snk = na + nb + 1;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> cap(N, std::vector<double>(N, 0.0));
    for (std::size_t i = 0; i < na; ++i) cap[src][i] = wa[i];
    for (std::size_t j = 0; j < nb; ++j) cap[na + j][snk] = wb[j];
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            if (dist[i * nb + j] <= eps) cap[i][na + j] = inf;

    double flow = 0.0;
    std::vector<std::size_t> parent(N);
    for (;;) {
        std::fill(parent.begin(), parent.end(), N);
        parent[src] = src;
        std::queue<std::size_t> bfs;
        bfs.push(src);
        while (!bfs.empty() && parent[snk] == N) {
            const std::size_t u = bfs.front();
            bfs.pop();
            for (std::size_t v = 0; v < N; ++v) {
                if (parent[v] == N && cap[u][v] > 0.0) {
                    parent[v] = u;
                    bfs.push(v);
                }
            }
        }
        if (parent[snk] == N) break;
        double push = inf;
        for (std::size_t v = snk; v != src; v = parent[v]) push = std::min(push, cap[parent[v]][v]);
        for (std::size_t v = snk; v != src; v = parent[v]) {
            cap[parent[v]][v] -= push;
            cap[v][parent[v]] += push;
        }
        flow += push;
    }
    return flow;
}

} // namespace detail

/// Exact Levy-Prokhorov distance between two weighted finite atom sets.
/// dist is row-major |A| x |B|. eps is feasible iff a sub-coupling of mass
/// >= 1 - eps lives on {dist <= eps}; over each distance level the least
/// feasible eps is max(level, 1 - maxflow), and the level search is a
/// binary search because the deficit is non-increasing.
inline double lp_distance_finite(const std::vector<double>& wa, const std::vector<double>& wb, const std::vector<double>& dist)
{
    if (dist.size() != wa.size() * wb.size()) throw std::invalid_argument("lp_distance_finite: distance matrix has wrong size");
    std::vector<double> levels{0.0};
    for (double v : dist) {
        if (v < 0.0) throw std::invalid_argument("lp_distance_finite: negative distance");
        if (v < 1.0) levels.push_back(v);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    auto deficit = [&](std::size_t i) {
        const double forward = 1.0 - detail::bipartite_max_flow(wa, wb, dist, levels[i]);
        std::vector<double> tr(dist.size());
        for (std::size_t a = 0; a < wa.size(); ++a)
            for (std::size_t b = 0; b < wb.size(); ++b) tr[b * wa.size() + a] = dist[a * wb.size() + b];
        const double backward = 1.0 - detail::bipartite_max_flow(wb, wa, tr, levels[i]);
        const double d = std::max({forward, backward, 0.0});
        // weights like 1/7 do not sum to 1 exactly; rounding-level deficits are zero
        return d < 1e-12 ? 0.0 : d;
    };

    // first level index with levels[i] >= deficit(i)
    std::size_t lo = 0, hi = levels.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (levels[mid] >= deficit(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    double best = 1.0;
    if (lo < levels.size()) best = std::min(best, levels[lo]);
    if (lo > 0) best = std::min(best, deficit(lo - 1));
    return best;
}

inline double lp_distance_finite(const AtomSet& a, const AtomSet& b)
{
    return lp_distance_finite(a.weights, b.weights, distance_matrix(a, b));
}

struct DPResult {
    double value = 0.0;
    double remainder = 0.0; // 2^{-j_max}, the dropped tail bound
    std::vector<double> terms;
};

/// sum_{j=1}^{j_max} min(2^{-j}, d_j^P(marginals on V_j)).
inline DPResult dP_truncated(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int j_max)
{
    if (j_max < 1) throw std::invalid_argument("dP_truncated: j_max must be at least 1");
    if (a.spec.d != b.spec.d) throw std::invalid_argument("dP_truncated: dimension mismatch");
    DPResult r;
    for (int j = 1; j <= j_max; ++j) {
        const double cap = std::ldexp(1.0, -j);
        const double dj = lp_distance_finite(project_marginal(a, j), project_marginal(b, j));
        r.terms.push_back(std::min(cap, dj));
    }
    r.value = pairwise_sum(r.terms);
    r.remainder = std::ldexp(1.0, -j_max);
    return r;
}

struct AcThresholds {
    double c = 1.0;
    double rho = 2.0;
    double c_j = 1.0;
    double T = 1.0;
    int m0 = 1;
    int m_max = 1;

    void validate() const
    {
        if (!(c > 0.0)) throw std::invalid_argument("AcThresholds: c must be positive");
        if (!(rho > 1.0)) throw std::invalid_argument("AcThresholds: rho must exceed 1");
        if (m0 < 0 || m_max < m0) throw std::invalid_argument("AcThresholds: need 0 <= m0 <= m_max");
    }
};

struct AcRow {
    int m = 0;
    double second_moment = 0.0; // E[(sum_{k not in V_m} ||omega^{0,k}||)^2]
    double first_moment = 0.0;  // E[sum_{k not in V_m} ||omega^{0,k}||]
    /// Values of c that make each inequality tight (moment / unit threshold).
    double c_second = 0.0;
    double c_first = 0.0;
};

struct AcReport {
    double noise_moment = 0.0; // E ||X^0||_T^2
    std::vector<AcRow> rows;
    double smallest_c = 0.0;
    bool member = false; // smallest_c <= thr.c
};

/// Evaluates the three A_c expectations under a double-layer empirical
/// measure and the least c for which all of them hold.
inline AcReport ac_membership(const EmpiricalMeasure& mu, const AcThresholds& thr)
{
    thr.validate();
    if (!mu.has_connections()) throw std::invalid_argument("ac_membership: needs a double-layer measure");
    AcReport rep;
    const auto sites = cube_iter(mu.spec);
    const double w = mu.atom_weight();
    std::vector<double> sq;
    for (const auto& p : mu.paths) {
        const double s = running_sup(p).back();
        sq.push_back(w * s * s);
    }
    rep.noise_moment = pairwise_sum(sq);
    rep.smallest_c = rep.noise_moment;

    const std::size_t v = mu.spec.volume();
    for (int m = thr.m0; m <= thr.m_max; ++m) {
        const double vm = std::pow(2.0 * m + 1.0, mu.spec.d);
        std::vector<double> first, second;
        for (std::size_t j = 0; j < v; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < v; ++k)
                if (sites[k].sup_norm() > m) s += mu.space.norm(mu.conns[j * v + k]);
            first.push_back(w * s);
            second.push_back(w * s * s);
        }
        AcRow row;
        row.m = m;
        row.first_moment = pairwise_sum(first);
        row.second_moment = pairwise_sum(second);
        // moment / (e^{-a|V_m|} |V_m|^{-b}) computed in log form
        auto scaled = [&](double moment, double rate, double power) {
            if (moment == 0.0) return 0.0;
            return std::exp(std::log(moment) + rate * thr.T * thr.c_j * vm + power * std::log(vm));
        };
        row.c_second = scaled(row.second_moment, 4.0 + 2.0 * thr.rho, 2.0 * thr.rho + 2.0);
        row.c_first = scaled(row.first_moment, 3.0 + thr.rho, thr.rho + 1.0);
        rep.smallest_c = std::max({rep.smallest_c, row.c_second, row.c_first});
        rep.rows.push_back(row);
    }
    rep.member = rep.smallest_c <= thr.c;
    return rep;
}

/// H_n = |V_n|^{-1} sum_l g(window of S^l U on V_q).
inline double path_average_Hn(const NetworkState& state, const std::function<double(const WindowAtom&)>& g, int q)
{
    const auto mu = empirical_measure(state);
    std::vector<double> vals;
    for (const auto& l : cube_iter(state.spec)) vals.push_back(g(window_atom(mu, l, q)));
    return pairwise_sum(vals) / static_cast<double>(vals.size());
}

} // namespace latnet

#endif // LATNET_MEASURE_HPP
