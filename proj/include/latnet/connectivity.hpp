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

#ifndef LATNET_CONNECTIVITY_HPP
#define LATNET_CONNECTIVITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lattice.hpp"
#include "numeric.hpp"
#include "rng.hpp"

namespace latnet {

/// Finite metric space of connection values with a distinguished null
/// element (no connection).
struct ConnSpace {
    std::vector<double> values;
    int null_index = 0;
    std::vector<double> metric; // row-major size() x size()

    static ConnSpace binary(double j_bar)
    {
        ConnSpace c;
        c.values = {0.0, 1.0};
        c.null_index = 0;
        c.metric = {0.0, j_bar, j_bar, 0.0};
        return c;
    }

    int size() const { return static_cast<int>(values.size()); }
    double dist(int a, int b) const { return metric[static_cast<std::size_t>(a * size() + b)]; }
    /// ||x|| = d(null, x)
    double norm(int a) const { return dist(null_index, a); }
    bool is_null(int a) const { return a == null_index; }

    /// C_J = max ||x||.
    double c_j() const
    {
        double r = 0.0;
        for (int a = 0; a < size(); ++a) r = std::max(r, norm(a));
        return r;
    }

    void validate() const
    {
        const int s = size();
        if (s < 1) throw std::invalid_argument("ConnSpace: empty");
        if (null_index < 0 || null_index >= s) throw std::invalid_argument("ConnSpace: null index out of range");
        if (metric.size() != static_cast<std::size_t>(s * s)) throw std::invalid_argument("ConnSpace: metric has wrong size");
        for (int a = 0; a < s; ++a) {
            if (dist(a, a) != 0.0) throw std::invalid_argument("ConnSpace: metric diagonal must be zero");
            for (int b = 0; b < s; ++b) {
                if (dist(a, b) < 0.0) throw std::invalid_argument("ConnSpace: negative distance");
                if (dist(a, b) != dist(b, a)) throw std::invalid_argument("ConnSpace: metric not symmetric");
                for (int c = 0; c < s; ++c)
                    if (dist(a, c) > dist(a, b) + dist(b, c) + 1e-12)
                        throw std::invalid_argument("ConnSpace: triangle inequality fails");
            }
        }
    }
};

/// One stored (non-null) connection of a row: offset is the flat index of
/// k in V_n, value the element index in the ConnSpace.
struct Edge {
    std::uint32_t offset = 0;
    std::uint32_t value = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Sparse J^{n,j,k}: rows indexed by site j in V_n, entries by offsets k in
/// V_n. Absent entries (and every k outside V_n) are the null connection.
class ConnectionField {
public:
    ConnectionField() = default;
    ConnectionField(TorusSpec spec, int null_index = 0)
        : spec_(spec), null_index_(null_index), rows_(spec.volume())
    {
    }

    const TorusSpec& spec() const { return spec_; }
    int null_index() const { return null_index_; }
    std::size_t sites() const { return rows_.size(); }
    const std::vector<Edge>& row(std::size_t j) const { return rows_[j]; }

    int get(std::size_t j, std::size_t k) const
    {
        const auto& r = rows_[j];
        auto it = std::lower_bound(r.begin(), r.end(), k, [](const Edge& e, std::size_t key) { return e.offset < key; });
        if (it != r.end() && it->offset == k) return static_cast<int>(it->value);
        return null_index_;
    }

    int get(const LatticeVec& j, const LatticeVec& k) const
    {
        if (!spec_.contains(k)) return null_index_;
        return get(torus_index(j, spec_), spec_.index_of(k));
    }

    void set(std::size_t j, std::size_t k, int value)
    {
        auto& r = rows_[j];
        auto it = std::lower_bound(r.begin(), r.end(), k, [](const Edge& e, std::size_t key) { return e.offset < key; });
        const bool present = it != r.end() && it->offset == k;
        if (value == null_index_) {
            if (present) r.erase(it);
            return;
        }
        if (present)
            it->value = static_cast<std::uint32_t>(value);
        else
            r.insert(it, Edge{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(value)});
    }

    std::size_t edge_count() const
    {
        std::size_t c = 0;
        for (const auto& r : rows_) c += r.size();
        return c;
    }

    /// Rotation of the whole field: row m of the result is row (m + s) mod V_n.
    ConnectionField shifted(const LatticeVec& s) const
    {
        ConnectionField out(spec_, null_index_);
        for (std::size_t m = 0; m < rows_.size(); ++m) out.rows_[m] = rows_[torus_index(spec_.vec_of(m) + s, spec_)];
        return out;
    }

    /// Dense bond vector, bond id = j * |V_n| + k.
    std::vector<int> dense() const
    {
        const std::size_t v = spec_.volume();
        std::vector<int> out(v * v, null_index_);
        for (std::size_t j = 0; j < v; ++j)
            for (const auto& e : rows_[j]) out[j * v + e.offset] = static_cast<int>(e.value);
        return out;
    }

    static ConnectionField from_dense(const TorusSpec& spec, const std::vector<int>& bonds, int null_index = 0)
    {
        const std::size_t v = spec.volume();
        if (bonds.size() != v * v) throw std::invalid_argument("ConnectionField::from_dense: wrong bond count");
        ConnectionField f(spec, null_index);
        for (std::size_t j = 0; j < v; ++j)
            for (std::size_t k = 0; k < v; ++k)
                if (bonds[j * v + k] != null_index)
                    f.rows_[j].push_back(Edge{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(bonds[j * v + k])});
        return f;
    }

    friend bool operator==(const ConnectionField&, const ConnectionField&) = default;

private:
    TorusSpec spec_;
    int null_index_ = 0;
    std::vector<std::vector<Edge>> rows_;
};

/// A bond (j, k) of Z^d x Z^d: particle site j and connection offset k.
struct Bond {
    LatticeVec site;
    LatticeVec offset;
    friend bool operator==(const Bond&, const Bond&) = default;
    friend auto operator<=>(const Bond&, const Bond&) = default;
};

/// Finite-range potential given as a lookup table over the assignments of
/// its shape. Table index = sum_i a_i |C|^i with a_i the element index at
/// shape[i].
struct Potential {
    std::vector<Bond> shape;
    std::vector<double> table;

    double sup_abs() const
    {
        double r = 0.0;
        for (double v : table) r = std::max(r, std::abs(v));
        return r;
    }

    /// Distinct particle sites touched by the shape, i.e. |A|_*.
    std::vector<LatticeVec> distinct_sites() const
    {
        std::set<LatticeVec> s;
        for (const auto& b : shape) s.insert(b.site);
        return {s.begin(), s.end()};
    }
};

/// Range of a bond set: smallest p with the set contained in V_p x V_p.
inline int bond_range(const std::vector<Bond>& bonds)
{
    int r = 0;
    for (const auto& b : bonds) r = std::max({r, b.site.sup_norm(), b.offset.sup_norm()});
    return r;
}

/// Gibbs specification of the connections: base measure mu0 (independent
/// bonds, super-exponentially rare beyond range m0) tilted by potentials.
struct GibbsModel {
    ConnSpace space = ConnSpace::binary(1.0);
    std::vector<Potential> potentials;
    double upsilon = 1.0;
    double gamma = 1.5;
    int m0 = 1;
    double p_near = 0.5;

    void validate(int d) const
    {
        space.validate();
        if (!(upsilon > 0.0)) throw std::invalid_argument("GibbsModel: upsilon must be positive");
        if (!(gamma > 0.0)) throw std::invalid_argument("GibbsModel: gamma must be positive");
        if (m0 < 1) throw std::invalid_argument("GibbsModel: m0 must be at least 1");
        if (!(p_near >= 0.0 && p_near <= 1.0)) throw std::invalid_argument("GibbsModel: p_near must lie in [0, 1]");
        const auto cs = static_cast<std::size_t>(space.size());
        for (const auto& p : potentials) {
            if (p.shape.empty()) throw std::invalid_argument("GibbsModel: potential with empty shape");
            bool origin = false;
            for (const auto& b : p.shape) {
                if (b.site.dim() != d || b.offset.dim() != d)
                    throw std::invalid_argument("GibbsModel: potential shape has wrong dimension");
                if (b.site.sup_norm() == 0) origin = true;
            }
            if (!origin) throw std::invalid_argument("GibbsModel: every shape must contain a bond at site 0");
            std::size_t expect = 1;
            for (std::size_t i = 0; i < p.shape.size(); ++i) expect *= cs;
            if (p.table.size() != expect) throw std::invalid_argument("GibbsModel: potential table has wrong size");
        }
    }
};

/// log mu0(omega^{j,k} != null). For ||k||_inf >= m0 this is
/// -upsilon exp(|V_{||k||}|^gamma), kept in log form because the
/// probability underflows already at moderate ranges.
inline double log_connect_prob(const LatticeVec& k, const GibbsModel& model)
{
    const int r = k.sup_norm();
    if (r < model.m0) return std::log(model.p_near);
    const double vol = std::pow(2.0 * r + 1.0, k.dim());
    return -model.upsilon * std::exp(std::pow(vol, model.gamma));
}

/// mu0(omega^{j,k} != null).
inline double null_prob(const LatticeVec& k, const GibbsModel& model) { return std::exp(log_connect_prob(k, model)); }

/// log mu0(omega = a) at offset k. Non-null mass is split evenly between
/// the non-null elements.
inline double log_base_prob(int a, const LatticeVec& k, const GibbsModel& model)
{
    const double lp = log_connect_prob(k, model);
    if (model.space.is_null(a)) {
        const double p = std::exp(lp);
        return p >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-p);
    }
    return lp - std::log(static_cast<double>(model.space.size() - 1));
}

/// Draw one bond value from mu0 given a uniform pair.
inline int draw_base_value(double u_connect, double u_value, const LatticeVec& k, const GibbsModel& model)
{
    const int cs = model.space.size();
    if (cs < 2 || !(u_connect < null_prob(k, model))) return model.space.null_index;
    int pick = std::min(cs - 2, static_cast<int>(u_value * (cs - 1)));
    if (pick >= model.space.null_index) ++pick;
    return pick;
}

/// Independent mu0 sample of J^{n,j,k} for j, k in V_n.
inline ConnectionField sample_base_field(const TorusSpec& spec, const GibbsModel& model, std::uint64_t seed)
{
    const CounterRng rng(seed);
    const auto pts = cube_iter(spec);
    ConnectionField f(spec, model.space.null_index);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const auto [u1, u2] = rng.uniform2(Stream::connections, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k), 0);
            f.set(j, k, draw_base_value(u1, u2, pts[k], model));
        }
    }
    return f;
}

/// Expected number of non-null entries in one row under mu0.
inline double expected_row_degree(const TorusSpec& spec, const GibbsModel& model)
{
    double s = 0.0;
    for (const auto& k : cube_iter(spec)) s += null_prob(k, model);
    return s;
}

/// epsilon_p: sum of sup|Phi_A| over the sets A (translates of the listed
/// shapes that contain a bond at site 0) not contained in V_p x V_p.
inline double phi_tail_epsilon(const GibbsModel& model, int p)
{
    double eps = 0.0;
    for (const auto& pot : model.potentials) {
        for (const auto& s : pot.distinct_sites()) {
            std::vector<Bond> translated;
            translated.reserve(pot.shape.size());
            for (const auto& b : pot.shape) translated.push_back({b.site - s, b.offset});
            if (bond_range(translated) > p) eps += pot.sup_abs();
        }
    }
    return eps;
}

/// Energy bookkeeping of the potentials on the torus V_n with truncation
/// zeta(m): bonds with offsets outside V_m (or outside V_n) read as null.
class GibbsEnergy {
public:
    struct Term {
        std::size_t potential = 0;
        std::size_t translation = 0;     // flat site of the translation
        std::vector<long> bonds;         // bond id per shape entry, -1 if truncated
        std::vector<std::size_t> raw;    // bond id ignoring truncation, or npos
    };

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    GibbsEnergy(const TorusSpec& spec, const GibbsModel& model, int m)
        : spec_(spec), model_(&model), m_(m)
    {
        const auto pts = cube_iter(spec);
        const std::size_t v = pts.size();
        touching_.resize(v * v);
        for (std::size_t pi = 0; pi < model.potentials.size(); ++pi) {
            const auto& pot = model.potentials[pi];
            for (std::size_t t = 0; t < v; ++t) {
                Term term;
                term.potential = pi;
                term.translation = t;
                for (const auto& b : pot.shape) {
                    const std::size_t site = torus_index(b.site + pts[t], spec);
                    if (!spec.contains(b.offset)) {
                        term.bonds.push_back(-1);
                        term.raw.push_back(npos);
                        continue;
                    }
                    const std::size_t id = site * v + spec.index_of(b.offset);
                    term.raw.push_back(id);
                    term.bonds.push_back(b.offset.sup_norm() > m ? -1 : static_cast<long>(id));
                }
                const std::size_t ti = terms_.size();
                std::set<long> seen;
                for (long id : term.bonds)
                    if (id >= 0 && seen.insert(id).second) touching_[static_cast<std::size_t>(id)].push_back(ti);
                terms_.push_back(std::move(term));
            }
        }
    }

    const std::vector<Term>& terms() const { return terms_; }
    std::size_t bond_count() const { return touching_.size(); }
    int truncation() const { return m_; }

    double term_energy(const Term& term, const std::vector<int>& bonds) const
    {
        const auto& pot = model_->potentials[term.potential];
        const auto cs = static_cast<std::size_t>(model_->space.size());
        const int null = model_->space.null_index;
        std::size_t idx = 0, mul = 1;
        for (long id : term.bonds) {
            const int a = id < 0 ? null : bonds[static_cast<std::size_t>(id)];
            idx += static_cast<std::size_t>(a) * mul;
            mul *= cs;
        }
        return pot.table[idx];
    }

    double total(const std::vector<int>& bonds) const
    {
        std::vector<double> e;
        e.reserve(terms_.size());
        for (const auto& t : terms_) e.push_back(term_energy(t, bonds));
        return pairwise_sum(e);
    }

    /// Sum of the terms that read bond `id`.
    double local(const std::vector<int>& bonds, std::size_t id) const
    {
        double s = 0.0;
        for (std::size_t ti : touching_[id]) s += term_energy(terms_[ti], bonds);
        return s;
    }

private:
    TorusSpec spec_;
    const GibbsModel* model_;
    int m_;
    std::vector<Term> terms_;
    std::vector<std::vector<std::size_t>> touching_;
};

/// Sum over translated shapes meeting B of Phi(zeta(m)), B given as flat
/// (site, offset) pairs of V_n x V_n.
inline double gibbs_conditional_energy(const ConnectionField& field, const std::vector<std::pair<std::size_t, std::size_t>>& B,
                                       const GibbsModel& model, int m)
{
    const GibbsEnergy energy(field.spec(), model, m);
    const std::size_t v = field.spec().volume();
    std::set<std::size_t> ids;
    for (const auto& [j, k] : B) ids.insert(j * v + k);
    const auto bonds = field.dense();
    double s = 0.0;
    for (const auto& term : energy.terms()) {
        bool meets = false;
        for (std::size_t id : term.raw)
            if (id != GibbsEnergy::npos && ids.count(id)) meets = true;
        if (meets) s += energy.term_energy(term, bonds);
    }
    return s;
}

/// Single-site Metropolis chain targeting mu0 tilted by exp(-energy) on the
/// torus. Proposals are fresh mu0 draws at the visited bond, so the
/// acceptance ratio reduces to exp(-Delta energy). Bonds are visited in
/// fixed lexicographic order each sweep.
class MetropolisChain {
public:
    MetropolisChain(const TorusSpec& spec, const GibbsModel& model, int m, std::uint64_t seed)
        : spec_(spec), model_(&model), energy_(spec, model, m), rng_(seed), offsets_(cube_iter(spec))
    {
        model.validate(spec.d);
        bonds_ = sample_base_field(spec, model, seed).dense();
    }

    void sweep()
    {
        const std::size_t v = spec_.volume();
        for (std::size_t id = 0; id < bonds_.size(); ++id) {
            const auto [u1, u2] = rng_.uniform2(Stream::metropolis, sweeps_, static_cast<std::uint32_t>(id), 0);
            const auto [u3, unused] = rng_.uniform2(Stream::metropolis, sweeps_, static_cast<std::uint32_t>(id), 1);
            (void)unused;
            const int proposal = draw_base_value(u1, u2, offsets_[id % v], *model_);
            const int current = bonds_[id];
            if (proposal == current) continue;
            const double before = energy_.local(bonds_, id);
            bonds_[id] = proposal;
            const double delta = energy_.local(bonds_, id) - before;
            if (delta > 0.0 && !(u3 < std::exp(-delta))) {
                bonds_[id] = current;
            } else {
                ++accepted_;
            }
        }
        ++sweeps_;
    }

    const std::vector<int>& bonds() const { return bonds_; }
    ConnectionField field() const { return ConnectionField::from_dense(spec_, bonds_, model_->space.null_index); }
    std::uint32_t sweeps_done() const { return sweeps_; }
    std::uint64_t accepted() const { return accepted_; }

private:
    TorusSpec spec_;
    const GibbsModel* model_;
    GibbsEnergy energy_;
    CounterRng rng_;
    std::vector<LatticeVec> offsets_;
    std::vector<int> bonds_;
    std::uint32_t sweeps_ = 0;
    std::uint64_t accepted_ = 0;
};

inline ConnectionField metropolis_sample(const TorusSpec& spec, const GibbsModel& model, int m, int sweeps, std::uint64_t seed)
{
    if (sweeps < 1) throw std::invalid_argument("metropolis_sample: sweeps must be at least 1");
    MetropolisChain chain(spec, model, m, seed);
    for (int s = 0; s < sweeps; ++s) chain.sweep();
    return chain.field();
}

class StateSpaceTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact law of all bonds of V_n x V_n. Configuration index is
/// sum_b a_b |C|^b with bond id b = j |V_n| + k.
struct ExactDistribution {
    TorusSpec spec;
    int space_size = 2;
    std::size_t bonds = 0;
    std::vector<double> probs;
    /// log sum_omega mu0(omega) exp(-energy(omega))
    double log_z = 0.0;

    std::vector<int> decode(std::size_t state) const
    {
        std::vector<int> a(bonds);
        for (std::size_t b = 0; b < bonds; ++b) {
            a[b] = static_cast<int>(state % static_cast<std::size_t>(space_size));
            state /= static_cast<std::size_t>(space_size);
        }
        return a;
    }

    std::size_t encode(const std::vector<int>& a) const
    {
        std::size_t s = 0;
        for (std::size_t b = bonds; b-- > 0;) s = s * static_cast<std::size_t>(space_size) + static_cast<std::size_t>(a[b]);
        return s;
    }

    /// Marginal law of one bond.
    std::vector<double> marginal(std::size_t bond) const
    {
        std::vector<double> out(static_cast<std::size_t>(space_size), 0.0);
        for (std::size_t s = 0; s < probs.size(); ++s) {
            std::size_t x = s;
            for (std::size_t b = 0; b < bond; ++b) x /= static_cast<std::size_t>(space_size);
            out[x % static_cast<std::size_t>(space_size)] += probs[s];
        }
        return out;
    }
};

inline constexpr std::size_t kMaxEnumerableStates = std::size_t{1} << 20;

inline ExactDistribution enumerate_exact(const TorusSpec& spec, const GibbsModel& model, int m)
{
    model.validate(spec.d);
    const std::size_t v = spec.volume();
    const std::size_t nb = v * v;
    const auto cs = static_cast<std::size_t>(model.space.size());
    std::size_t states = 1;
    for (std::size_t b = 0; b < nb; ++b) {
        if (states > kMaxEnumerableStates / cs) throw StateSpaceTooLarge("enumerate_exact: more than 2^20 configurations");
        states *= cs;
    }

    const GibbsEnergy energy(spec, model, m);
    const auto offsets = cube_iter(spec);
    // log mu0 per bond and value
    std::vector<double> logbase(nb * cs);
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t a = 0; a < cs; ++a) logbase[b * cs + a] = log_base_prob(static_cast<int>(a), offsets[b % v], model);

    ExactDistribution dist;
    dist.spec = spec;
    dist.space_size = static_cast<int>(cs);
    dist.bonds = nb;
    std::vector<double> logw(states);
    for (std::size_t s = 0; s < states; ++s) {
        const auto a = dist.decode(s);
        double lw = 0.0;
        for (std::size_t b = 0; b < nb; ++b) lw += logbase[b * cs + static_cast<std::size_t>(a[b])];
        logw[s] = lw - energy.total(a);
    }
    dist.log_z = log_sum_exp(logw);
    dist.probs.resize(states);
    for (std::size_t s = 0; s < states; ++s) dist.probs[s] = std::exp(logw[s] - dist.log_z);
    return dist;
}

/// Applies the single-bond Metropolis kernel of MetropolisChain at bond
/// `id` to an exact distribution.
inline std::vector<double> metropolis_kernel_exact(const ExactDistribution& dist, const GibbsModel& model, int m, std::size_t id)
{
    const GibbsEnergy energy(dist.spec, model, m);
    const auto offsets = cube_iter(dist.spec);
    const LatticeVec& k = offsets[id % dist.spec.volume()];
    const auto cs = static_cast<std::size_t>(dist.space_size);
    std::vector<double> proposal(cs);
    for (std::size_t a = 0; a < cs; ++a) proposal[a] = std::exp(log_base_prob(static_cast<int>(a), k, model));

    std::vector<double> out(dist.probs.size(), 0.0);
    for (std::size_t s = 0; s < dist.probs.size(); ++s) {
        if (dist.probs[s] == 0.0) continue;
        auto a = dist.decode(s);
        const int current = a[id];
        const double before = energy.local(a, id);
        double stay = 1.0;
        for (std::size_t v = 0; v < cs; ++v) {
            if (static_cast<int>(v) == current || proposal[v] == 0.0) continue;
            a[id] = static_cast<int>(v);
            const double delta = energy.local(a, id) - before;
            const double acc = delta > 0.0 ? std::exp(-delta) : 1.0;
            out[dist.encode(a)] += dist.probs[s] * proposal[v] * acc;
            stay -= proposal[v] * acc;
            a[id] = current;
        }
        out[s] += dist.probs[s] * stay;
    }
    return out;
}

} // namespace latnet

#endif // LATNET_CONNECTIVITY_HPP
