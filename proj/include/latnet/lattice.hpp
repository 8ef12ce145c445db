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

#ifndef LATNET_LATTICE_HPP
#define LATNET_LATTICE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace latnet {

/// Integer point of Z^d. Used both for particle sites and for offsets
/// between particles.
class LatticeVec {
public:
    LatticeVec() = default;
    explicit LatticeVec(int dim) : coords_(static_cast<std::size_t>(dim), 0) {}
    LatticeVec(std::initializer_list<int> c) : coords_(c) {}
    explicit LatticeVec(std::vector<int> c) : coords_(std::move(c)) {}

    int dim() const { return static_cast<int>(coords_.size()); }
    int operator[](int p) const { return coords_[static_cast<std::size_t>(p)]; }
    int& operator[](int p) { return coords_[static_cast<std::size_t>(p)]; }
    std::span<const int> coords() const { return coords_; }

    /// Sup norm ||j||_inf.
    int sup_norm() const
    {
        int r = 0;
        for (int c : coords_) r = std::max(r, std::abs(c));
        return r;
    }

    LatticeVec operator-() const
    {
        LatticeVec r(*this);
        for (int& c : r.coords_) c = -c;
        return r;
    }

    friend LatticeVec operator+(const LatticeVec& a, const LatticeVec& b)
    {
        check_same_dim(a, b);
        LatticeVec r(a);
        for (std::size_t p = 0; p < r.coords_.size(); ++p) r.coords_[p] += b.coords_[p];
        return r;
    }
    friend LatticeVec operator-(const LatticeVec& a, const LatticeVec& b) { return a + (-b); }

    friend bool operator==(const LatticeVec&, const LatticeVec&) = default;
    friend auto operator<=>(const LatticeVec&, const LatticeVec&) = default;

    std::string str() const
    {
        std::string s = "(";
        for (std::size_t p = 0; p < coords_.size(); ++p) {
            if (p) s += ' ';
            s += std::to_string(coords_[p]);
        }
        return s + ")";
    }

    friend std::ostream& operator<<(std::ostream& os, const LatticeVec& v) { return os << v.str(); }

private:
    static void check_same_dim(const LatticeVec& a, const LatticeVec& b)
    {
        if (a.dim() != b.dim())
            throw std::invalid_argument("LatticeVec: dimension mismatch");
    }

    std::vector<int> coords_;
};

/// The cube V_n = {-n..n}^d with coordinatewise mod-(2n+1) arithmetic.
struct TorusSpec {
    int d = 1;
    int n = 0;

    TorusSpec() = default;
    TorusSpec(int dim, int radius) : d(dim), n(radius) { validate(); }

    void validate() const
    {
        if (d < 1) throw std::invalid_argument("TorusSpec: dimension must be positive");
        if (n < 0) throw std::invalid_argument("TorusSpec: radius must be non-negative");
    }

    int side() const { return 2 * n + 1; }

    /// |V_n| = (2n+1)^d.
    std::size_t volume() const
    {
        std::size_t v = 1;
        for (int p = 0; p < d; ++p) v *= static_cast<std::size_t>(side());
        return v;
    }

    bool contains(const LatticeVec& j) const { return j.dim() == d && j.sup_norm() <= n; }

    /// Lexicographic position of j in V_n (first coordinate most significant).
    /// j must already lie in V_n.
    std::size_t index_of(const LatticeVec& j) const
    {
        std::size_t idx = 0;
        for (int p = 0; p < d; ++p) idx = idx * static_cast<std::size_t>(side()) + static_cast<std::size_t>(j[p] + n);
        return idx;
    }

    LatticeVec vec_of(std::size_t idx) const
    {
        LatticeVec j(d);
        for (int p = d - 1; p >= 0; --p) {
            j[p] = static_cast<int>(idx % static_cast<std::size_t>(side())) - n;
            idx /= static_cast<std::size_t>(side());
        }
        return j;
    }

    friend bool operator==(const TorusSpec&, const TorusSpec&) = default;
};

/// Canonical representative of j in V_n (each coordinate in [-n, n]).
inline LatticeVec mod_torus(const LatticeVec& j, const TorusSpec& spec)
{
    if (j.dim() != spec.d) throw std::invalid_argument("mod_torus: dimension mismatch");
    const int s = spec.side();
    LatticeVec r(spec.d);
    for (int p = 0; p < spec.d; ++p) {
        int v = (j[p] + spec.n) % s;
        if (v < 0) v += s;
        r[p] = v - spec.n;
    }
    return r;
}

/// Flat index of (j mod V_n).
inline std::size_t torus_index(const LatticeVec& j, const TorusSpec& spec) { return spec.index_of(mod_torus(j, spec)); }

/// All points of V_n in lexicographic order.
inline std::vector<LatticeVec> cube_iter(const TorusSpec& spec)
{
    std::vector<LatticeVec> out;
    out.reserve(spec.volume());
    for (std::size_t i = 0; i < spec.volume(); ++i) out.push_back(spec.vec_of(i));
    return out;
}

/// Points of the cube of radius r in Z^d (not reduced mod anything).
inline std::vector<LatticeVec> cube_points(int d, int r) { return cube_iter(TorusSpec(d, r)); }

/// Table nbr[j][k] = index of (j + k) mod V_n, for flat site j and flat
/// offset k (both in V_n).
inline std::vector<std::vector<std::size_t>> neighbour_table(const TorusSpec& spec)
{
    const auto pts = cube_iter(spec);
    std::vector<std::vector<std::size_t>> nbr(pts.size(), std::vector<std::size_t>(pts.size()));
    for (std::size_t j = 0; j < pts.size(); ++j)
        for (std::size_t k = 0; k < pts.size(); ++k) nbr[j][k] = torus_index(pts[j] + pts[k], spec);
    return nbr;
}

/// (S^k X)^m = X^{m+k} on the V_n-periodic interpolant of a configuration
/// stored in lexicographic site order.
template <class T>
std::vector<T> shift_config(std::span<const T> x, const LatticeVec& k, const TorusSpec& spec)
{
    if (x.size() != spec.volume()) throw std::invalid_argument("shift_config: configuration size does not match torus");
    std::vector<T> out;
    out.reserve(x.size());
    for (std::size_t m = 0; m < x.size(); ++m) out.push_back(x[torus_index(spec.vec_of(m) + k, spec)]);
    return out;
}

template <class T>
std::vector<T> shift_config(const std::vector<T>& x, const LatticeVec& k, const TorusSpec& spec)
{
    return shift_config(std::span<const T>(x), k, spec);
}

} // namespace latnet

#endif // LATNET_LATTICE_HPP
