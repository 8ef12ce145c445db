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

#ifndef LATNET_HARNESS_HPP
#define LATNET_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "connectivity.hpp"
#include "dynamics.hpp"
#include "measure.hpp"
#include "numeric.hpp"
#include "rng.hpp"
#include "solver.hpp"

namespace latnet {

/// Named predicate "observable op threshold" on a replica summary.
struct EventDef {
    std::string name;
    std::string observable;
    std::string op = ">";
    double threshold = 0.0;

    bool eval(double x) const
    {
        if (op == ">") return x > threshold;
        if (op == ">=") return x >= threshold;
        if (op == "<") return x < threshold;
        if (op == "<=") return x <= threshold;
        throw std::invalid_argument("EventDef: unknown operator '" + op + "'");
    }
};

enum class ConnectivityMode { base, gibbs };

struct ExperimentConfig {
    int d = 1;
    std::vector<int> ns{2};
    NetworkParams params;
    GibbsModel model;
    ConnectivityMode mode = ConnectivityMode::base;
    int gibbs_sweeps = 50;
    int gibbs_truncation = -1; // -1: use n
    double dt = 1e-3;
    double T = 1.0;
    std::size_t replicas = 1;
    std::uint64_t seed = 1;
    std::vector<EventDef> events;
    /// A_c evaluation
    double rho = 2.0;
    int ac_m0 = 1;
    int ac_m_max = 1;
    unsigned threads = 0; // 0: hardware concurrency
    std::string config_hash;

    void validate() const
    {
        if (d < 1) throw std::invalid_argument("ExperimentConfig: d must be positive");
        if (ns.empty()) throw std::invalid_argument("ExperimentConfig: empty n sweep");
        for (int n : ns)
            if (n < 0) throw std::invalid_argument("ExperimentConfig: n must be non-negative");
        if (replicas < 1) throw std::invalid_argument("ExperimentConfig: replica count must be at least 1");
        params.validate();
        model.validate(d);
        grid_steps(T, dt);
        static const std::vector<std::string> known = observable_names();
        for (const auto& e : events) {
            if (std::find(known.begin(), known.end(), e.observable) == known.end())
                throw std::invalid_argument("ExperimentConfig: event '" + e.name + "' references unknown observable '" + e.observable + "'");
            e.eval(0.0);
        }
    }

    /// Bounded network averages H_n recorded for every replica.
    static std::vector<std::string> observable_names() { return {"H_final", "H_mean", "H_sup"}; }
};

/// The bounded functionals behind the observables, evaluated on the V_0
/// window (the particle at the origin of the shifted configuration).
inline double observable_g(const std::string& name, const WindowAtom& w)
{
    const auto& p = w.paths.front();
    if (name == "H_final") return std::tanh(p.back());
    if (name == "H_mean") {
        if (p.size() < 2) return std::tanh(p.front());
        // trapezoid time average
        std::vector<double> mid(p.size() - 1);
        for (std::size_t i = 0; i + 1 < p.size(); ++i) mid[i] = 0.5 * (p[i] + p[i + 1]);
        return std::tanh(pairwise_sum(mid) / static_cast<double>(mid.size()));
    }
    if (name == "H_sup") return std::tanh(running_sup(p).back());
    throw std::invalid_argument("observable_g: unknown observable '" + name + "'");
}

struct ReplicaSummary {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    int n = 0;
    bool blew_up = false;
    std::string failure;
    std::map<std::string, double> observables;
    std::map<std::string, bool> events;
    std::size_t edges = 0;
    double g_min = 0.0;
    double g_max = 0.0;
    double apriori_max_ratio = 0.0;
    double apriori_min_slack = 0.0;
    AcReport ac;
};

struct RunManifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    int n = 0;
    std::vector<ReplicaSummary> replicas;
};

/// Seed of replica r at radius n, derived from the master seed so that any
/// replica can be re-run alone.
inline std::uint64_t replica_seed(std::uint64_t master, int n, std::size_t r)
{
    return CounterRng(master).derive(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(r));
}

inline ConnectionField sample_connections(const ExperimentConfig& cfg, const TorusSpec& spec, std::uint64_t seed)
{
    if (cfg.mode == ConnectivityMode::base) return sample_base_field(spec, cfg.model, seed);
    const int m = cfg.gibbs_truncation < 0 ? spec.n : std::min(cfg.gibbs_truncation, spec.n);
    return metropolis_sample(spec, cfg.model, m, cfg.gibbs_sweeps, seed);
}

/// One replica: sample noise and connections, integrate, summarise.
inline ReplicaSummary run_single(const ExperimentConfig& cfg, int n, std::size_t r)
{
    const TorusSpec spec(cfg.d, n);
    ReplicaSummary s;
    s.index = r;
    s.n = n;
    s.seed = replica_seed(cfg.seed, n, r);
    const auto noise = sample_noise(spec, cfg.dt, cfg.T, s.seed);
    const auto field = sample_connections(cfg, spec, s.seed);
    s.edges = field.edge_count();

    const auto dl = double_layer_measure(noise, field, cfg.params.space);
    AcThresholds thr;
    thr.rho = cfg.rho;
    thr.c_j = cfg.params.space.c_j();
    thr.T = cfg.T;
    thr.m0 = std::min(cfg.ac_m0, n);
    thr.m_max = std::min(std::max(cfg.ac_m_max, thr.m0), n);
    s.ac = ac_membership(dl, thr);

    try {
        const auto st = integrate_network(noise, field, cfg.params);
        const auto mu = empirical_measure(st);
        for (const auto& name : ExperimentConfig::observable_names()) {
            std::vector<double> vals;
            for (const auto& l : cube_iter(spec)) vals.push_back(observable_g(name, window_atom(mu, l, 0)));
            s.observables[name] = pairwise_sum(vals) / static_cast<double>(vals.size());
        }
        s.g_min = cfg.params.hebb.j_bar;
        s.g_max = 0.0;
        for (const auto& e : st.edges) {
            s.g_min = std::min(s.g_min, e.g_min);
            s.g_max = std::max(s.g_max, e.g_max);
        }
        if (st.edges.empty()) s.g_min = s.g_max = 0.0;
        const auto ap = apriori_bound_certificate(st, noise, field, cfg.params.space, drift_constants(cfg.params.fhn).affine);
        s.apriori_max_ratio = ap.max_ratio;
        s.apriori_min_slack = ap.min_relative_slack;
        for (const auto& e : cfg.events) s.events[e.name] = e.eval(s.observables.at(e.observable));
    } catch (const BlowUpError& err) {
        s.blew_up = true;
        s.failure = err.what();
        for (const auto& e : cfg.events) s.events[e.name] = false;
    }
    return s;
}

/// Runs every replica at radius n. Replicas are independent; results are
/// stored by index, so the manifest does not depend on scheduling.
inline RunManifest run_replicas(const ExperimentConfig& cfg, int n)
{
    cfg.validate();
    RunManifest man;
    man.config_hash = cfg.config_hash;
    man.seed = cfg.seed;
    man.n = n;
    man.replicas.resize(cfg.replicas);
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.replicas));
    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(threads);
    auto worker = [&](unsigned id) {
        try {
            for (std::size_t r = next++; r < cfg.replicas; r = next++) man.replicas[r] = run_single(cfg, n, r);
        } catch (const std::exception& e) {
            errors[id] = e.what();
        }
    };
    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("run_replicas: " + e);
    return man;
}

inline RunManifest run_replicas(const ExperimentConfig& cfg) { return run_replicas(cfg, cfg.ns.front()); }

struct LdpRow {
    int n = 0;
    std::size_t volume = 0;
    std::size_t trials = 0;
    std::size_t hits = 0;
    std::size_t blowups = 0;
    double p_hat = 0.0;
    Interval ci;
    /// -|V_n|^{-1} log p_hat; from the Wilson upper bound on zero hits.
    double normalized_log = 0.0;
    bool zero_hits = false;
};

/// Probability of `event` per n of the sweep with Wilson intervals.
/// Blown-up replicas count as trials without a hit.
inline std::vector<LdpRow> ldp_scan_counts(const std::vector<std::pair<int, std::pair<std::size_t, std::size_t>>>& counts,
                                           int d)
{
    std::vector<LdpRow> rows;
    for (const auto& [n, ht] : counts) {
        LdpRow row;
        row.n = n;
        row.volume = TorusSpec(d, n).volume();
        row.hits = ht.first;
        row.trials = ht.second;
        row.ci = wilson_interval(row.hits, row.trials);
        row.p_hat = row.trials ? static_cast<double>(row.hits) / static_cast<double>(row.trials) : 0.0;
        row.zero_hits = row.hits == 0;
        const double p = row.zero_hits ? row.ci.hi : row.p_hat;
        row.normalized_log = -std::log(p) / static_cast<double>(row.volume);
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<LdpRow> ldp_scan(const ExperimentConfig& cfg, const EventDef& event)
{
    std::vector<std::pair<int, std::pair<std::size_t, std::size_t>>> counts;
    std::vector<std::size_t> blowups;
    ExperimentConfig c = cfg;
    c.events = {event};
    for (int n : cfg.ns) {
        const auto man = run_replicas(c, n);
        std::size_t hits = 0, blown = 0;
        for (const auto& r : man.replicas) {
            if (r.blew_up) ++blown;
            if (r.events.at(event.name)) ++hits;
        }
        counts.push_back({n, {hits, man.replicas.size()}});
        blowups.push_back(blown);
    }
    auto rows = ldp_scan_counts(counts, cfg.d);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].blowups = blowups[i];
    return rows;
}

struct MgfEstimate {
    double estimate = 0.0; // |V_n|^{-1} log mean exp(X_r)
    Interval ci;
    bool overflow = false;
};

/// |V|^{-1} log of the sample mean of exp(x_r), with a normal-approximation
/// interval for the mean carried through the log.
inline MgfEstimate log_mean_exp_estimate(const std::vector<double>& x, double volume)
{
    MgfEstimate e;
    for (double v : x)
        if (!std::isfinite(v)) {
            e.overflow = true;
            e.estimate = std::numeric_limits<double>::infinity();
            e.ci = {e.estimate, e.estimate};
            return e;
        }
    const double R = static_cast<double>(x.size());
    e.estimate = (log_sum_exp(x) - std::log(R)) / volume;
    const double mx = *std::max_element(x.begin(), x.end());
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i] - mx);
    const auto mv = mean_var(y);
    const double se = std::sqrt(mv.var / R);
    const double lo = mv.mean - 1.959963984540054 * se;
    const double hi = mv.mean + 1.959963984540054 * se;
    e.ci.lo = lo > 0.0 ? (std::log(lo) + mx) / volume : -std::numeric_limits<double>::infinity();
    e.ci.hi = (std::log(hi) + mx) / volume;
    return e;
}

/// Estimate of |V_n|^{-1} log E exp(c1 sum_j ||W^j||_T^2) over noise replicas.
inline MgfEstimate mgf_noise_check(const std::vector<NoiseField>& replicas, double c1)
{
    if (replicas.empty()) throw std::invalid_argument("mgf_noise_check: no replicas");
    std::vector<double> x;
    for (const auto& nf : replicas) {
        std::vector<double> sq;
        for (const auto& p : nf.paths) {
            const double s = running_sup(p).back();
            sq.push_back(s * s);
        }
        x.push_back(c1 * pairwise_sum(sq));
    }
    return log_mean_exp_estimate(x, static_cast<double>(replicas.front().spec.volume()));
}

struct GrowthRow {
    int m = 0;
    MgfEstimate squared; // first display of the connection-growth bound
    MgfEstimate linear;  // second display
    /// Analytic |V_n|^{-1} log E for the linear statistic under independent
    /// bonds (exact under the base measure).
    double linear_analytic = 0.0;
};

struct GrowthReport {
    std::vector<GrowthRow> rows;
    double implied_a2 = 0.0; // max estimate over rows and both statistics
};

/// Monte-Carlo estimates of the two exponential moments of the tail
/// connection mass, per m. Statistics are formed in log space because the
/// prefactors overflow long before the tail mass becomes non-zero.
inline GrowthReport connection_growth_check(const std::vector<ConnectionField>& fields, const GibbsModel& model, int m_lo, int m_hi,
                                            double a1, double rho, double T)
{
    if (fields.empty()) throw std::invalid_argument("connection_growth_check: no replicas");
    const TorusSpec spec = fields.front().spec();
    const auto offsets = cube_iter(spec);
    const double cj = model.space.c_j();
    const double vol = static_cast<double>(spec.volume());
    GrowthReport rep;
    for (int m = m_lo; m <= m_hi; ++m) {
        const double vm = std::pow(2.0 * m + 1.0, spec.d);
        const double log_sq_pref = std::log(a1) + (2.0 * rho + 2.0) * std::log(vm) + (4.0 + 2.0 * rho) * T * cj * vm;
        const double log_lin_pref = std::log(a1) + (rho + 1.0) * std::log(vm) + (3.0 + rho) * T * cj * vm;
        std::vector<double> xs, xl;
        for (const auto& f : fields) {
            double sq = 0.0, lin = 0.0;
            for (std::size_t j = 0; j < f.sites(); ++j) {
                double s = 0.0;
                for (const auto& e : f.row(j))
                    if (offsets[e.offset].sup_norm() > m) s += model.space.norm(static_cast<int>(e.value));
                sq += s * s;
                lin += s;
            }
            xs.push_back(sq > 0.0 ? std::exp(log_sq_pref + std::log(sq)) : 0.0);
            xl.push_back(lin > 0.0 ? std::exp(log_lin_pref + std::log(lin)) : 0.0);
        }
        GrowthRow row;
        row.m = m;
        row.squared = log_mean_exp_estimate(xs, vol);
        row.linear = log_mean_exp_estimate(xl, vol);
        // per-site: sum_k log(1 - p_k + p_k e^{t ||x||}), non-null mass split evenly
        double analytic = 0.0;
        const double t = a1 > 0.0 ? std::exp(log_lin_pref) : 0.0;
        for (const auto& k : offsets) {
            if (k.sup_norm() <= m) continue;
            const double lp = log_connect_prob(k, model);
            const double nn = static_cast<double>(model.space.size() - 1);
            std::vector<double> terms;
            const double p = std::exp(lp);
            terms.push_back(p >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-p));
            for (int a = 0; a < model.space.size(); ++a)
                if (!model.space.is_null(a)) terms.push_back(lp - std::log(nn) + t * model.space.norm(a));
            analytic += log_sum_exp(terms);
        }
        row.linear_analytic = analytic;
        rep.implied_a2 = std::max({rep.implied_a2, row.squared.estimate, row.linear.estimate});
        rep.rows.push_back(row);
    }
    return rep;
}

/// sum p log(p / q); infinite when p charges a point q does not.
inline double relative_entropy_exact(const std::vector<double>& p, const std::vector<double>& q)
{
    if (p.size() != q.size()) throw std::invalid_argument("relative_entropy_exact: supports differ in size");
    std::vector<double> terms;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        terms.push_back(p[i] * std::log(p[i] / q[i]));
    }
    return std::max(0.0, pairwise_sum(terms));
}

/// The base measure mu0 on the bonds of V_n, enumerated.
inline ExactDistribution base_distribution(const TorusSpec& spec, const GibbsModel& model)
{
    GibbsModel free = model;
    free.potentials.clear();
    return enumerate_exact(spec, free, spec.n);
}

/// |V_n|^{-1} R(mu || mu0) on an enumerable torus.
inline double specific_relative_entropy(const ExactDistribution& mu, const GibbsModel& model)
{
    const auto base = base_distribution(mu.spec, model);
    return relative_entropy_exact(mu.probs, base.probs) / static_cast<double>(mu.spec.volume());
}

struct GammaEstimate {
    double energy_term = 0.0; // E^mu[sum_{A ni site 0} Phi_A(zeta) / |A|_*]
    double log_z_term = 0.0;  // |V_n|^{-1} log Z_m
    double value = 0.0;
};

/// Gamma_m(mu) on the torus V_n with mu given exactly; mu defaults to the
/// Gibbs law at truncation m.
inline GammaEstimate gamma_m_estimate(const GibbsModel& model, int m, const TorusSpec& spec, const ExactDistribution* mu = nullptr)
{
    const auto gibbs = enumerate_exact(spec, model, m);
    const ExactDistribution& law = mu ? *mu : gibbs;
    const GibbsEnergy energy(spec, model, m);

    // Terms whose translate contains a bond at site 0, weighted by 1/|A|_*.
    const std::size_t origin = spec.index_of(LatticeVec(spec.d));
    std::vector<std::pair<std::size_t, double>> picked;
    for (std::size_t ti = 0; ti < energy.terms().size(); ++ti) {
        const auto& term = energy.terms()[ti];
        const auto& pot = model.potentials[term.potential];
        const auto sites = pot.distinct_sites();
        bool hits = false;
        for (const auto& s : sites)
            if (torus_index(s + spec.vec_of(term.translation), spec) == origin) hits = true;
        if (hits) picked.push_back({ti, 1.0 / static_cast<double>(sites.size())});
    }

    std::vector<double> e;
    e.reserve(law.probs.size());
    for (std::size_t s = 0; s < law.probs.size(); ++s) {
        if (law.probs[s] == 0.0) continue;
        const auto a = law.decode(s);
        double v = 0.0;
        for (const auto& [ti, w] : picked) v += w * energy.term_energy(energy.terms()[ti], a);
        e.push_back(law.probs[s] * v);
    }
    GammaEstimate g;
    g.energy_term = pairwise_sum(e);
    g.log_z_term = gibbs.log_z / static_cast<double>(spec.volume());
    g.value = g.energy_term + g.log_z_term;
    return g;
}

/// Column layout of the replica table.
inline std::vector<std::string> manifest_columns(const RunManifest& man)
{
    std::vector<std::string> cols{"replica", "seed", "n", "blew_up", "edges", "g_min", "g_max", "apriori_max_ratio", "ac_smallest_c"};
    for (const auto& o : ExperimentConfig::observable_names()) cols.push_back(o);
    if (!man.replicas.empty())
        for (const auto& [name, v] : man.replicas.front().events) cols.push_back("event:" + name);
    return cols;
}

inline std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// CSV of one row per replica, stable column order.
inline std::string manifest_csv(const RunManifest& man)
{
    const auto cols = manifest_columns(man);
    std::ostringstream os;
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : man.replicas) {
        os << r.index << ',' << r.seed << ',' << r.n << ',' << (r.blew_up ? 1 : 0) << ',' << r.edges << ',' << format_double(r.g_min) << ','
           << format_double(r.g_max) << ',' << format_double(r.apriori_max_ratio) << ',' << format_double(r.ac.smallest_c);
        for (const auto& o : ExperimentConfig::observable_names()) {
            auto it = r.observables.find(o);
            os << ',' << (it == r.observables.end() ? std::string("nan") : format_double(it->second));
        }
        for (const auto& [name, v] : r.events) os << ',' << (v ? 1 : 0);
        os << '\n';
    }
    return os.str();
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

/// Reader for the plain comma-separated tables written here (no quoting).
inline CsvTable parse_csv(const std::string& text)
{
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) throw std::runtime_error("parse_csv: ragged row");
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string read_text(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

} // namespace latnet

#endif // LATNET_HARNESS_HPP
