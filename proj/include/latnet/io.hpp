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

#ifndef LATNET_IO_HPP
#define LATNET_IO_HPP

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "connectivity.hpp"
#include "dynamics.hpp"
#include "harness.hpp"
#include "measure.hpp"

namespace latnet {

using json = nlohmann::json;

/// FNV-1a over the canonical (sorted-key) dump of a document.
inline std::string config_hash(const json& doc)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : doc.dump()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline LatticeVec lattice_vec_from_json(const json& j)
{
    if (j.is_number_integer()) return LatticeVec{j.get<int>()};
    return LatticeVec(j.get<std::vector<int>>());
}

inline json to_json(const LatticeVec& v) { return json(std::vector<int>(v.coords().begin(), v.coords().end())); }

inline ConnSpace conn_space_from_json(const json& j, double j_bar)
{
    if (j.is_null()) return ConnSpace::binary(j_bar);
    ConnSpace s;
    s.values = j.at("values").get<std::vector<double>>();
    s.null_index = j.value("null_index", 0);
    for (const auto& row : j.at("metric"))
        for (const auto& v : row) s.metric.push_back(v.get<double>());
    s.validate();
    return s;
}

inline json to_json(const ConnSpace& s)
{
    json m = json::array();
    for (int a = 0; a < s.size(); ++a) {
        json row = json::array();
        for (int b = 0; b < s.size(); ++b) row.push_back(s.dist(a, b));
        m.push_back(row);
    }
    return {{"values", s.values}, {"null_index", s.null_index}, {"metric", m}};
}

/// Model section: {upsilon, gamma, m0, p_near, potentials: [{shape: [{site,
/// offset}], table: [...]}], space?}.
inline GibbsModel gibbs_model_from_json(const json& j, double j_bar = 1.0)
{
    GibbsModel m;
    m.space = conn_space_from_json(j.value("space", json()), j_bar);
    m.upsilon = j.value("upsilon", m.upsilon);
    m.gamma = j.value("gamma", m.gamma);
    m.m0 = j.value("m0", m.m0);
    m.p_near = j.value("p_near", m.p_near);
    for (const auto& p : j.value("potentials", json::array())) {
        Potential pot;
        for (const auto& b : p.at("shape")) pot.shape.push_back({lattice_vec_from_json(b.at("site")), lattice_vec_from_json(b.at("offset"))});
        pot.table = p.at("table").get<std::vector<double>>();
        m.potentials.push_back(std::move(pot));
    }
    return m;
}

inline NetworkParams network_params_from_json(const json& dyn, const json& conn)
{
    NetworkParams p;
    p.fhn.a = dyn.value("a", p.fhn.a);
    p.fhn.c = dyn.value("c", p.fhn.c);
    p.fhn.f = ScalarMap::by_name(dyn.value("f", std::string("tanh")));
    p.fhn.v_act = ScalarMap::by_name(dyn.value("activity", std::string("logistic")));
    p.hebb.j_corr = dyn.value("j_corr", p.hebb.j_corr);
    p.hebb.j_dec = dyn.value("j_dec", p.hebb.j_dec);
    p.hebb.j_bar = dyn.value("j_bar", p.hebb.j_bar);
    p.hebb.g_ini = dyn.value("g_ini", p.hebb.g_ini);
    p.space = conn_space_from_json(conn.value("space", json()), p.hebb.j_bar);
    p.validate();
    return p;
}

/// Full experiment document with sections torus, dynamics, connectivity,
/// integration and experiment. Missing keys take the defaults.
inline ExperimentConfig experiment_config_from_json(const json& doc)
{
    ExperimentConfig c;
    const json torus = doc.value("torus", json::object());
    const json dyn = doc.value("dynamics", json::object());
    const json conn = doc.value("connectivity", json::object());
    const json integ = doc.value("integration", json::object());
    const json exp = doc.value("experiment", json::object());

    c.d = torus.value("d", 1);
    if (torus.contains("n")) {
        const auto& n = torus.at("n");
        c.ns = n.is_array() ? n.get<std::vector<int>>() : std::vector<int>{n.get<int>()};
    }
    c.params = network_params_from_json(dyn, conn);
    c.model = gibbs_model_from_json(conn, c.params.hebb.j_bar);
    const std::string mode = conn.value("mode", std::string("base"));
    if (mode == "base")
        c.mode = ConnectivityMode::base;
    else if (mode == "gibbs")
        c.mode = ConnectivityMode::gibbs;
    else
        throw std::invalid_argument("config: connectivity.mode must be 'base' or 'gibbs'");
    c.gibbs_sweeps = conn.value("sweeps", c.gibbs_sweeps);
    c.gibbs_truncation = conn.value("truncation", c.gibbs_truncation);
    c.dt = integ.value("dt", c.dt);
    c.T = integ.value("T", c.T);
    c.replicas = exp.value("replicas", c.replicas);
    c.seed = exp.value("seed", c.seed);
    c.threads = exp.value("threads", c.threads);
    c.rho = exp.value("rho", c.rho);
    c.ac_m0 = exp.value("ac_m0", c.ac_m0);
    c.ac_m_max = exp.value("ac_m_max", c.ac_m_max);
    for (const auto& e : exp.value("events", json::array()))
        c.events.push_back({e.at("name").get<std::string>(), e.at("observable").get<std::string>(), e.value("op", std::string(">")),
                            e.at("threshold").get<double>()});
    c.config_hash = config_hash(doc);
    c.validate();
    return c;
}

inline json to_json(const AcReport& ac)
{
    json rows = json::array();
    for (const auto& r : ac.rows)
        rows.push_back({{"m", r.m},
                        {"first_moment", r.first_moment},
                        {"second_moment", r.second_moment},
                        {"c_first", r.c_first},
                        {"c_second", r.c_second}});
    return {{"noise_moment", ac.noise_moment}, {"smallest_c", ac.smallest_c}, {"rows", rows}};
}

inline AcReport ac_report_from_json(const json& j)
{
    AcReport ac;
    ac.noise_moment = j.at("noise_moment").get<double>();
    ac.smallest_c = j.at("smallest_c").get<double>();
    for (const auto& r : j.at("rows"))
        ac.rows.push_back({r.at("m").get<int>(), r.at("second_moment").get<double>(), r.at("first_moment").get<double>(),
                           r.at("c_second").get<double>(), r.at("c_first").get<double>()});
    return ac;
}

inline json to_json(const RunManifest& man)
{
    json reps = json::array();
    for (const auto& r : man.replicas) {
        reps.push_back({{"index", r.index},
                        {"seed", r.seed},
                        {"n", r.n},
                        {"blew_up", r.blew_up},
                        {"failure", r.failure},
                        {"observables", r.observables},
                        {"events", r.events},
                        {"edges", r.edges},
                        {"g_min", r.g_min},
                        {"g_max", r.g_max},
                        {"apriori_max_ratio", r.apriori_max_ratio},
                        {"apriori_min_slack", r.apriori_min_slack},
                        {"ac", to_json(r.ac)}});
    }
    return {{"config_hash", man.config_hash}, {"seed", man.seed}, {"n", man.n}, {"replicas", reps}};
}

inline RunManifest run_manifest_from_json(const json& j)
{
    RunManifest man;
    man.config_hash = j.at("config_hash").get<std::string>();
    man.seed = j.at("seed").get<std::uint64_t>();
    man.n = j.at("n").get<int>();
    for (const auto& r : j.at("replicas")) {
        ReplicaSummary s;
        s.index = r.at("index").get<std::size_t>();
        s.seed = r.at("seed").get<std::uint64_t>();
        s.n = r.at("n").get<int>();
        s.blew_up = r.at("blew_up").get<bool>();
        s.failure = r.at("failure").get<std::string>();
        s.observables = r.at("observables").get<std::map<std::string, double>>();
        s.events = r.at("events").get<std::map<std::string, bool>>();
        s.edges = r.at("edges").get<std::size_t>();
        s.g_min = r.at("g_min").get<double>();
        s.g_max = r.at("g_max").get<double>();
        s.apriori_max_ratio = r.at("apriori_max_ratio").get<double>();
        s.apriori_min_slack = r.at("apriori_min_slack").get<double>();
        s.ac = ac_report_from_json(r.at("ac"));
        man.replicas.push_back(std::move(s));
    }
    return man;
}

inline json to_json(const EmpiricalMeasure& mu)
{
    json j = {{"kind", mu.kind == EmpiricalMeasure::Kind::paths ? "paths" : "double_layer"},
              {"d", mu.spec.d},
              {"n", mu.spec.n},
              {"dt", mu.dt},
              {"paths", mu.paths}};
    if (mu.has_connections()) {
        j["conns"] = mu.conns;
        j["space"] = to_json(mu.space);
    }
    return j;
}

inline EmpiricalMeasure empirical_measure_from_json(const json& j)
{
    EmpiricalMeasure mu;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "paths")
        mu.kind = EmpiricalMeasure::Kind::paths;
    else if (kind == "double_layer")
        mu.kind = EmpiricalMeasure::Kind::double_layer;
    else
        throw std::invalid_argument("measure: unknown kind '" + kind + "'");
    mu.spec = TorusSpec(j.at("d").get<int>(), j.at("n").get<int>());
    mu.dt = j.at("dt").get<double>();
    mu.paths = j.at("paths").get<std::vector<std::vector<double>>>();
    if (mu.paths.size() != mu.spec.volume()) throw std::invalid_argument("measure: path count does not match the torus");
    if (mu.has_connections()) {
        mu.conns = j.at("conns").get<std::vector<int>>();
        mu.space = conn_space_from_json(j.at("space"), 1.0);
        if (mu.conns.size() != mu.spec.volume() * mu.spec.volume()) throw std::invalid_argument("measure: connection table has wrong size");
    }
    return mu;
}

} // namespace latnet

#endif // LATNET_IO_HPP
