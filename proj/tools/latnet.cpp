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


// Command-line front end. Every subcommand reads flags and an optional JSON
// config and writes CSV tables or JSON documents.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "latnet/io.hpp"
#include "latnet/latnet.hpp"

namespace fs = std::filesystem;
using namespace latnet;

namespace {

json load_json(const std::string& path) { return json::parse(read_text(path)); }

/// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text(path, text);
}

std::string coords(const LatticeVec& v)
{
    std::string s;
    for (int p = 0; p < v.dim(); ++p) s += (p ? " " : "") + std::to_string(v[p]);
    return s;
}

std::string coord_header(const std::string& stem, int d)
{
    if (d == 1) return stem;
    std::string s;
    for (int p = 0; p < d; ++p) s += (p ? "," : "") + stem + std::to_string(p + 1);
    return s;
}

std::string coord_cells(const LatticeVec& v)
{
    std::string s;
    for (int p = 0; p < v.dim(); ++p) s += (p ? "," : "") + std::to_string(v[p]);
    return s;
}

/// "d,n" as in "1,3".
TorusSpec parse_spec(const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--spec expects 'd,n'");
    return TorusSpec(std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1)));
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::istringstream is(text);
    std::string cell;
    while (std::getline(is, cell, ','))
        if (!cell.empty()) out.push_back(std::stod(cell));
    if (out.empty()) throw std::invalid_argument("empty list '" + text + "'");
    return out;
}

struct ReplicaRun {
    NoiseField noise;
    ConnectionField field;
    NetworkState state;
};

ReplicaRun run_replica_state(const ExperimentConfig& cfg, int n, std::size_t r)
{
    const TorusSpec spec(cfg.d, n);
    const auto seed = replica_seed(cfg.seed, n, r);
    auto noise = sample_noise(spec, cfg.dt, cfg.T, seed);
    auto field = sample_connections(cfg, spec, seed);
    auto state = integrate_network(noise, field, cfg.params);
    return {std::move(noise), std::move(field), std::move(state)};
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int n = -1;
    std::string out = "out";
};

int run_simulate(const SimulateArgs& a)
{
    const json doc = load_json(a.config);
    auto cfg = experiment_config_from_json(doc);
    if (a.seed_set) cfg.seed = a.seed;
    const int n = a.n >= 0 ? a.n : cfg.ns.front();
    fs::create_directories(a.out);

    const auto man = run_replicas(cfg, n);
    json mj = to_json(man);
    mj["config"] = doc;
    write_text((fs::path(a.out) / "manifest.json").string(), mj.dump(2) + "\n");
    write_text((fs::path(a.out) / "manifest.csv").string(), manifest_csv(man));

    // trajectories and measures of replica 0
    if (man.replicas.front().blew_up) {
        std::cerr << "replica 0 blew up: " << man.replicas.front().failure << "\n";
        return 0;
    }
    const auto run = run_replica_state(cfg, n, 0);
    std::ostringstream os;
    os << "t,site,U,w\n";
    const auto sites = cube_iter(run.state.spec);
    for (std::size_t j = 0; j < run.state.U.size(); ++j)
        for (std::size_t i = 0; i <= run.state.steps(); ++i)
            os << format_double(cfg.dt * static_cast<double>(i)) << ',' << coords(sites[j]) << ',' << format_double(run.state.U[j][i]) << ','
               << format_double(run.state.w[j][i]) << '\n';
    write_text((fs::path(a.out) / "trajectories.csv").string(), os.str());
    write_text((fs::path(a.out) / "measure.json").string(), to_json(empirical_measure(run.state)).dump() + "\n");
    write_text((fs::path(a.out) / "double_layer.json").string(),
               to_json(double_layer_measure(run.noise, run.field, cfg.params.space)).dump() + "\n");

    std::size_t blown = 0;
    double worst_ratio = 0.0;
    for (const auto& r : man.replicas) {
        blown += r.blew_up;
        worst_ratio = std::max(worst_ratio, r.apriori_max_ratio);
    }
    std::cerr << "n=" << n << " replicas=" << man.replicas.size() << " blew_up=" << blown << " apriori_max_ratio=" << worst_ratio
              << " config_hash=" << man.config_hash << "\n";
    return 0;
}

// ---- weights -----------------------------------------------------------

struct WeightsArgs {
    int d = 1;
    int m = 1;
    double rho = 2.0;
    std::string window = "default";
    int grid = 0;
    std::string out;
};

int run_weights(const WeightsArgs& a)
{
    int window = -1;
    if (a.window == "auto")
        window = resolved_window(a.m, a.rho, a.d);
    else if (a.window != "default")
        window = std::stoi(a.window);
    const auto w = compute_weights(a.m, a.rho, a.d, window, a.grid);
    std::ostringstream os;
    os << coord_header("j", a.d) << ",lambda\n";
    const auto win = w.window_spec();
    for (std::size_t i = 0; i < win.volume(); ++i) os << coord_cells(win.vec_of(i)) << ',' << format_double(w.values[i]) << '\n';
    emit(a.out, os.str());

    const auto cert = weight_certificates(w);
    std::ostringstream line;
    line << "certificate ok=" << (cert.ok() ? 1 : 0) << " positive=" << cert.all_positive << " convolution=" << cert.convolution_ok
         << " min_slack=" << cert.min_convolution_slack << " lower_bound=" << cert.lower_bound_ok
         << " min_scaled=" << cert.min_scaled_lambda_in_cube << " threshold=" << cert.lower_bound_threshold << " h=" << w.h
         << " h_zero_mode=" << w.h_zero_mode << " h_bound=" << cert.h_bound_ok << " tail_mass=" << w.tail_mass << " window=" << w.window
         << " grid=" << w.grid;
    std::cerr << line.str() << "\n";
    return 0;
}

// ---- gibbs -------------------------------------------------------------

struct GibbsArgs {
    std::string spec = "1,1";
    std::string model_file;
    int sweeps = 50;
    std::uint64_t seed = 1;
    int m = -1;
    bool base = false;
    std::string out;
};

int run_gibbs(const GibbsArgs& a)
{
    const TorusSpec spec = parse_spec(a.spec);
    json doc = load_json(a.model_file);
    // accept either a bare model or a full config with a connectivity section
    if (doc.contains("connectivity")) doc = doc.at("connectivity");
    const auto model = gibbs_model_from_json(doc);
    model.validate(spec.d);
    const int m = a.m < 0 ? spec.n : a.m;
    const auto field = a.base ? sample_base_field(spec, model, a.seed) : metropolis_sample(spec, model, m, a.sweeps, a.seed);
    const auto pts = cube_iter(spec);
    std::ostringstream os;
    os << "j,k,value\n";
    for (std::size_t j = 0; j < spec.volume(); ++j)
        for (const auto& e : field.row(j)) os << coords(pts[j]) << ',' << coords(pts[e.offset]) << ',' << e.value << '\n';
    emit(a.out, os.str());
    std::cerr << "edges=" << field.edge_count() << " sites=" << spec.volume() << "\n";
    return 0;
}

// ---- metric ------------------------------------------------------------

struct MetricArgs {
    std::string a, b;
    int jmax = 3;
    std::string out;
};

int run_metric(const MetricArgs& a)
{
    const auto ma = empirical_measure_from_json(load_json(a.a));
    const auto mb = empirical_measure_from_json(load_json(a.b));
    const auto r = dP_truncated(ma, mb, a.jmax);
    const json j = {{"value", r.value}, {"remainder", r.remainder}, {"terms", r.terms}, {"jmax", a.jmax}};
    emit(a.out, j.dump(2) + "\n");
    return 0;
}

// ---- ldp-scan ----------------------------------------------------------

struct LdpArgs {
    std::string config;
    std::string name = "event";
    std::string observable;
    std::string op = ">";
    double threshold = 0.0;
    std::string out;
};

int run_ldp(const LdpArgs& a)
{
    const auto cfg = experiment_config_from_json(load_json(a.config));
    std::vector<EventDef> events = cfg.events;
    if (!a.observable.empty()) events = {{a.name, a.observable, a.op, a.threshold}};
    if (events.empty()) throw std::invalid_argument("ldp-scan: no event given in the config or on the command line");
    std::ostringstream os;
    os << "event,n,volume,trials,hits,blowups,p_hat,ci_lo,ci_hi,normalized_log,zero_hits\n";
    for (const auto& e : events) {
        ExperimentConfig c = cfg;
        c.events = {e};
        c.validate();
        for (const auto& r : ldp_scan(c, e))
            os << e.name << ',' << r.n << ',' << r.volume << ',' << r.trials << ',' << r.hits << ',' << r.blowups << ',' << format_double(r.p_hat)
               << ',' << format_double(r.ci.lo) << ',' << format_double(r.ci.hi) << ',' << format_double(r.normalized_log) << ','
               << (r.zero_hits ? 1 : 0) << '\n';
    }
    emit(a.out, os.str());
    return 0;
}

// ---- audit -------------------------------------------------------------

struct AuditArgs {
    std::string config;
    std::string out;
};

int run_audit(const AuditArgs& a)
{
    const auto cfg = experiment_config_from_json(load_json(a.config));
    const int n = cfg.ns.front();
    std::vector<std::pair<Trajectory, Trajectory>> corpus;
    std::size_t blown = 0;
    for (std::size_t r = 0; r < cfg.replicas; ++r) {
        try {
            const auto run = run_replica_state(cfg, n, r);
            // neighbouring sites; a lone site is paired with the zero path
            const auto& st = run.state;
            for (std::size_t j = 0; j + 1 < st.U.size(); ++j) corpus.emplace_back(st.trajectory(j), st.trajectory(j + 1));
            if (st.U.size() == 1) corpus.emplace_back(st.trajectory(0), Trajectory{st.dt, std::vector<double>(st.U[0].size(), 0.0)});
        } catch (const BlowUpError&) {
            ++blown;
        }
    }
    const auto rep = assumption_audit(cfg.params, corpus);
    const auto dc = drift_constants(cfg.params.fhn);
    json viol = json::array();
    for (const auto& v : rep.violations) viol.push_back({{"kind", v.kind}, {"pair", v.pair}, {"step", v.step}, {"ratio", v.ratio}});
    const json j = {{"pairs", rep.pairs},
                    {"blown_up_replicas", blown},
                    {"c_difference", rep.c_difference},
                    {"c_difference_reference", dc.difference},
                    {"c_strict", std::isfinite(rep.c_strict) ? json(rep.c_strict) : json("inf")},
                    {"c_affine", rep.c_affine},
                    {"c_affine_reference", dc.affine},
                    {"lip_ratio", rep.lip_ratio},
                    {"conn_ratio", rep.conn_ratio},
                    {"abs_ratio", rep.abs_ratio},
                    {"cj_estimate", rep.cj_estimate},
                    {"cj_reference", interaction_lipschitz(cfg.params, cfg.T)},
                    {"violations", viol}};
    emit(a.out, j.dump(2) + "\n");
    return 0;
}

// ---- ac-check ----------------------------------------------------------

struct AcArgs {
    std::string run;
    std::string c_grid = "0.5,1,2,4,8";
    std::string out;
};

int run_ac(const AcArgs& a)
{
    const auto man = run_manifest_from_json(load_json(a.run));
    const auto grid = parse_list(a.c_grid);
    std::ostringstream os;
    os << "c,members,replicas,fraction\n";
    for (double c : grid) {
        if (!(c > 0.0)) throw std::invalid_argument("ac-check: grid values must be positive");
        std::size_t members = 0;
        for (const auto& r : man.replicas) members += r.ac.smallest_c <= c;
        const double frac = man.replicas.empty() ? 0.0 : static_cast<double>(members) / static_cast<double>(man.replicas.size());
        os << format_double(c) << ',' << members << ',' << man.replicas.size() << ',' << format_double(frac) << '\n';
    }
    emit(a.out, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"latnet: lattice neural network simulator and diagnostics"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "integrate replicas and write trajectories, measures and a run manifest");
    s->add_option("--config", sim.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("--seed", sim.seed, "master seed, overrides the config")->each([&](const std::string&) { sim.seed_set = true; });
    s->add_option("--n", sim.n, "torus radius (default: first of the sweep)");
    s->add_option("--out", sim.out, "output directory")->capture_default_str();

    WeightsArgs wa;
    auto* w = app.add_subcommand("weights", "summable weights lambda_m^j as CSV; certificate line on stderr");
    w->add_option("--d", wa.d, "dimension")->capture_default_str();
    w->add_option("--m", wa.m, "radius m")->capture_default_str();
    w->add_option("--rho", wa.rho, "rho > 1")->capture_default_str();
    w->add_option("--window", wa.window, "window radius, 'default' (4m) or 'auto'")->capture_default_str();
    w->add_option("--grid", wa.grid, "quadrature points per axis (0: 64(2m+1))")->capture_default_str();
    w->add_option("--out", wa.out, "CSV path (default stdout)");

    GibbsArgs ga;
    auto* g = app.add_subcommand("gibbs", "sample a connection field and write it as an edge list");
    g->add_option("--spec", ga.spec, "torus as 'd,n'")->capture_default_str();
    g->add_option("--model-file", ga.model_file, "model JSON")->required()->check(CLI::ExistingFile);
    g->add_option("--sweeps", ga.sweeps, "Metropolis sweeps")->capture_default_str();
    g->add_option("--seed", ga.seed, "seed")->capture_default_str();
    g->add_option("--m", ga.m, "truncation radius of the potentials (default n)");
    g->add_flag("--base", ga.base, "draw from the base measure instead");
    g->add_option("--out", ga.out, "CSV path (default stdout)");

    MetricArgs ma;
    auto* mt = app.add_subcommand("metric", "truncated Levy-Prokhorov series distance between two measure files");
    mt->add_option("--a", ma.a, "first measure (JSON)")->required()->check(CLI::ExistingFile);
    mt->add_option("--b", ma.b, "second measure (JSON)")->required()->check(CLI::ExistingFile);
    mt->add_option("--jmax", ma.jmax, "number of series terms")->capture_default_str();
    mt->add_option("--out", ma.out, "JSON path (default stdout)");

    LdpArgs la;
    auto* l = app.add_subcommand("ldp-scan", "event probabilities across the n sweep");
    l->add_option("--config", la.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    l->add_option("--name", la.name, "event name")->capture_default_str();
    l->add_option("--observable", la.observable, "observable (default: the config's events)");
    l->add_option("--op", la.op, "comparison")->capture_default_str();
    l->add_option("--threshold", la.threshold, "threshold")->capture_default_str();
    l->add_option("--out", la.out, "CSV path (default stdout)");

    AuditArgs aa;
    auto* au = app.add_subcommand("audit", "empirical constants of the drift and interaction inequalities");
    au->add_option("--config", aa.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    au->add_option("--out", aa.out, "JSON path (default stdout)");

    AcArgs ac;
    auto* acs = app.add_subcommand("ac-check", "fraction of replicas inside A_c for each c");
    acs->add_option("--run", ac.run, "run manifest (JSON)")->required()->check(CLI::ExistingFile);
    acs->add_option("--c-grid", ac.c_grid, "comma-separated c values")->capture_default_str();
    acs->add_option("--out", ac.out, "CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*s) return run_simulate(sim);
        if (*w) return run_weights(wa);
        if (*g) return run_gibbs(ga);
        if (*mt) return run_metric(ma);
        if (*l) return run_ldp(la);
        if (*au) return run_audit(aa);
        if (*acs) return run_ac(ac);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
