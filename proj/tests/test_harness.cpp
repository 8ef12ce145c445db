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

#include <gtest/gtest.h>

#include <cmath>

#include "latnet/harness.hpp"

using latnet::Bond;
using latnet::CounterRng;
using latnet::ExperimentConfig;
using latnet::GibbsModel;
using latnet::LatticeVec;
using latnet::Potential;
using latnet::Stream;
using latnet::TorusSpec;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig c;
    c.d = 1;
    c.ns = {2};
    c.dt = 0.01;
    c.T = 0.5;
    c.replicas = 6;
    c.seed = 1234;
    c.model.p_near = 0.5;
    c.events = {{"high", "H_final", ">", 0.1}};
    c.threads = 1;
    return c;
}

Potential single_bond(LatticeVec k0, double beta)
{
    return {{Bond{LatticeVec(k0.dim()), k0}}, {0.0, -beta}};
}

bool same(const latnet::ReplicaSummary& a, const latnet::ReplicaSummary& b)
{
    return a.index == b.index && a.seed == b.seed && a.observables == b.observables && a.events == b.events && a.edges == b.edges &&
           a.g_min == b.g_min && a.g_max == b.g_max && a.apriori_max_ratio == b.apriori_max_ratio && a.ac.smallest_c == b.ac.smallest_c;
}

} // namespace

TEST(Config, RejectsUnknownObservableAndOperator)
{
    auto c = small_config();
    c.events = {{"bad", "H_median", ">", 0.0}};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.events = {{"bad", "H_final", "!=", 0.0}};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_config();
    c.replicas = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Replicas, SingleReplicaMatchesDirectRun)
{
    auto c = small_config();
    c.replicas = 1;
    const auto man = latnet::run_replicas(c);
    const auto direct = latnet::run_single(c, 2, 0);
    ASSERT_EQ(man.replicas.size(), 1u);
    EXPECT_TRUE(same(man.replicas[0], direct));

    // the observable is the torus average of the bounded functional
    const TorusSpec spec(1, 2);
    const auto noise = latnet::sample_noise(spec, c.dt, c.T, direct.seed);
    const auto field = latnet::sample_base_field(spec, c.model, direct.seed);
    const auto st = latnet::integrate_network(noise, field, c.params);
    double h = 0.0;
    for (const auto& u : st.U) h += std::tanh(u.back());
    EXPECT_NEAR(direct.observables.at("H_final"), h / 5.0, 1e-15);
}

TEST(Replicas, DeterministicAcrossThreadCounts)
{
    auto c = small_config();
    const auto serial = latnet::run_replicas(c);
    c.threads = 4;
    const auto parallel = latnet::run_replicas(c);
    const auto again = latnet::run_replicas(c);
    ASSERT_EQ(serial.replicas.size(), parallel.replicas.size());
    for (std::size_t i = 0; i < serial.replicas.size(); ++i) {
        EXPECT_TRUE(same(serial.replicas[i], parallel.replicas[i]));
        EXPECT_TRUE(same(parallel.replicas[i], again.replicas[i]));
    }
    EXPECT_EQ(latnet::manifest_csv(serial), latnet::manifest_csv(parallel));
}

TEST(Replicas, BlowUpRecordedNotFatal)
{
    auto c = small_config();
    c.dt = 0.5;
    c.T = 40.0;
    c.params.hebb.j_bar = 1.0;
    c.replicas = 3;
    const auto man = latnet::run_replicas(c);
    bool any = false;
    for (const auto& r : man.replicas) {
        if (r.blew_up) {
            any = true;
            EXPECT_FALSE(r.failure.empty());
            EXPECT_FALSE(r.events.at("high"));
        }
    }
    EXPECT_TRUE(any);
}

TEST(Ldp, AlwaysTrueAndAlwaysFalse)
{
    auto c = small_config();
    c.ns = {1, 2};
    c.replicas = 4;
    const auto yes = latnet::ldp_scan(c, {"yes", "H_sup", ">=", -2.0});
    for (const auto& r : yes) {
        EXPECT_EQ(r.p_hat, 1.0);
        EXPECT_EQ(r.normalized_log, 0.0);
        EXPECT_FALSE(r.zero_hits);
    }
    const auto no = latnet::ldp_scan(c, {"no", "H_sup", ">", 2.0});
    for (const auto& r : no) {
        EXPECT_TRUE(r.zero_hits);
        EXPECT_EQ(r.p_hat, 0.0);
        EXPECT_GT(r.ci.hi, 0.0);
        EXPECT_TRUE(std::isfinite(r.normalized_log));
    }
}

// Nominal 95% Wilson intervals cover the true p in about 95% of repeats.
TEST(Ldp, WilsonCoverage)
{
    const CounterRng rng(55);
    const double p = 0.3;
    const std::size_t trials = 100;
    const int experiments = 4000;
    int covered = 0;
    for (int e = 0; e < experiments; ++e) {
        std::size_t hits = 0;
        for (std::size_t t = 0; t < trials; ++t) hits += rng.uniform(Stream::test, static_cast<std::uint32_t>(e), static_cast<std::uint32_t>(t), 0) < p;
        const auto rows = latnet::ldp_scan_counts({{1, {hits, trials}}}, 1);
        covered += rows[0].ci.lo <= p && p <= rows[0].ci.hi;
    }
    const double rate = static_cast<double>(covered) / experiments;
    EXPECT_GT(rate, 0.925);
    EXPECT_LT(rate, 0.975);
}

TEST(Mgf, ZeroAndMonotone)
{
    const TorusSpec spec(1, 1);
    std::vector<latnet::NoiseField> reps;
    for (std::uint32_t r = 0; r < 200; ++r) reps.push_back(latnet::sample_noise(spec, 0.01, 1.0, 3, r));
    EXPECT_EQ(latnet::mgf_noise_check(reps, 0.0).estimate, 0.0);
    double prev = 0.0;
    for (double c1 : {0.01, 0.05, 0.1, 0.2}) {
        const auto e = latnet::mgf_noise_check(reps, c1);
        EXPECT_GE(e.estimate, prev);
        EXPECT_FALSE(e.overflow);
        prev = e.estimate;
    }
    EXPECT_THROW(latnet::mgf_noise_check({}, 0.1), std::invalid_argument);
}

TEST(Mgf, PerSiteEstimateStableInN)
{
    const double T = 1.0, c1 = 0.1 / T;
    std::vector<latnet::MgfEstimate> est;
    for (int n : {1, 2, 3}) {
        std::vector<latnet::NoiseField> reps;
        for (std::uint32_t r = 0; r < 4000; ++r) reps.push_back(latnet::sample_noise(TorusSpec(1, n), 0.01, T, 100 + static_cast<std::uint64_t>(n), r));
        est.push_back(latnet::mgf_noise_check(reps, c1));
    }
    for (std::size_t i = 0; i < est.size(); ++i)
        for (std::size_t k = i + 1; k < est.size(); ++k) {
            EXPECT_LE(est[i].ci.lo, est[k].ci.hi);
            EXPECT_LE(est[k].ci.lo, est[i].ci.hi);
        }
}

TEST(Growth, NullSamplerGivesZero)
{
    const TorusSpec spec(1, 3);
    GibbsModel m;
    std::vector<latnet::ConnectionField> fields(10, latnet::ConnectionField(spec));
    const auto rep = latnet::connection_growth_check(fields, m, 1, 2, 0.5, 2.0, 1.0);
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.squared.estimate, 0.0);
        EXPECT_EQ(r.linear.estimate, 0.0);
    }
}

TEST(Growth, MonotoneInA1)
{
    const TorusSpec spec(1, 2);
    GibbsModel m;
    m.upsilon = 1e-4;
    m.gamma = 0.2;
    m.p_near = 0.5;
    std::vector<latnet::ConnectionField> fields;
    for (std::uint64_t s = 0; s < 40; ++s) fields.push_back(latnet::sample_base_field(spec, m, s));
    double prev_sq = 0.0, prev_lin = 0.0;
    for (double a1 : {1e-12, 1e-10, 1e-8}) {
        const auto rep = latnet::connection_growth_check(fields, m, 1, 1, a1, 1.5, 0.1);
        EXPECT_GE(rep.rows[0].squared.estimate, prev_sq);
        EXPECT_GE(rep.rows[0].linear.estimate, prev_lin);
        prev_sq = rep.rows[0].squared.estimate;
        prev_lin = rep.rows[0].linear.estimate;
    }
}

TEST(Growth, BaseMeasureFiniteWithAnalyticCrossCheck)
{
    const TorusSpec spec(1, 3);
    GibbsModel m;
    m.upsilon = 1.0;
    m.gamma = 1.5;
    std::vector<latnet::ConnectionField> fields;
    for (std::uint64_t s = 0; s < 200; ++s) fields.push_back(latnet::sample_base_field(spec, m, s));
    const auto rep = latnet::connection_growth_check(fields, m, 1, 2, 1.0, 2.0, 0.1);
    for (const auto& r : rep.rows) {
        EXPECT_TRUE(std::isfinite(r.squared.estimate));
        EXPECT_TRUE(std::isfinite(r.linear.estimate));
        EXPECT_TRUE(std::isfinite(r.linear_analytic));
        EXPECT_NEAR(r.linear.estimate, r.linear_analytic, 1e-9);
    }
    EXPECT_TRUE(std::isfinite(rep.implied_a2));
}

// At T = 1 the prefactor (about 9e7 at m = 1) outgrows the log tail
// probability (about -7e4), so the true moment is astronomically large
// while no finite sample ever sees a far connection.
TEST(Growth, SamplingMissesExplodingPrefactor)
{
    const TorusSpec spec(1, 3);
    GibbsModel m;
    m.upsilon = 1.0;
    m.gamma = 1.5;
    std::vector<latnet::ConnectionField> fields;
    for (std::uint64_t s = 0; s < 50; ++s) fields.push_back(latnet::sample_base_field(spec, m, s));
    const auto rep = latnet::connection_growth_check(fields, m, 1, 1, 1.0, 2.0, 1.0);
    EXPECT_EQ(rep.rows[0].linear.estimate, 0.0);
    EXPECT_GT(rep.rows[0].linear_analytic, 1e7);
}

TEST(Entropy, BernoulliClosedForm)
{
    for (double p : {0.1, 0.5, 0.73})
        for (double q : {0.2, 0.5, 0.9}) {
            const double expect = p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q));
            EXPECT_NEAR(latnet::relative_entropy_exact({1 - p, p}, {1 - q, q}), expect, 1e-12);
        }
    EXPECT_EQ(latnet::relative_entropy_exact({0.3, 0.7}, {0.3, 0.7}), 0.0);
    EXPECT_TRUE(std::isinf(latnet::relative_entropy_exact({0.5, 0.5}, {1.0, 0.0})));
    EXPECT_EQ(latnet::relative_entropy_exact({1.0, 0.0}, {0.5, 0.5}), std::log(2.0));
}

TEST(Entropy, NonNegativeZeroIffEqual)
{
    const CounterRng rng(12);
    for (std::uint32_t t = 0; t < 500; ++t) {
        std::vector<double> p(5), q(5);
        double sp = 0.0, sq = 0.0;
        for (std::uint32_t i = 0; i < 5; ++i) {
            p[i] = rng.uniform(Stream::test, t, i, 0);
            q[i] = rng.uniform(Stream::test, t, i, 1);
            sp += p[i];
            sq += q[i];
        }
        for (std::size_t i = 0; i < 5; ++i) {
            p[i] /= sp;
            q[i] /= sq;
        }
        EXPECT_GT(latnet::relative_entropy_exact(p, q), 0.0);
        EXPECT_EQ(latnet::relative_entropy_exact(p, p), 0.0);
    }
}

TEST(Gamma, NoPotentials)
{
    GibbsModel m;
    const auto g = latnet::gamma_m_estimate(m, 1, TorusSpec(1, 1));
    EXPECT_EQ(g.energy_term, 0.0);
    EXPECT_NEAR(g.log_z_term, 0.0, 1e-15);
}

TEST(Gamma, SingleBondHandComputed)
{
    GibbsModel m;
    m.p_near = 0.4;
    const double beta = 1.1;
    m.potentials = {single_bond({0}, beta)};
    const auto g = latnet::gamma_m_estimate(m, 0, TorusSpec(1, 0));
    const double p = 0.4;
    const double z = 1 - p + p * std::exp(beta);
    EXPECT_NEAR(g.energy_term, -beta * p * std::exp(beta) / z, 1e-14);
    EXPECT_NEAR(g.log_z_term, std::log(z), 1e-14);
}

// For the Gibbs law Q itself, |V_n|^{-1} R(Q || mu0) + Gamma_m(Q) = 0.
TEST(Gamma, EntropyIdentityAtGibbsLaw)
{
    const TorusSpec spec(1, 1);
    GibbsModel m;
    m.p_near = 0.35;
    m.upsilon = 0.4;
    m.gamma = 0.5;
    Potential pair{{Bond{{0}, {0}}, Bond{{1}, {1}}}, {0.0, 0.3, -0.2, -1.0}};
    m.potentials = {pair, single_bond({-1}, 0.6)};
    const auto q = latnet::enumerate_exact(spec, m, 1);
    const auto g = latnet::gamma_m_estimate(m, 1, spec, &q);
    EXPECT_NEAR(latnet::specific_relative_entropy(q, m) + g.value, 0.0, 1e-12);
    // the base measure scores higher: Gamma(mu0) - Gamma(Q) = R(mu0 || Q) / |V_n| >= 0
    const auto base = latnet::base_distribution(spec, m);
    const auto g0 = latnet::gamma_m_estimate(m, 1, spec, &base);
    EXPECT_GT(g0.value, g.value);
}

TEST(Gamma, StabilisesPastPotentialRange)
{
    const TorusSpec spec(1, 1);
    GibbsModel m;
    m.p_near = 0.5;
    m.m0 = 2;
    m.potentials = {single_bond({0}, 0.8), single_bond({1}, -0.5)};
    const double g0 = latnet::gamma_m_estimate(m, 0, spec).value;
    const double g1 = latnet::gamma_m_estimate(m, 1, spec).value;
    const double g2 = latnet::gamma_m_estimate(m, 2, spec).value;
    EXPECT_NE(g0, g1);
    EXPECT_EQ(g1, g2);
}

TEST(Emit, CsvRoundTripAndStable)
{
    const auto man = latnet::run_replicas(small_config());
    const auto text = latnet::manifest_csv(man);
    const auto t = latnet::parse_csv(text);
    EXPECT_EQ(t.header, latnet::manifest_columns(man));
    ASSERT_EQ(t.rows.size(), man.replicas.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_EQ(std::stoull(t.rows[i][1]), man.replicas[i].seed);
        EXPECT_EQ(std::stod(t.rows[i][9]), man.replicas[i].observables.at("H_final"));
    }
    EXPECT_EQ(latnet::manifest_csv(man), text);
}

TEST(Emit, EmptyManifestHeadersOnly)
{
    latnet::RunManifest man;
    const auto t = latnet::parse_csv(latnet::manifest_csv(man));
    EXPECT_EQ(t.header.size(), 9u + ExperimentConfig::observable_names().size());
    EXPECT_TRUE(t.rows.empty());
}
