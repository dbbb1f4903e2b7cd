// SPDX-License-Identifier: Apache-2.0
//
// damsim - multi-user delay alignment modulation simulator
// Copyright (C) 2026 The damsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include "dam/beamformers.hpp"
#include "dam/time_domain.hpp"
#include "oracles.hpp"

using namespace dam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
ScenarioChannel make_channel(std::uint64_t seed, int M = 16, std::vector<int> L = {3, 2})
{
    ScenarioConfig cfg;
    cfg.num_antennas = M;
    cfg.num_ues = static_cast<int>(L.size());
    cfg.paths_per_ue = L;
    cfg.max_delay = 7;
    cfg.rng_seed = seed;
    return generate_scenario(cfg);
}

StreamPlan to_plan(const std::vector<oracle::Stream> &streams, const std::vector<int> &lock)
{
    StreamPlan p;
    for (const auto &s : streams)
        p.streams.push_back({s.ue, s.beam, s.delay});
    p.lock_delay = lock;
    return p;
}
} // namespace

TEST_CASE("DAM plan layout")
{
    const auto ch = make_channel(1);
    const auto F = mrt(ch, 1.0);
    const auto plan = dam_plan(F, compensate_delays(ch), ch);
    REQUIRE(plan.streams.size() == 5);
    CHECK(plan.lock_delay == std::vector<int>{ch.ues[0].n_max, ch.ues[1].n_max});
    CHECK(plan.streams[3].ue == 1);
    CHECK(plan.streams[3].precompensation == ch.ues[1].n_max - ch.ues[1].paths[0].delay);
    CHECK((plan.streams[3].beam - F.per_ue[1].col(0)).norm() == 0.0);
}

TEST_CASE("Noiseless time-domain powers equal the analytic powers")
{
    std::mt19937_64 rng(3);
    for (auto alphabet : {SymbolAlphabet::Gaussian, SymbolAlphabet::Qpsk})
        for (std::uint64_t seed = 1; seed <= 4; ++seed)
        {
            const auto ch = make_channel(seed);
            const auto grp = DelayGrouping::build(ch);
            const auto F = oracle::random_beams(ch, rng);
            TimeDomainOptions opt;
            opt.num_symbols = 5000;
            opt.alphabet = alphabet;
            opt.seed = seed;
            const auto emp = simulate_time_domain(dam_plan(F, compensate_delays(ch), ch), ch, 0.2, opt);
            const auto ana = analytic_sinr(F, grp, ch, 0.2);
            for (int k = 0; k < 2; ++k)
            {
                const double scale = ana.ues[k].desired + ana.ues[k].isi + ana.ues[k].iui;
                CHECK_THAT(emp.ues[k].desired, WithinAbs(ana.ues[k].desired, 1e-9 * scale));
                CHECK_THAT(emp.ues[k].isi, WithinAbs(ana.ues[k].isi, 1e-9 * scale));
                CHECK_THAT(emp.ues[k].iui, WithinAbs(ana.ues[k].iui, 1e-9 * scale));
                CHECK(emp.ues[k].noise == 0.2);
            }
        }
}

TEST_CASE("Arbitrary stream plans against the delay dictionary")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    const auto ch = make_channel(5, 8, {2, 3, 1});
    std::vector<oracle::Stream> streams;
    for (int s = 0; s < 6; ++s)
    {
        Eigen::VectorXcd b(8);
        for (auto &x : b)
            x = cplx(n(rng), n(rng));
        streams.push_back({s % 3, b, s});
    }
    const std::vector<int> lock = {3, 9, 0};
    const auto ref = oracle::received_powers(ch, streams, lock);
    TimeDomainOptions opt;
    opt.num_symbols = 3000;
    opt.block_size = 700; // blocks must not change the result
    const auto emp = simulate_time_domain(to_plan(streams, lock), ch, 0.0, opt);
    for (int k = 0; k < 3; ++k)
    {
        const double scale = ref[k].desired + ref[k].isi + ref[k].iui;
        CHECK_THAT(emp.ues[k].desired, WithinAbs(ref[k].desired, 1e-9 * scale));
        CHECK_THAT(emp.ues[k].isi, WithinAbs(ref[k].isi, 1e-9 * scale));
        CHECK_THAT(emp.ues[k].iui, WithinAbs(ref[k].iui, 1e-9 * scale));
    }
}

TEST_CASE("Noisy run recovers the noise power from the residual")
{
    const auto ch = make_channel(9);
    const auto F = mrt(ch, 1.0);
    TimeDomainOptions opt;
    opt.num_symbols = 60000;
    opt.add_noise = true;
    const double s2 = 0.05;
    const auto emp = simulate_time_domain(dam_plan(F, compensate_delays(ch), ch), ch, s2, opt);
    const auto ana = analytic_sinr(F, DelayGrouping::build(ch), ch, s2);
    for (int k = 0; k < 2; ++k)
    {
        // residual variance estimate: relative std ~ 1/sqrt(N)
        CHECK_THAT(emp.ues[k].noise, WithinRel(s2, 0.03));
        CHECK_THAT(emp.ues[k].desired, WithinRel(ana.ues[k].desired, 0.02));
    }
}

TEST_CASE("Deterministic in the seed")
{
    const auto ch = make_channel(2);
    const auto plan = dam_plan(mrt(ch, 1.0), compensate_delays(ch), ch);
    TimeDomainOptions opt;
    opt.num_symbols = 2000;
    opt.add_noise = true;
    const auto a = simulate_time_domain(plan, ch, 0.1, opt);
    const auto b = simulate_time_domain(plan, ch, 0.1, opt);
    CHECK(a.ues[0].noise == b.ues[0].noise);
    CHECK(a.ues[1].desired == b.ues[1].desired);
}

TEST_CASE("Time-domain input validation")
{
    const auto ch = make_channel(2);
    const auto F = mrt(ch, 1.0);
    const auto sched = compensate_delays(ch);
    auto plan = dam_plan(F, sched, ch);
    TimeDomainOptions opt;
    opt.num_symbols = 0;
    CHECK_THROWS_AS(simulate_time_domain(plan, ch, 0.1, opt), std::invalid_argument);
    opt.num_symbols = 100;
    CHECK_THROWS_AS(simulate_time_domain(plan, ch, -0.1, opt), std::invalid_argument);
    plan.lock_delay.pop_back();
    CHECK_THROWS_AS(simulate_time_domain(plan, ch, 0.1, opt), std::invalid_argument);
    plan = dam_plan(F, sched, ch);
    plan.streams[0].beam = Eigen::VectorXcd::Zero(3);
    CHECK_THROWS_AS(simulate_time_domain(plan, ch, 0.1, opt), std::invalid_argument);
    auto G = F;
    G.per_ue[0] = G.per_ue[0].leftCols(1);
    CHECK_THROWS_AS(dam_plan(G, sched, ch), std::invalid_argument);
}
