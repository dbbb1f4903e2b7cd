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

#include "dam/channel.hpp"

#include <cmath>
#include <set>

using namespace dam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("dBm conversion")
{
    CHECK_THAT(dbm_to_watt(30.0), WithinRel(1.0, 1e-15));
    CHECK_THAT(dbm_to_watt(0.0), WithinRel(1e-3, 1e-15));
    CHECK_THAT(dbm_to_watt(-93.0), WithinRel(5.011872336272722e-13, 1e-12));
    CHECK_THAT(watt_to_dbm(dbm_to_watt(17.5)), WithinAbs(17.5, 1e-12));
}

TEST_CASE("Array response of a half-wavelength ULA")
{
    const double theta = 0.7;
    const auto a = array_response(theta, 16);
    REQUIRE(a.size() == 16);
    for (int m = 0; m < 16; ++m)
    {
        const cplx ref = std::exp(cplx(0.0, -kPi * m * std::cos(theta)));
        CHECK(std::abs(a[m] - ref) < 1e-14);
    }
    CHECK_THAT(a.squaredNorm(), WithinRel(16.0, 1e-14));

    // Broadside: all elements in phase
    const auto b = array_response(kPi / 2.0, 8);
    CHECK((b - Eigen::VectorXcd::Ones(8)).norm() < 1e-14);

    CHECK_THROWS_AS(array_response(0.1, 0), std::invalid_argument);
}

TEST_CASE("Steering correlation follows the Dirichlet kernel")
{
    const double t1 = 0.4, t2 = 1.3;
    const double x = kPi * (std::cos(t1) - std::cos(t2));
    double previous = 1.0;
    for (int M : {16, 64, 256, 1024})
    {
        const double rho = asymptotic_correlation(array_response(t1, M), array_response(t2, M));
        const double ref = std::abs(std::sin(M * x / 2.0) / (M * std::sin(x / 2.0)));
        CHECK_THAT(rho, WithinAbs(ref, 1e-12));
        CHECK(rho <= 1.0 / (M * std::abs(std::sin(x / 2.0))) + 1e-15);
        previous = rho;
    }
    CHECK(previous < 0.01);

    CHECK_THROWS_AS(asymptotic_correlation(Eigen::VectorXcd::Zero(4), array_response(0.1, 4)), std::invalid_argument);
    CHECK_THROWS_AS(asymptotic_correlation(array_response(0.1, 3), array_response(0.1, 4)), std::invalid_argument);
}

TEST_CASE("Scenario generation")
{
    ScenarioConfig cfg;
    cfg.num_antennas = 32;
    cfg.num_ues = 3;
    cfg.paths_per_ue = {2, 5, 4};
    cfg.max_delay = 10;
    cfg.aod_min_deg = -30.0;
    cfg.aod_max_deg = 60.0;
    cfg.rng_seed = 77;
    const auto ch = generate_scenario(cfg);

    REQUIRE(ch.num_ues() == 3);
    REQUIRE(ch.total_paths() == 11);
    CHECK(ch.H.rows() == 32);
    CHECK(ch.path_offset == std::vector<int>{0, 2, 7, 11});

    for (int k = 0; k < 3; ++k)
    {
        const auto &u = ch.ues[k];
        REQUIRE(u.num_paths() == cfg.paths_per_ue[k]);
        std::set<int> delays;
        int lo = 1 << 30, hi = -1;
        for (int l = 0; l < u.num_paths(); ++l)
        {
            const auto &p = u.paths[l];
            CHECK(p.delay >= 0);
            CHECK(p.delay <= cfg.max_delay);
            CHECK(p.aod >= -30.0 * kPi / 180.0);
            CHECK(p.aod <= 60.0 * kPi / 180.0);
            delays.insert(p.delay);
            lo = std::min(lo, p.delay);
            hi = std::max(hi, p.delay);

            const Eigen::VectorXcd ref = p.gain * array_response(p.aod, 32);
            CHECK((u.steering.col(l) - ref).norm() < 1e-12 * ref.norm());
            CHECK((ch.H.col(ch.column(k, l)) - ref).norm() < 1e-12 * ref.norm());
        }
        CHECK(static_cast<int>(delays.size()) == u.num_paths());
        CHECK(u.n_min == lo);
        CHECK(u.n_max == hi);
        CHECK(u.stacked().size() == 32 * u.num_paths());
        CHECK((u.stacked().segment(32, 32) - u.steering.col(1)).norm() == 0.0);
    }

    SECTION("Deterministic in the seed")
    {
        const auto again = generate_scenario(cfg);
        CHECK((again.H - ch.H).norm() == 0.0);
        cfg.rng_seed = 78;
        const auto other = generate_scenario(cfg);
        CHECK((other.H - ch.H).norm() > 0.0);
    }

    SECTION("All delays used when the range is tight")
    {
        cfg.paths_per_ue = {11, 11, 11};
        const auto full = generate_scenario(cfg);
        for (const auto &u : full.ues)
        {
            CHECK(u.n_min == 0);
            CHECK(u.n_max == 10);
        }
    }
}

TEST_CASE("Gain variance follows the path loss and the path count")
{
    ScenarioConfig cfg;
    cfg.num_antennas = 1;
    cfg.num_ues = 1;
    cfg.paths_per_ue = {4};
    cfg.pathloss_db = -20.0;
    std::mt19937_64 rng(5);
    double acc = 0.0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i)
    {
        const auto ch = generate_scenario(cfg, rng);
        for (const auto &p : ch.ues[0].paths)
            acc += std::norm(p.gain);
    }
    // mean of 80000 unit-exponential samples: relative std 0.35%
    CHECK_THAT(acc / (draws * 4.0), WithinRel(0.01 / 4.0, 0.02));
}

TEST_CASE("Scenario validation")
{
    ScenarioConfig ok;
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.total_paths() == 10);

    auto bad = ok;
    bad.num_antennas = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.num_ues = 0;
    bad.paths_per_ue = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.paths_per_ue = {5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.paths_per_ue = {0, 5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.noise_power = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.noise_power = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.transmit_power = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.max_delay = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.aod_min_deg = 10.0;
    bad.aod_max_deg = -10.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(generate_scenario(bad), std::invalid_argument);
}

TEST_CASE("Channel from explicit paths")
{
    std::vector<std::vector<PathParams>> paths = {{{cplx(1.0, 0.0), 0.3, 4}, {cplx(0.0, 2.0), 1.1, 1}},
                                                  {{cplx(0.5, 0.5), 2.0, 0}}};
    const auto ch = ScenarioChannel::from_paths(8, paths);
    CHECK(ch.total_paths() == 3);
    CHECK(ch.ues[0].n_min == 1);
    CHECK(ch.ues[0].n_max == 4);
    CHECK(ch.ues[1].n_min == 0);
    CHECK(ch.ues[1].n_max == 0);
    CHECK((ch.H.col(1) - cplx(0.0, 2.0) * array_response(1.1, 8)).norm() < 1e-14);

    paths[0][1].delay = 4;
    CHECK_THROWS_AS(ScenarioChannel::from_paths(8, paths), std::invalid_argument);
    paths[0][1].delay = -1;
    CHECK_THROWS_AS(ScenarioChannel::from_paths(8, paths), std::invalid_argument);
    CHECK_THROWS_AS(ScenarioChannel::from_paths(8, {}), std::invalid_argument);
    CHECK_THROWS_AS(ScenarioChannel::from_paths(8, {{}}), std::invalid_argument);
}
