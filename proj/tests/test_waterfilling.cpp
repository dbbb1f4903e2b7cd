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
#include "dam/waterfilling.hpp"
#include "oracles.hpp"

#include <random>

using namespace dam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Water-filling - closed cases")
{
    const auto eq = waterfilling(Eigen::Vector2d(3.0, 3.0), 2.0, 0.5);
    CHECK_THAT(eq.powers[0], WithinRel(1.0, 1e-14));
    CHECK_THAT(eq.powers[1], WithinRel(1.0, 1e-14));
    CHECK(eq.active == std::vector<int>{0, 1});

    // mu = 1.125, p = [mu - 1/4, mu - 1]
    const auto r = waterfilling(Eigen::Vector2d(4.0, 1.0), 1.0, 1.0);
    CHECK_THAT(r.powers[0], WithinAbs(0.875, 1e-14));
    CHECK_THAT(r.powers[1], WithinAbs(0.125, 1e-14));
    CHECK_THAT(r.water_level, WithinAbs(1.125, 1e-14));
    const auto bis = oracle::waterfill_bisection(Eigen::Vector2d(4.0, 1.0), 1.0, 1.0);
    CHECK((bis - r.powers).cwiseAbs().maxCoeff() < 1e-12);
    const double grid = oracle::zoom_grid_max(1, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1),
                                              [](const Eigen::VectorXd &x) {
                                                  return std::log2(1.0 + 4.0 * x[0]) + std::log2(2.0 - x[0]);
                                              });
    CHECK_THAT(oracle::rate_sum(r.powers, Eigen::Vector2d(4.0, 1.0), 1.0), WithinAbs(grid, 1e-9));

    // Tiny budget: only the best channel is filled
    const auto tiny = waterfilling(Eigen::Vector3d(1.0, 5.0, 2.0), 1e-6, 1.0);
    CHECK(tiny.active == std::vector<int>{1});
    CHECK_THAT(tiny.powers[1], WithinRel(1e-6, 1e-12));
    CHECK(tiny.powers[0] == 0.0);
    CHECK(tiny.powers[2] == 0.0);

    const auto one = waterfilling(Eigen::VectorXd::Constant(1, 0.1), 3.0, 7.0);
    CHECK_THAT(one.powers[0], WithinRel(3.0, 1e-15));
}

TEST_CASE("Water-filling - KKT and bisection agreement on random gains")
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_real_distribution<double> logu(-4.0, 4.0);
    for (int t = 0; t < 300; ++t)
    {
        Eigen::VectorXd g(len(rng));
        for (auto &v : g)
            v = std::pow(10.0, logu(rng));
        const double P = std::pow(10.0, logu(rng));
        const double s2 = std::pow(10.0, logu(rng));
        const auto r = waterfilling(g, P, s2);
        CHECK(waterfilling_kkt_residual(r, g, P, s2) < 1e-10);
        CHECK((r.powers.array() >= 0.0).all());
        CHECK_THAT(r.powers.sum(), WithinRel(P, 1e-12));
        const auto ref = oracle::waterfill_bisection(g, P, s2);
        // the bisection reference itself loses ~1e-16 mu to cancellation
        CHECK((ref - r.powers).cwiseAbs().maxCoeff() <= 1e-9 * P + 1e-12 * r.water_level);
    }
}

TEST_CASE("Water-filling - KKT residual detects a wrong allocation")
{
    const Eigen::Vector2d g(4.0, 1.0);
    auto r = waterfilling(g, 1.0, 1.0);
    CHECK(waterfilling_kkt_residual(r, g, 1.0, 1.0) < 1e-14);
    r.powers = Eigen::Vector2d(0.5, 0.5);
    CHECK(waterfilling_kkt_residual(r, g, 1.0, 1.0) > 0.1);
}

TEST_CASE("Water-filling - input validation")
{
    CHECK_THROWS_AS(waterfilling(Eigen::VectorXd(0), 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(waterfilling(Eigen::Vector2d(1.0, 0.0), 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(waterfilling(Eigen::Vector2d(1.0, -2.0), 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(waterfilling(Eigen::Vector2d(1.0, 2.0), 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(waterfilling(Eigen::Vector2d(1.0, 2.0), 1.0, 0.0), std::invalid_argument);
}

namespace
{
ScenarioChannel small_channel(std::uint64_t seed, int M = 24)
{
    ScenarioConfig cfg;
    cfg.num_antennas = M;
    cfg.num_ues = 3;
    cfg.paths_per_ue = {2, 3, 1};
    cfg.max_delay = 8;
    cfg.rng_seed = seed;
    return generate_scenario(cfg);
}
} // namespace

TEST_CASE("ZF power allocation beats random feasible allocations")
{
    const double P = 2.0, s2 = 0.3;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const auto ch = small_channel(seed);
        const auto dirs = zf_directions(ch);
        const auto v = zf_power_alloc(dirs, P, s2);
        const Eigen::VectorXd norms = dirs.column_norms();

        // gamma_k = (sum_l sqrt(v_kl))^2 / sigma^2
        auto rate = [&](const PowerVectors &vv) {
            double r = 0.0;
            for (int k = 0; k < ch.num_ues(); ++k)
                r += std::log2(1.0 + std::pow(vv[k].cwiseSqrt().sum(), 2) / s2);
            return r;
        };
        double used = 0.0;
        for (int k = 0; k < ch.num_ues(); ++k)
            used += (v[k].array() * norms.segment(ch.path_offset[k], ch.ues[k].num_paths()).array().square()).sum();
        CHECK_THAT(used, WithinRel(P, 1e-12));

        const double best = rate(v);
        for (int t = 0; t < 200; ++t)
        {
            PowerVectors r(static_cast<std::size_t>(ch.num_ues()));
            double pw = 0.0;
            for (int k = 0; k < ch.num_ues(); ++k)
            {
                r[k].resize(ch.ues[k].num_paths());
                for (int l = 0; l < ch.ues[k].num_paths(); ++l)
                {
                    r[k][l] = u(rng);
                    pw += r[k][l] * std::pow(norms[ch.column(k, l)], 2);
                }
            }
            for (auto &x : r)
                x *= P / pw;
            CHECK(rate(r) <= best + 1e-12);
        }
    }
}

TEST_CASE("Asymptotic MRT allocation water-fills the stacked channel gains")
{
    const auto ch = small_channel(4);
    const double P = 1.5, s2 = 0.02;
    const auto p = asymptotic_mrt_alloc(ch, P, s2);
    Eigen::VectorXd g(ch.num_ues());
    for (int k = 0; k < ch.num_ues(); ++k)
        g[k] = ch.ues[k].stacked().squaredNorm();
    const auto ref = oracle::waterfill_bisection(g, P, s2);
    CHECK((p - ref).cwiseAbs().maxCoeff() < 1e-9 * P);
}
