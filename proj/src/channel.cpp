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

#include "dam/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dam
{

double dbm_to_watt(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double watt_to_dbm(double watt)
{
    return 10.0 * std::log10(watt) + 30.0;
}

int ScenarioConfig::total_paths() const
{
    return std::accumulate(paths_per_ue.begin(), paths_per_ue.end(), 0);
}

void ScenarioConfig::validate() const
{
    if (num_antennas < 1)
        throw std::invalid_argument("Number of antennas must be at least 1.");
    if (num_ues < 1)
        throw std::invalid_argument("Number of UEs must be at least 1.");
    if (static_cast<int>(paths_per_ue.size()) != num_ues)
        throw std::invalid_argument("paths_per_ue must have one entry per UE.");
    if (std::any_of(paths_per_ue.begin(), paths_per_ue.end(), [](int l) { return l < 1; }))
        throw std::invalid_argument("Every UE needs at least one path.");
    if (!(transmit_power > 0.0) || !std::isfinite(transmit_power))
        throw std::invalid_argument("Transmit power must be positive.");
    if (!(noise_power > 0.0) || !std::isfinite(noise_power))
        throw std::invalid_argument("Noise power must be positive.");
    if (max_delay < 0)
        throw std::invalid_argument("Maximum delay cannot be negative.");
    const int l_max = *std::max_element(paths_per_ue.begin(), paths_per_ue.end());
    if (max_delay + 1 < l_max)
        throw std::invalid_argument("Delay range [0, " + std::to_string(max_delay) + "] cannot hold " +
                                    std::to_string(l_max) + " distinct delays.");
    if (!(aod_max_deg >= aod_min_deg))
        throw std::invalid_argument("AoD range is empty.");
    if (!std::isfinite(pathloss_db))
        throw std::invalid_argument("Path loss must be finite.");
}

Eigen::VectorXcd array_response(double theta, int num_antennas)
{
    if (num_antennas < 1)
        throw std::invalid_argument("Number of antennas must be at least 1.");
    Eigen::VectorXcd a(num_antennas);
    const double phase = -kPi * std::cos(theta);
    for (int m = 0; m < num_antennas; ++m)
        a[m] = std::polar(1.0, phase * m);
    return a;
}

Eigen::VectorXcd UeChannel::stacked() const
{
    return steering.reshaped();
}

ScenarioChannel ScenarioChannel::from_paths(int num_antennas, const std::vector<std::vector<PathParams>> &paths)
{
    if (num_antennas < 1)
        throw std::invalid_argument("Number of antennas must be at least 1.");
    if (paths.empty())
        throw std::invalid_argument("At least one UE is required.");

    ScenarioChannel ch;
    ch.num_antennas = num_antennas;
    ch.path_offset.push_back(0);
    for (const auto &ue_paths : paths)
    {
        if (ue_paths.empty())
            throw std::invalid_argument("Every UE needs at least one path.");
        UeChannel ue;
        ue.paths = ue_paths;
        ue.steering.resize(num_antennas, static_cast<Eigen::Index>(ue_paths.size()));
        std::vector<int> delays;
        for (std::size_t l = 0; l < ue_paths.size(); ++l)
        {
            if (ue_paths[l].delay < 0)
                throw std::invalid_argument("Path delays cannot be negative.");
            ue.steering.col(static_cast<Eigen::Index>(l)) = ue_paths[l].gain * array_response(ue_paths[l].aod, num_antennas);
            delays.push_back(ue_paths[l].delay);
        }
        std::sort(delays.begin(), delays.end());
        if (std::adjacent_find(delays.begin(), delays.end()) != delays.end())
            throw std::invalid_argument("Path delays of one UE must be pairwise distinct.");
        ue.n_min = delays.front();
        ue.n_max = delays.back();
        ch.path_offset.push_back(ch.path_offset.back() + ue.num_paths());
        ch.ues.push_back(std::move(ue));
    }

    ch.H.resize(num_antennas, ch.path_offset.back());
    for (int k = 0; k < ch.num_ues(); ++k)
        ch.H.middleCols(ch.path_offset[k], ch.ues[k].num_paths()) = ch.ues[k].steering;
    return ch;
}

ScenarioChannel generate_scenario(const ScenarioConfig &config, std::mt19937_64 &rng)
{
    config.validate();

    const double deg = kPi / 180.0;
    std::uniform_real_distribution<double> aod(config.aod_min_deg * deg, config.aod_max_deg * deg);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::pow(10.0, config.pathloss_db / 10.0);

    std::vector<int> pool(static_cast<std::size_t>(config.max_delay) + 1);
    std::vector<std::vector<PathParams>> paths(static_cast<std::size_t>(config.num_ues));
    for (int k = 0; k < config.num_ues; ++k)
    {
        const int L = config.paths_per_ue[k];

        // Partial Fisher-Yates: the first L entries are a uniform draw without replacement.
        std::iota(pool.begin(), pool.end(), 0);
        for (int l = 0; l < L; ++l)
        {
            std::uniform_int_distribution<int> pick(l, config.max_delay);
            std::swap(pool[l], pool[pick(rng)]);
        }

        const double stddev = std::sqrt(scale / L / 2.0);
        for (int l = 0; l < L; ++l)
        {
            PathParams p;
            p.delay = pool[l];
            p.aod = aod(rng);
            const double re = normal(rng);
            const double im = normal(rng);
            p.gain = cplx(stddev * re, stddev * im);
            paths[k].push_back(p);
        }
    }
    return ScenarioChannel::from_paths(config.num_antennas, paths);
}

ScenarioChannel generate_scenario(const ScenarioConfig &config)
{
    std::mt19937_64 rng(config.rng_seed);
    return generate_scenario(config, rng);
}

double asymptotic_correlation(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("Vectors must have equal length.");
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("Correlation is undefined for a zero-norm vector.");
    return std::abs(a.dot(b)) / (na * nb);
}

} // namespace dam
