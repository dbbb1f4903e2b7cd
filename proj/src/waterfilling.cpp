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

#include "dam/waterfilling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dam
{

WaterfillingResult waterfilling(const Eigen::VectorXd &gains, double transmit_power, double noise_power)
{
    const Eigen::Index n = gains.size();
    if (n == 0)
        throw std::invalid_argument("Water-filling needs at least one channel.");
    if (!(gains.array() > 0.0).all() || !gains.allFinite())
        throw std::invalid_argument("Water-filling gains must be positive and finite.");
    if (!(transmit_power > 0.0))
        throw std::invalid_argument("Transmit power must be positive.");
    if (!(noise_power > 0.0))
        throw std::invalid_argument("Noise power must be positive.");

    // Floors sigma^2 / g_i in ascending order; the active set is a prefix.
    Eigen::VectorXd floor = noise_power * gains.cwiseInverse();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return floor[a] < floor[b]; });

    double level = 0.0;
    double floor_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t m = 0; m < order.size(); ++m)
    {
        floor_sum += floor[order[m]];
        const double candidate = (transmit_power + floor_sum) / static_cast<double>(m + 1);
        // Channel m joins only if the level clears its floor.
        if (candidate <= floor[order[m]])
            break;
        level = candidate;
        count = m + 1;
    }

    WaterfillingResult r;
    r.water_level = level;
    r.powers = Eigen::VectorXd::Zero(n);
    // p_i = (P + sum_j (f_j - f_i)) / |A| avoids cancelling large floors against the level.
    for (std::size_t m = 0; m < count; ++m)
    {
        const Eigen::Index i = order[m];
        double diff = 0.0;
        for (std::size_t j = 0; j < count; ++j)
            diff += floor[order[j]] - floor[i];
        r.powers[i] = std::max(0.0, (transmit_power + diff) / static_cast<double>(count));
        r.active.push_back(static_cast<int>(i));
    }
    std::sort(r.active.begin(), r.active.end());
    return r;
}

double waterfilling_kkt_residual(const WaterfillingResult &result, const Eigen::VectorXd &gains,
                                 double transmit_power, double noise_power)
{
    const double mu = result.water_level;
    double res = std::abs(result.powers.sum() - transmit_power) / transmit_power;
    for (Eigen::Index i = 0; i < gains.size(); ++i)
    {
        const double floor = noise_power / gains[i];
        const double p = result.powers[i];
        res = std::max(res, std::max(0.0, -p) / mu);
        if (p > 0.0)
            res = std::max(res, std::abs(p - (mu - floor)) / mu);
        else
            res = std::max(res, std::max(0.0, mu - floor) / mu);
    }
    return res;
}

PowerVectors zf_power_alloc(const DirectionSet &directions, double transmit_power, double noise_power)
{
    const int K = directions.num_ues();
    const Eigen::VectorXd norms = directions.column_norms();
    if (!(norms.array() > 0.0).all())
        throw std::invalid_argument("ZF direction with zero norm.");

    std::vector<Eigen::VectorXd> q;
    Eigen::VectorXd gains(K);
    for (int k = 0; k < K; ++k)
    {
        const int off = directions.path_offset[k];
        const int L = directions.path_offset[k + 1] - off;
        q.push_back(norms.segment(off, L).cwiseInverse());
        gains[k] = q.back().squaredNorm();
    }
    const auto wf = waterfilling(gains, transmit_power, noise_power);

    PowerVectors v;
    for (int k = 0; k < K; ++k)
    {
        const int off = directions.path_offset[k];
        const Eigen::VectorXd t = std::sqrt(wf.powers[k]) / q[k].norm() * q[k];
        v.push_back(t.cwiseProduct(t).cwiseQuotient(norms.segment(off, t.size()).cwiseAbs2()));
    }
    return v;
}

Eigen::VectorXd asymptotic_mrt_alloc(const ScenarioChannel &channel, double transmit_power, double noise_power)
{
    Eigen::VectorXd gains(channel.num_ues());
    for (int k = 0; k < channel.num_ues(); ++k)
        gains[k] = channel.ues[k].steering.squaredNorm();
    return waterfilling(gains, transmit_power, noise_power).powers;
}

} // namespace dam
