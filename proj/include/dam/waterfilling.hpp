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

#ifndef DAM_WATERFILLING_HPP
#define DAM_WATERFILLING_HPP

#include "dam/beamformers.hpp"

#include <vector>

namespace dam
{

struct WaterfillingResult
{
    Eigen::VectorXd powers;
    double water_level = 0.0; // mu
    std::vector<int> active;  // indices with positive power, ascending
};

// Maximizes sum_i log2(1 + p_i g_i / sigma^2) subject to sum_i p_i <= P:
// p_i = max(0, mu - sigma^2 / g_i) with the level mu chosen so that sum_i p_i = P.
WaterfillingResult waterfilling(const Eigen::VectorXd &gains, double transmit_power, double noise_power);

// Largest violation of the KKT conditions of the water-filling problem, relative to
// the water level: budget, sign, p_i = mu - sigma^2/g_i on the active set and
// sigma^2/g_i >= mu off it.
double waterfilling_kkt_residual(const WaterfillingResult &result, const Eigen::VectorXd &gains,
                                 double transmit_power, double noise_power);

// Optimal ZF power coefficients v_kl: water-fill P over the per-UE gains ||q_k||^2
// with q_kl = 1/||w_kl||, then t_k = sqrt(P_k) q_k / ||q_k|| and v_kl = t_kl^2 / ||w_kl||^2.
PowerVectors zf_power_alloc(const DirectionSet &directions, double transmit_power, double noise_power);

// Per-UE powers p_k for mrt_asymptotic: water-filling over ||h_bar_k||^2.
Eigen::VectorXd asymptotic_mrt_alloc(const ScenarioChannel &channel, double transmit_power, double noise_power);

} // namespace dam

#endif
