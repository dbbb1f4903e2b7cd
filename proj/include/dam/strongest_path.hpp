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

#ifndef DAM_STRONGEST_PATH_HPP
#define DAM_STRONGEST_PATH_HPP

#include "dam/sca.hpp"
#include "dam/time_domain.hpp"

#include <vector>

namespace dam
{

// Strongest-path benchmark: one undelayed stream per UE, beamformed towards the UE's
// largest-norm path; every other path of every UE becomes interference.
struct StrongestPathSelection
{
    std::vector<int> index; // l*_k, argmax_l ||h_kl|| with ties to the lowest index
    Eigen::MatrixXcd H_star; // M_t x K, column k = h_{k, l*_k}
};

StrongestPathSelection select_strongest(const ScenarioChannel &channel);

// SINR model of the benchmark for unit-norm per-UE directions (M_t x K).
QuadraticSinrModel baseline_sinr_model(const ScenarioChannel &channel, const StrongestPathSelection &selection,
                                       const Eigen::MatrixXcd &unit_directions);

// SP-RZF: directions H*(H*^H H* + K sigma^2/P I)^{-1}, powers by SCA.
RzfResult baseline_rzf(const ScenarioChannel &channel, const StrongestPathSelection &selection,
                       double transmit_power, double noise_power, const ScaOptions &options = {});

// scheme must be SpMrt, SpZf or SpRzf. MRT and ZF water-fill the per-UE powers.
// Throws InfeasibleError for SpZf when M_t < K.
BeamformerSet baseline_beamformers(const ScenarioChannel &channel, const StrongestPathSelection &selection,
                                   Scheme scheme, double transmit_power, double noise_power,
                                   const ScaOptions &options = {});

// UE k locks to the delay of its strongest path.
RateReport baseline_sinr(const BeamformerSet &F, const StrongestPathSelection &selection,
                         const ScenarioChannel &channel, double noise_power);

StreamPlan baseline_plan(const BeamformerSet &F, const StrongestPathSelection &selection,
                         const ScenarioChannel &channel);

} // namespace dam

#endif
