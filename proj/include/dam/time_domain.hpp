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

#ifndef DAM_TIME_DOMAIN_HPP
#define DAM_TIME_DOMAIN_HPP

#include "dam/core.hpp"

#include <cstdint>
#include <vector>

namespace dam
{

// One transmitted symbol stream: s_ue[n - precompensation] sent on `beam`.
struct Stream
{
    int ue = 0;
    Eigen::VectorXcd beam;
    int precompensation = 0;
};

// Everything the BS transmits plus the delay each UE locks to.
struct StreamPlan
{
    std::vector<Stream> streams;
    std::vector<int> lock_delay; // per UE
};

// DAM: stream (k, l) carries f_kl delayed by kappa_kl; UE k locks to n_k,max.
StreamPlan dam_plan(const BeamformerSet &F, const DelaySchedule &schedule, const ScenarioChannel &channel);

enum class SymbolAlphabet
{
    Gaussian, // CN(0, 1)
    Qpsk,
};

struct TimeDomainOptions
{
    long num_symbols = 100000;
    SymbolAlphabet alphabet = SymbolAlphabet::Gaussian;
    bool add_noise = false;
    std::uint64_t seed = 1;
    long block_size = 4096;
};

// Monte-Carlo reference for the analytic SINR. Draws unit-power symbol streams, forms
// x[n] = sum_s f_s s[n - kappa_s], passes it through every UE's tapped-delay-line channel
// and regresses y_k[n] onto the delayed copies of all symbol streams that can reach UE k.
// The regression coefficient at the lock delay gives the desired power, the remaining own
// delays the ISI, other UEs' streams the IUI. Without noise the noise field is set to the
// nominal noise power; with noise it is the residual power of the fit.
RateReport simulate_time_domain(const StreamPlan &plan, const ScenarioChannel &channel, double noise_power,
                                const TimeDomainOptions &options = {});

} // namespace dam

#endif
