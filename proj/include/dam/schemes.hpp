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

#ifndef DAM_SCHEMES_HPP
#define DAM_SCHEMES_HPP

#include "dam/strongest_path.hpp"

#include <optional>
#include <vector>

namespace dam
{

// Everything derived from one channel realization that the schemes share.
struct ChannelContext
{
    ScenarioChannel channel;
    DelaySchedule schedule;
    DelayGrouping grouping;
    StrongestPathSelection selection;

    static ChannelContext build(ScenarioChannel channel);
};

struct SchemeParams
{
    double transmit_power = 1.0;
    double noise_power = 1.0;
    ScaOptions sca;
    std::optional<double> rzf_epsilon; // defaults to L_tot sigma^2 / P
};

struct SchemeOutcome
{
    BeamformerSet beams;
    RateReport report;
    std::vector<double> trace; // SCA objective trace, RZF schemes only
};

// Design the beamformers of one scheme and evaluate them analytically.
SchemeOutcome run_scheme(const ChannelContext &ctx, Scheme scheme, const SchemeParams &params);

// Streams and lock delays of an outcome, for the time-domain reference.
StreamPlan stream_plan(const ChannelContext &ctx, const BeamformerSet &beams);

const std::vector<Scheme> &all_schemes(); // the six DAM / SP schemes

} // namespace dam

#endif
