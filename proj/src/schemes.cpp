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

#include "dam/schemes.hpp"
#include "dam/waterfilling.hpp"

#include <stdexcept>

namespace dam
{

ChannelContext ChannelContext::build(ScenarioChannel channel)
{
    ChannelContext ctx;
    ctx.schedule = compensate_delays(channel);
    ctx.grouping = DelayGrouping::build(channel);
    ctx.selection = select_strongest(channel);
    ctx.channel = std::move(channel);
    return ctx;
}

SchemeOutcome run_scheme(const ChannelContext &ctx, Scheme scheme, const SchemeParams &params)
{
    if (!(params.noise_power > 0.0))
        throw std::invalid_argument("Noise power must be positive.");
    const auto &ch = ctx.channel;
    const double P = params.transmit_power;
    const double s2 = params.noise_power;

    SchemeOutcome out;
    switch (scheme)
    {
    case Scheme::DamMrt:
        out.beams = mrt(ch, P);
        break;
    case Scheme::DamMrtAsymptotic:
        out.beams = mrt_asymptotic(ch, asymptotic_mrt_alloc(ch, P, s2));
        break;
    case Scheme::DamZf: {
        const DirectionSet d = zf_directions(ch);
        out.beams = assemble_zf(d, zf_power_alloc(d, P, s2), P);
        break;
    }
    case Scheme::DamRzf: {
        const double eps = params.rzf_epsilon.value_or(default_rzf_epsilon(ch.total_paths(), s2, P));
        RzfResult r = rzf_sca(ch, ctx.grouping, rzf_directions(ch, eps), P, s2, params.sca);
        out.beams = std::move(r.beams);
        out.trace = std::move(r.sca.trace);
        break;
    }
    case Scheme::SpRzf: {
        RzfResult r = baseline_rzf(ch, ctx.selection, P, s2, params.sca);
        out.beams = std::move(r.beams);
        out.trace = std::move(r.sca.trace);
        break;
    }
    case Scheme::SpMrt:
    case Scheme::SpZf:
        out.beams = baseline_beamformers(ch, ctx.selection, scheme, P, s2, params.sca);
        break;
    }

    out.report = is_strongest_path(scheme) ? baseline_sinr(out.beams, ctx.selection, ch, s2)
                                           : analytic_sinr(out.beams, ctx.grouping, ch, s2);
    return out;
}

StreamPlan stream_plan(const ChannelContext &ctx, const BeamformerSet &beams)
{
    if (is_strongest_path(beams.scheme))
        return baseline_plan(beams, ctx.selection, ctx.channel);
    return dam_plan(beams, ctx.schedule, ctx.channel);
}

const std::vector<Scheme> &all_schemes()
{
    static const std::vector<Scheme> s = {Scheme::DamMrt, Scheme::DamZf, Scheme::DamRzf,
                                          Scheme::SpMrt,  Scheme::SpZf,  Scheme::SpRzf};
    return s;
}

} // namespace dam
