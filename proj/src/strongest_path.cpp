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

#include "dam/strongest_path.hpp"
#include "dam/waterfilling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dam
{

StrongestPathSelection select_strongest(const ScenarioChannel &channel)
{
    StrongestPathSelection sel;
    sel.H_star.resize(channel.num_antennas, channel.num_ues());
    for (int k = 0; k < channel.num_ues(); ++k)
    {
        const auto &S = channel.ues[k].steering;
        int best = 0;
        double best_norm = S.col(0).squaredNorm();
        for (int l = 1; l < S.cols(); ++l)
        {
            const double nrm = S.col(l).squaredNorm();
            if (nrm > best_norm)
            {
                best = l;
                best_norm = nrm;
            }
        }
        sel.index.push_back(best);
        sel.H_star.col(k) = S.col(best);
    }
    return sel;
}

namespace
{
void check_baseline_set(const BeamformerSet &F, const ScenarioChannel &channel)
{
    if (static_cast<int>(F.per_ue.size()) != channel.num_ues())
        throw std::invalid_argument("Baseline beamformer set needs one entry per UE.");
    for (const auto &m : F.per_ue)
        if (m.cols() != 1 || m.rows() != channel.num_antennas)
            throw std::invalid_argument("Baseline beamformer set needs a single M_t x 1 vector per UE.");
}

BeamformerSet scaled_columns(const Eigen::MatrixXcd &unit, const Eigen::VectorXd &amplitudes, Scheme scheme)
{
    BeamformerSet F;
    F.scheme = scheme;
    for (Eigen::Index k = 0; k < unit.cols(); ++k)
        F.per_ue.push_back(amplitudes[k] * unit.col(k));
    return F;
}
} // namespace

QuadraticSinrModel baseline_sinr_model(const ScenarioChannel &channel, const StrongestPathSelection &selection,
                                       const Eigen::MatrixXcd &unit_directions)
{
    const int K = channel.num_ues();
    if (unit_directions.cols() != K || unit_directions.rows() != channel.num_antennas)
        throw std::invalid_argument("Need one direction per UE.");
    QuadraticSinrModel model;
    for (int k = 0; k <= K; ++k)
        model.offset.push_back(k);
    for (int k = 0; k < K; ++k)
    {
        const auto &Hk = channel.ues[k].steering;
        const int star = selection.index[k];
        QuadraticSinrModel::UeTerms t;
        t.desired.resize(1, 0);
        append_coupling(t.desired, Eigen::VectorXcd::Constant(1, Hk.col(star).dot(unit_directions.col(k))));
        t.self.resize(1, 0);
        for (int l = 0; l < Hk.cols(); ++l)
            if (l != star)
                append_coupling(t.self, Eigen::VectorXcd::Constant(1, Hk.col(l).dot(unit_directions.col(k))));
        for (int kp = 0; kp < K; ++kp)
        {
            if (kp == k)
                continue;
            Eigen::MatrixXd m(1, 0);
            for (int l = 0; l < Hk.cols(); ++l)
                append_coupling(m, Eigen::VectorXcd::Constant(1, Hk.col(l).dot(unit_directions.col(kp))));
            t.cross.push_back({kp, std::move(m)});
        }
        model.ues.push_back(std::move(t));
    }
    return model;
}

RzfResult baseline_rzf(const ScenarioChannel &channel, const StrongestPathSelection &selection,
                       double transmit_power, double noise_power, const ScaOptions &options)
{
    const int K = channel.num_ues();
    const double eps = K * noise_power / transmit_power;
    Eigen::MatrixXcd unit = regularized_inverse(selection.H_star, eps);
    unit.colwise().normalize();
    const QuadraticSinrModel model = baseline_sinr_model(channel, selection, unit);

    RzfResult out;
    out.sca = run_sca(model, transmit_power, noise_power, options);
    out.beams = scaled_columns(unit, out.sca.point.a, Scheme::SpRzf);
    return out;
}

BeamformerSet baseline_beamformers(const ScenarioChannel &channel, const StrongestPathSelection &selection,
                                   Scheme scheme, double transmit_power, double noise_power,
                                   const ScaOptions &options)
{
    const int K = channel.num_ues();
    switch (scheme)
    {
    case Scheme::SpMrt: {
        const Eigen::VectorXd gains = selection.H_star.colwise().squaredNorm().transpose();
        const Eigen::VectorXd p = waterfilling(gains, transmit_power, noise_power).powers;
        return scaled_columns(selection.H_star.colwise().normalized(), p.cwiseSqrt(), scheme);
    }
    case Scheme::SpZf: {
        const Eigen::MatrixXcd W = right_pseudo_inverse(selection.H_star);
        const Eigen::VectorXd norms = W.colwise().norm().transpose();
        // h_k*^H w_k = 1, so the effective gain of the unit direction is 1 / ||w_k||^2.
        const Eigen::VectorXd p = waterfilling(norms.cwiseAbs2().cwiseInverse(), transmit_power, noise_power).powers;
        Eigen::MatrixXcd unit = W;
        for (int k = 0; k < K; ++k)
            unit.col(k) /= norms[k];
        return scaled_columns(unit, p.cwiseSqrt(), scheme);
    }
    case Scheme::SpRzf:
        return baseline_rzf(channel, selection, transmit_power, noise_power, options).beams;
    default:
        break;
    }
    throw std::invalid_argument("Scheme " + to_string(scheme) + " is not a strongest-path scheme.");
}

RateReport baseline_sinr(const BeamformerSet &F, const StrongestPathSelection &selection,
                         const ScenarioChannel &channel, double noise_power)
{
    check_baseline_set(F, channel);
    const int K = channel.num_ues();
    std::vector<UeRate> ues;
    for (int k = 0; k < K; ++k)
    {
        const auto &Hk = channel.ues[k].steering;
        UeRate u;
        for (int l = 0; l < Hk.cols(); ++l)
        {
            // Every tap of UE k has a distinct delay, so each (tap, stream) pair lands on
            // its own symbol offset and adds power incoherently.
            for (int kp = 0; kp < K; ++kp)
            {
                const double p = std::norm(Hk.col(l).dot(F.per_ue[kp].col(0)));
                if (kp != k)
                    u.iui += p;
                else if (l == selection.index[k])
                    u.desired = p;
                else
                    u.isi += p;
            }
        }
        u.noise = noise_power;
        ues.push_back(u);
    }
    return make_report(std::move(ues));
}

StreamPlan baseline_plan(const BeamformerSet &F, const StrongestPathSelection &selection,
                         const ScenarioChannel &channel)
{
    check_baseline_set(F, channel);
    StreamPlan plan;
    for (int k = 0; k < channel.num_ues(); ++k)
    {
        plan.streams.push_back({k, F.per_ue[k].col(0), 0});
        plan.lock_delay.push_back(channel.ues[k].paths[selection.index[k]].delay);
    }
    return plan;
}

} // namespace dam
