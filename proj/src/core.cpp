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

#include "dam/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dam
{

std::string to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::DamMrt:
        return "DAM-MRT";
    case Scheme::DamZf:
        return "DAM-ZF";
    case Scheme::DamRzf:
        return "DAM-RZF";
    case Scheme::SpMrt:
        return "SP-MRT";
    case Scheme::SpZf:
        return "SP-ZF";
    case Scheme::SpRzf:
        return "SP-RZF";
    case Scheme::DamMrtAsymptotic:
        return "DAM-MRT-ASYM";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name)
{
    for (Scheme s : {Scheme::DamMrt, Scheme::DamZf, Scheme::DamRzf, Scheme::SpMrt, Scheme::SpZf, Scheme::SpRzf,
                     Scheme::DamMrtAsymptotic})
        if (to_string(s) == name)
            return s;
    throw std::invalid_argument("Unknown scheme '" + std::string(name) + "'.");
}

bool is_strongest_path(Scheme s)
{
    return s == Scheme::SpMrt || s == Scheme::SpZf || s == Scheme::SpRzf;
}

DelaySchedule compensate_delays(const ScenarioChannel &channel)
{
    DelaySchedule schedule;
    for (const auto &ue : channel.ues)
    {
        std::vector<int> kappa;
        for (const auto &p : ue.paths)
            kappa.push_back(ue.n_max - p.delay);
        schedule.kappa.push_back(std::move(kappa));
    }
    return schedule;
}

DelayGrouping DelayGrouping::build(const ScenarioChannel &channel)
{
    DelayGrouping g;
    g.num_ues_ = channel.num_ues();
    g.path_offset_ = channel.path_offset;
    g.H_ = channel.H;
    for (const auto &ue : channel.ues)
        g.paths_per_ue_.push_back(ue.num_paths());

    for (int k = 0; k < g.num_ues_; ++k)
        for (int kp = 0; kp < g.num_ues_; ++kp)
        {
            const auto &uk = channel.ues[k];
            const auto &ukp = channel.ues[kp];
            PairGrouping pg;
            pg.delta_min = uk.n_min - ukp.n_max;
            pg.delta_max = uk.n_max - ukp.n_min;
            pg.by_ref_path.resize(static_cast<std::size_t>(ukp.num_paths()));
            for (int lp = 0; lp < ukp.num_paths(); ++lp)
                for (int l = 0; l < uk.num_paths(); ++l)
                    pg.by_ref_path[lp].push_back({uk.paths[l].delay - ukp.paths[lp].delay, l});
            g.pairs_.push_back(std::move(pg));
        }
    return g;
}

Eigen::VectorXcd DelayGrouping::effective_channel(int k, int kp, int lp, int i) const
{
    for (const auto &e : pair(k, kp).by_ref_path[lp])
        if (e.offset == i)
            return H_.col(path_offset_[k] + e.path);
    return Eigen::VectorXcd::Zero(H_.rows());
}

Eigen::VectorXcd DelayGrouping::stacked(int k, int kp, int i) const
{
    const Eigen::Index M = H_.rows();
    Eigen::VectorXcd g(M * paths_per_ue_[kp]);
    for (int lp = 0; lp < paths_per_ue_[kp]; ++lp)
        g.segment(lp * M, M) = effective_channel(k, kp, lp, i);
    return g;
}

std::vector<int> DelayGrouping::column_offsets(int k, int kp) const
{
    std::vector<int> cols;
    const auto &pg = pair(k, kp);
    for (int i = pg.delta_min; i <= pg.delta_max; ++i)
        if (k != kp || i != 0)
            cols.push_back(i);
    return cols;
}

Eigen::MatrixXcd DelayGrouping::dense_matrix(int k, int kp) const
{
    const auto cols = column_offsets(k, kp);
    Eigen::MatrixXcd G(H_.rows() * paths_per_ue_[kp], static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        G.col(static_cast<Eigen::Index>(c)) = stacked(k, kp, cols[c]);
    return G;
}

double transmit_power(const BeamformerSet &F)
{
    double p = 0.0;
    for (const auto &m : F.per_ue)
        p += m.squaredNorm();
    return p;
}

RateReport make_report(std::vector<UeRate> ues)
{
    RateReport r;
    for (auto &u : ues)
    {
        const double den = u.isi + u.iui + u.noise;
        u.sinr = den > 0.0 ? u.desired / den : std::numeric_limits<double>::infinity();
        u.rate = std::log2(1.0 + u.sinr);
        r.sum_rate += u.rate;
    }
    r.ues = std::move(ues);
    return r;
}

namespace
{
void check_dimensions(const BeamformerSet &F, const ScenarioChannel &channel)
{
    if (static_cast<int>(F.per_ue.size()) != channel.num_ues())
        throw std::invalid_argument("Beamformer set has " + std::to_string(F.per_ue.size()) + " UEs, channel has " +
                                    std::to_string(channel.num_ues()) + ".");
    for (int k = 0; k < channel.num_ues(); ++k)
    {
        const auto &m = F.per_ue[k];
        if (m.rows() != channel.num_antennas || m.cols() != channel.ues[k].num_paths())
            throw std::invalid_argument("Beamformer set of UE " + std::to_string(k) +
                                        " does not match the channel dimensions.");
    }
}

// |sum_l' g_{kk'l'}[i]^H f_k'l'|^2 summed over the bins of the pair, using only the
// stored nonzero entries.
double pair_power_sparse(const ScenarioChannel &channel, const DelayGrouping &grouping, const BeamformerSet &F, int k,
                         int kp)
{
    const auto &pg = grouping.pair(k, kp);
    std::vector<cplx> bins(static_cast<std::size_t>(pg.span() + 1), cplx(0.0));
    const auto &Hk = channel.ues[k].steering;
    const auto &Fkp = F.per_ue[kp];
    for (int lp = 0; lp < static_cast<int>(pg.by_ref_path.size()); ++lp)
        for (const auto &e : pg.by_ref_path[lp])
            bins[static_cast<std::size_t>(e.offset - pg.delta_min)] += Hk.col(e.path).dot(Fkp.col(lp));

    double p = 0.0;
    for (int i = pg.delta_min; i <= pg.delta_max; ++i)
        if (k != kp || i != 0)
            p += std::norm(bins[static_cast<std::size_t>(i - pg.delta_min)]);
    return p;
}

double pair_power_stacked(const DelayGrouping &grouping, const BeamformerSet &F, int k, int kp)
{
    const Eigen::VectorXcd f = F.stacked(kp);
    double p = 0.0;
    for (int i : grouping.column_offsets(k, kp))
        p += std::norm(grouping.stacked(k, kp, i).dot(f));
    return p;
}

double pair_power_matrix(const DelayGrouping &grouping, const BeamformerSet &F, int k, int kp)
{
    return (grouping.dense_matrix(k, kp).adjoint() * F.stacked(kp)).squaredNorm();
}
} // namespace

RateReport analytic_sinr(const BeamformerSet &F, const DelayGrouping &grouping, const ScenarioChannel &channel,
                         double noise_power, SinrForm form)
{
    check_dimensions(F, channel);
    if (grouping.num_ues() != channel.num_ues() || grouping.num_antennas() != channel.num_antennas)
        throw std::invalid_argument("Delay grouping does not match the channel.");
    if (noise_power < 0.0)
        throw std::invalid_argument("Noise power cannot be negative.");

    auto pair_power = [&](int k, int kp) {
        switch (form)
        {
        case SinrForm::Stacked:
            return pair_power_stacked(grouping, F, k, kp);
        case SinrForm::Matrix:
            return pair_power_matrix(grouping, F, k, kp);
        case SinrForm::PerPath:
            break;
        }
        return pair_power_sparse(channel, grouping, F, k, kp);
    };

    std::vector<UeRate> ues;
    const int K = channel.num_ues();
    for (int k = 0; k < K; ++k)
    {
        UeRate u;
        if (form == SinrForm::PerPath)
        {
            cplx s(0.0);
            for (int l = 0; l < channel.ues[k].num_paths(); ++l)
                s += channel.ues[k].steering.col(l).dot(F.per_ue[k].col(l));
            u.desired = std::norm(s);
        }
        else
        {
            u.desired = std::norm(channel.ues[k].stacked().dot(F.stacked(k)));
        }
        u.isi = pair_power(k, k);
        for (int kp = 0; kp < K; ++kp)
            if (kp != k)
                u.iui += pair_power(k, kp);
        u.noise = noise_power;
        ues.push_back(u);
    }
    return make_report(std::move(ues));
}

double sum_rate(const RateReport &report)
{
    double s = 0.0;
    for (const auto &u : report.ues)
        s += std::log2(1.0 + u.sinr);
    return s;
}

} // namespace dam
