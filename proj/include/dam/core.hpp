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

#ifndef DAM_CORE_HPP
#define DAM_CORE_HPP

#include "dam/channel.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dam
{

enum class Scheme
{
    DamMrt,
    DamZf,
    DamRzf,
    SpMrt,
    SpZf,
    SpRzf,
    DamMrtAsymptotic,
};

std::string to_string(Scheme s);
Scheme parse_scheme(std::string_view name); // "DAM-MRT", "SP-ZF", ...
bool is_strongest_path(Scheme s);

// kappa_kl = n_k,max - n_kl
struct DelaySchedule
{
    std::vector<std::vector<int>> kappa;
};

DelaySchedule compensate_delays(const ScenarioChannel &channel);

// One nonzero effective channel of the delay-difference grouping:
// g_{kk'l'}[offset] = h_{k,path}.
struct BinEntry
{
    int offset = 0;
    int path = 0;
};

struct PairGrouping
{
    int delta_min = 0; // n_k,min - n_k',max
    int delta_max = 0; // n_k,max - n_k',min
    std::vector<std::vector<BinEntry>> by_ref_path; // indexed by l' (path of UE k')

    int span() const { return delta_max - delta_min; }
};

// Delay-difference grouping for every ordered UE pair (k, k'). Only nonzero bins are
// stored; the stacked vectors and G matrices are materialized on request.
class DelayGrouping
{
public:
    static DelayGrouping build(const ScenarioChannel &channel);

    int num_ues() const { return num_ues_; }
    int num_antennas() const { return static_cast<int>(H_.rows()); }
    const PairGrouping &pair(int k, int kp) const { return pairs_[static_cast<std::size_t>(k * num_ues_ + kp)]; }

    // g_{kk'l'}[i]; the zero vector when no path of UE k has delay n_k'l' + i.
    Eigen::VectorXcd effective_channel(int k, int kp, int lp, int i) const;

    // g_bar_{kk'}[i], length M_t * L_k'
    Eigen::VectorXcd stacked(int k, int kp, int i) const;

    // Offsets i that index the columns of G_{kk'}: every i in [delta_min, delta_max],
    // with i = 0 dropped for k == k'.
    std::vector<int> column_offsets(int k, int kp) const;

    // G_{kk'}, M_t L_k' x column_offsets(k, kp).size()
    Eigen::MatrixXcd dense_matrix(int k, int kp) const;

private:
    int num_ues_ = 0;
    std::vector<int> path_offset_;
    std::vector<int> paths_per_ue_;
    Eigen::MatrixXcd H_;
    std::vector<PairGrouping> pairs_;
};

// Transmit vectors of one scheme. per_ue[k] holds one column per transmitted stream of
// UE k: L_k columns for DAM, a single column for the strongest-path schemes.
struct BeamformerSet
{
    Scheme scheme = Scheme::DamMrt;
    std::vector<Eigen::MatrixXcd> per_ue;

    // f_bar_k
    Eigen::VectorXcd stacked(int k) const { return per_ue[static_cast<std::size_t>(k)].reshaped(); }
};

double transmit_power(const BeamformerSet &F);

struct UeRate
{
    double desired = 0.0;
    double isi = 0.0;
    double iui = 0.0;
    double noise = 0.0;
    double sinr = 0.0;
    double rate = 0.0; // log2(1 + sinr)
};

struct RateReport
{
    std::vector<UeRate> ues;
    double sum_rate = 0.0;
};

// Fill sinr/rate from the power terms and accumulate the sum rate.
RateReport make_report(std::vector<UeRate> ues);

// The three algebraically equivalent ways of writing the DAM SINR.
enum class SinrForm
{
    PerPath, // sums of g^H f over bins and paths (sparse, the default)
    Stacked, // |g_bar^H f_bar|^2 per bin
    Matrix,  // ||G^H f_bar||^2
};

// Desired / ISI / IUI powers of a DAM beamformer set with delay pre-compensation and
// lock delay n_k,max.
RateReport analytic_sinr(const BeamformerSet &F, const DelayGrouping &grouping, const ScenarioChannel &channel,
                         double noise_power, SinrForm form = SinrForm::PerPath);

double sum_rate(const RateReport &report);

} // namespace dam

#endif
