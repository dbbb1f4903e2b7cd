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

#ifndef DAM_BEAMFORMERS_HPP
#define DAM_BEAMFORMERS_HPP

#include "dam/core.hpp"

#include <vector>

namespace dam
{

// Relative threshold on the diagonal of the triangular factor below which a path matrix
// is declared rank deficient.
constexpr double kRankTolerance = 1e-10;

// Per-UE power coefficients; entry k has one value per stream of UE k.
using PowerVectors = std::vector<Eigen::VectorXd>;

// Unnormalized per-path beam directions of the linear precoders.
struct DirectionSet
{
    Scheme scheme = Scheme::DamZf;
    Eigen::MatrixXcd raw;         // W (ZF) or F~ (RZF); one column per path, same order as H
    double epsilon = 0.0;         // RZF regularization
    std::vector<int> path_offset; // first column of UE k; size K + 1

    int num_ues() const { return static_cast<int>(path_offset.size()) - 1; }
    Eigen::VectorXd column_norms() const { return raw.colwise().norm().transpose(); }
    Eigen::MatrixXcd normalized() const;
};

// W with H^H W = I, computed as Q R^{-H} P^T from a column-pivoted QR of H.
// Throws InfeasibleError when H has more columns than rows or is rank deficient.
Eigen::MatrixXcd right_pseudo_inverse(const Eigen::MatrixXcd &H);

// H (H^H H + eps I)^{-1}, computed from the QR factor of [H; sqrt(eps) I].
Eigen::MatrixXcd regularized_inverse(const Eigen::MatrixXcd &H, double epsilon);

// f_kl = sqrt(P) h_kl / ||H||_F
BeamformerSet mrt(const ScenarioChannel &channel, double transmit_power);

// f_kl = sqrt(p_k) h_kl / ||h_bar_k||
BeamformerSet mrt_asymptotic(const ScenarioChannel &channel, const Eigen::VectorXd &ue_powers);

DirectionSet zf_directions(const ScenarioChannel &channel);

// f_kl = sqrt(v_kl) w_kl. Throws std::invalid_argument when v is negative or the
// resulting power exceeds transmit_power.
BeamformerSet assemble_zf(const DirectionSet &directions, const PowerVectors &v, double transmit_power);

// eps = L_tot sigma^2 / P
double default_rzf_epsilon(int total_paths, double noise_power, double transmit_power);

DirectionSet rzf_directions(const ScenarioChannel &channel, double epsilon);

// f_kl = a_kl f~_kl / ||f~_kl||
BeamformerSet assemble_rzf(const DirectionSet &directions, const PowerVectors &a);

// Split a stacked vector into per-UE blocks following path_offset.
PowerVectors split_by_ue(const Eigen::VectorXd &stacked, const std::vector<int> &path_offset);
Eigen::VectorXd stack_by_ue(const PowerVectors &blocks);

} // namespace dam

#endif
