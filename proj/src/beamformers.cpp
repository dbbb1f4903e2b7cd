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

#include "dam/beamformers.hpp"
#include "dam/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dam
{

Eigen::MatrixXcd DirectionSet::normalized() const
{
    Eigen::MatrixXcd out = raw;
    for (Eigen::Index c = 0; c < out.cols(); ++c)
    {
        const double n = out.col(c).norm();
        if (n == 0.0)
            throw std::invalid_argument("Direction " + std::to_string(c) + " has zero norm.");
        out.col(c) /= n;
    }
    return out;
}

Eigen::MatrixXcd right_pseudo_inverse(const Eigen::MatrixXcd &H)
{
    const Eigen::Index M = H.rows();
    const Eigen::Index L = H.cols();
    if (M < L)
        throw InfeasibleError("Zero forcing is infeasible: needs at least as many antennas as paths (M_t = " + std::to_string(M) +
                              ", L_tot = " + std::to_string(L) + ").");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(H);
    const Eigen::MatrixXcd R = qr.matrixR().topLeftCorner(L, L).triangularView<Eigen::Upper>();
    const double largest = std::abs(R(0, 0));
    for (Eigen::Index i = 0; i < L; ++i)
        if (!(std::abs(R(i, i)) > kRankTolerance * largest))
            throw InfeasibleError("Path matrix is rank deficient; zero forcing is infeasible.");

    // H P = Q R  =>  H (H^H H)^{-1} = Q R^{-H} P^T
    const Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(M, L);
    Eigen::MatrixXcd Rinv_h = Eigen::MatrixXcd::Identity(L, L);
    R.adjoint().triangularView<Eigen::Lower>().solveInPlace(Rinv_h);
    return (Q * Rinv_h) * qr.colsPermutation().transpose();
}

Eigen::MatrixXcd regularized_inverse(const Eigen::MatrixXcd &H, double epsilon)
{
    if (!(epsilon >= 0.0))
        throw std::invalid_argument("Regularization must be non-negative.");
    if (epsilon == 0.0)
        return right_pseudo_inverse(H);

    // [H; sqrt(eps) I] = Q R  =>  H^H H + eps I = R^H R
    const Eigen::Index M = H.rows();
    const Eigen::Index L = H.cols();
    Eigen::MatrixXcd A(M + L, L);
    A.topRows(M) = H;
    A.bottomRows(L) = std::sqrt(epsilon) * Eigen::MatrixXcd::Identity(L, L);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    const Eigen::MatrixXcd R = qr.matrixQR().topLeftCorner(L, L).triangularView<Eigen::Upper>();

    Eigen::MatrixXcd X = H.adjoint(); // solve (R^H R) F~^H = H^H
    R.adjoint().triangularView<Eigen::Lower>().solveInPlace(X);
    R.triangularView<Eigen::Upper>().solveInPlace(X);
    return X.adjoint();
}

BeamformerSet mrt(const ScenarioChannel &channel, double transmit_power)
{
    if (!(transmit_power > 0.0))
        throw std::invalid_argument("Transmit power must be positive.");
    const double scale = std::sqrt(transmit_power) / channel.H.norm();
    BeamformerSet F;
    F.scheme = Scheme::DamMrt;
    for (const auto &ue : channel.ues)
        F.per_ue.push_back(scale * ue.steering);
    return F;
}

BeamformerSet mrt_asymptotic(const ScenarioChannel &channel, const Eigen::VectorXd &ue_powers)
{
    if (ue_powers.size() != channel.num_ues())
        throw std::invalid_argument("Need one power per UE.");
    if ((ue_powers.array() < 0.0).any())
        throw std::invalid_argument("UE powers cannot be negative.");
    BeamformerSet F;
    F.scheme = Scheme::DamMrtAsymptotic;
    for (int k = 0; k < channel.num_ues(); ++k)
    {
        const auto &ue = channel.ues[k];
        F.per_ue.push_back(std::sqrt(ue_powers[k]) / ue.steering.norm() * ue.steering);
    }
    return F;
}

DirectionSet zf_directions(const ScenarioChannel &channel)
{
    DirectionSet d;
    d.scheme = Scheme::DamZf;
    d.raw = right_pseudo_inverse(channel.H);
    d.path_offset = channel.path_offset;
    return d;
}

BeamformerSet assemble_zf(const DirectionSet &directions, const PowerVectors &v, double transmit_power)
{
    if (static_cast<int>(v.size()) != directions.num_ues())
        throw std::invalid_argument("Need one power vector per UE.");
    BeamformerSet F;
    F.scheme = directions.scheme;
    double used = 0.0;
    for (int k = 0; k < directions.num_ues(); ++k)
    {
        const int off = directions.path_offset[k];
        const int L = directions.path_offset[k + 1] - off;
        if (v[k].size() != L)
            throw std::invalid_argument("Power vector of UE " + std::to_string(k) + " has the wrong length.");
        if ((v[k].array() < 0.0).any())
            throw std::invalid_argument("Power coefficients cannot be negative.");
        Eigen::MatrixXcd cols = directions.raw.middleCols(off, L);
        for (int l = 0; l < L; ++l)
        {
            cols.col(l) *= std::sqrt(v[k][l]);
            used += cols.col(l).squaredNorm();
        }
        F.per_ue.push_back(std::move(cols));
    }
    if (used > transmit_power * (1.0 + 1e-9))
        throw std::invalid_argument("Power allocation uses " + std::to_string(used) + " W, budget is " +
                                    std::to_string(transmit_power) + " W.");
    return F;
}

double default_rzf_epsilon(int total_paths, double noise_power, double transmit_power)
{
    if (!(transmit_power > 0.0))
        throw std::invalid_argument("Transmit power must be positive.");
    return total_paths * noise_power / transmit_power;
}

DirectionSet rzf_directions(const ScenarioChannel &channel, double epsilon)
{
    DirectionSet d;
    d.scheme = Scheme::DamRzf;
    d.epsilon = epsilon;
    d.raw = regularized_inverse(channel.H, epsilon);
    d.path_offset = channel.path_offset;
    return d;
}

BeamformerSet assemble_rzf(const DirectionSet &directions, const PowerVectors &a)
{
    if (static_cast<int>(a.size()) != directions.num_ues())
        throw std::invalid_argument("Need one power vector per UE.");
    const Eigen::MatrixXcd unit = directions.normalized();
    BeamformerSet F;
    F.scheme = directions.scheme;
    for (int k = 0; k < directions.num_ues(); ++k)
    {
        const int off = directions.path_offset[k];
        const int L = directions.path_offset[k + 1] - off;
        if (a[k].size() != L)
            throw std::invalid_argument("Power vector of UE " + std::to_string(k) + " has the wrong length.");
        if ((a[k].array() < 0.0).any())
            throw std::invalid_argument("Amplitudes cannot be negative.");
        F.per_ue.push_back(unit.middleCols(off, L) * a[k].cast<cplx>().asDiagonal());
    }
    return F;
}

PowerVectors split_by_ue(const Eigen::VectorXd &stacked, const std::vector<int> &path_offset)
{
    if (path_offset.empty() || stacked.size() != path_offset.back())
        throw std::invalid_argument("Stacked vector does not match the UE layout.");
    PowerVectors out;
    for (std::size_t k = 0; k + 1 < path_offset.size(); ++k)
        out.push_back(stacked.segment(path_offset[k], path_offset[k + 1] - path_offset[k]));
    return out;
}

Eigen::VectorXd stack_by_ue(const PowerVectors &blocks)
{
    Eigen::Index n = 0;
    for (const auto &b : blocks)
        n += b.size();
    Eigen::VectorXd out(n);
    n = 0;
    for (const auto &b : blocks)
    {
        out.segment(n, b.size()) = b;
        n += b.size();
    }
    return out;
}

} // namespace dam
