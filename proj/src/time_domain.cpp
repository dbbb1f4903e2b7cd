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

#include "dam/time_domain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace dam
{

StreamPlan dam_plan(const BeamformerSet &F, const DelaySchedule &schedule, const ScenarioChannel &channel)
{
    if (static_cast<int>(F.per_ue.size()) != channel.num_ues() ||
        static_cast<int>(schedule.kappa.size()) != channel.num_ues())
        throw std::invalid_argument("Beamformers, schedule and channel disagree on the number of UEs.");
    StreamPlan plan;
    for (int k = 0; k < channel.num_ues(); ++k)
    {
        if (F.per_ue[k].cols() != channel.ues[k].num_paths() ||
            static_cast<int>(schedule.kappa[k].size()) != channel.ues[k].num_paths())
            throw std::invalid_argument("DAM plan needs one beam and one delay per path.");
        for (int l = 0; l < channel.ues[k].num_paths(); ++l)
            plan.streams.push_back({k, F.per_ue[k].col(l), schedule.kappa[k][l]});
        plan.lock_delay.push_back(channel.ues[k].n_max);
    }
    return plan;
}

RateReport simulate_time_domain(const StreamPlan &plan, const ScenarioChannel &channel, double noise_power,
                                const TimeDomainOptions &options)
{
    const int K = channel.num_ues();
    const Eigen::Index M = channel.num_antennas;
    const long N = options.num_symbols;
    const long B = std::max<long>(1, options.block_size);
    if (N < 1)
        throw std::invalid_argument("Number of symbols must be positive.");
    if (static_cast<int>(plan.lock_delay.size()) != K)
        throw std::invalid_argument("Stream plan needs one lock delay per UE.");
    if (noise_power < 0.0)
        throw std::invalid_argument("Noise power cannot be negative.");

    int max_kappa = 0;
    for (const auto &s : plan.streams)
    {
        if (s.ue < 0 || s.ue >= K || s.beam.size() != M || s.precompensation < 0)
            throw std::invalid_argument("Malformed stream in plan.");
        max_kappa = std::max(max_kappa, s.precompensation);
    }
    int max_tap = 0;
    for (const auto &ue : channel.ues)
        max_tap = std::max(max_tap, ue.n_max);
    // Symbols are needed from index -guard on so that every sample in [0, N) sees a
    // fully populated channel memory.
    const long guard = max_kappa + max_tap;

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::bernoulli_distribution coin(0.5);
    const double qpsk = std::sqrt(0.5);
    auto draw = [&]() -> cplx {
        if (options.alphabet == SymbolAlphabet::Qpsk)
            return {coin(rng) ? qpsk : -qpsk, coin(rng) ? qpsk : -qpsk};
        const double re = normal(rng);
        return {re, normal(rng)};
    };

    // symbols[k][m + guard] = s_k[m]
    std::vector<Eigen::VectorXcd> symbols(static_cast<std::size_t>(K));
    for (auto &s : symbols)
    {
        s.resize(N + guard);
        for (Eigen::Index i = 0; i < s.size(); ++i)
            s[i] = draw();
    }
    auto sym = [&](int k, long m) { return symbols[static_cast<std::size_t>(k)][m + guard]; };

    const Eigen::Index S = static_cast<Eigen::Index>(plan.streams.size());
    Eigen::MatrixXcd Fmat(M, S);
    for (Eigen::Index s = 0; s < S; ++s)
        Fmat.col(s) = plan.streams[static_cast<std::size_t>(s)].beam;

    // Regressors for UE k: every (source UE, delay) pair that appears in its received signal.
    struct Regressor
    {
        int ue;
        int delay;
    };
    std::vector<std::vector<Regressor>> regressors(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
    {
        std::map<std::pair<int, int>, int> seen;
        for (const auto &s : plan.streams)
            for (const auto &p : channel.ues[k].paths)
                seen.emplace(std::make_pair(s.ue, p.delay + s.precompensation), 0);
        seen.emplace(std::make_pair(k, plan.lock_delay[k]), 0);
        for (const auto &[key, unused] : seen)
            regressors[k].push_back({key.first, key.second});
    }

    std::vector<Eigen::MatrixXcd> gram(static_cast<std::size_t>(K));
    std::vector<Eigen::VectorXcd> rhs(static_cast<std::size_t>(K));
    std::vector<double> energy(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k)
    {
        const auto R = static_cast<Eigen::Index>(regressors[k].size());
        gram[k] = Eigen::MatrixXcd::Zero(R, R);
        rhs[k] = Eigen::VectorXcd::Zero(R);
    }

    const double noise_std = std::sqrt(noise_power / 2.0);
    std::normal_distribution<double> awgn(0.0, 1.0);

    for (long n0 = 0; n0 < N; n0 += B)
    {
        const long len = std::min(B, N - n0);
        // x[m] for m in [n0 - max_tap, n0 + len)
        const long xlen = len + max_tap;
        Eigen::MatrixXcd shifted(S, xlen);
        for (Eigen::Index s = 0; s < S; ++s)
        {
            const auto &st = plan.streams[static_cast<std::size_t>(s)];
            for (long j = 0; j < xlen; ++j)
                shifted(s, j) = sym(st.ue, n0 - max_tap + j - st.precompensation);
        }
        const Eigen::MatrixXcd X = Fmat * shifted;

        for (int k = 0; k < K; ++k)
        {
            const auto &ue = channel.ues[k];
            // Row l holds h_kl^H x[m]
            const Eigen::MatrixXcd taps = ue.steering.adjoint() * X;
            Eigen::VectorXcd y = Eigen::VectorXcd::Zero(len);
            for (int l = 0; l < ue.num_paths(); ++l)
            {
                const long shift = max_tap - ue.paths[l].delay;
                y += taps.row(l).segment(shift, len).transpose();
            }
            if (options.add_noise && noise_power > 0.0)
                for (long j = 0; j < len; ++j)
                    y[j] += cplx(noise_std * awgn(rng), noise_std * awgn(rng));

            const auto &regs = regressors[k];
            Eigen::MatrixXcd A(len, static_cast<Eigen::Index>(regs.size()));
            for (std::size_t r = 0; r < regs.size(); ++r)
                for (long j = 0; j < len; ++j)
                    A(j, static_cast<Eigen::Index>(r)) = sym(regs[r].ue, n0 + j - regs[r].delay);
            gram[k].noalias() += A.adjoint() * A;
            rhs[k].noalias() += A.adjoint() * y;
            energy[k] += y.squaredNorm();
        }
    }

    std::vector<UeRate> ues;
    for (int k = 0; k < K; ++k)
    {
        const Eigen::VectorXcd coef = gram[k].ldlt().solve(rhs[k]);
        UeRate u;
        const auto &regs = regressors[k];
        for (std::size_t r = 0; r < regs.size(); ++r)
        {
            const double p = std::norm(coef[static_cast<Eigen::Index>(r)]);
            if (regs[r].ue == k && regs[r].delay == plan.lock_delay[k])
                u.desired += p;
            else if (regs[r].ue == k)
                u.isi += p;
            else
                u.iui += p;
        }
        if (options.add_noise)
        {
            const double fitted = std::real(rhs[k].dot(coef));
            u.noise = std::max(0.0, (energy[k] - fitted) / static_cast<double>(N));
        }
        else
        {
            u.noise = noise_power;
        }
        ues.push_back(u);
    }
    return make_report(std::move(ues));
}

} // namespace dam
