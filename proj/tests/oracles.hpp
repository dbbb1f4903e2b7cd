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

// Test-only reference implementations. They are written from the defining sums and
// deliberately avoid the library's grouping, factorization and solver code paths.

#ifndef DAM_TESTS_ORACLES_HPP
#define DAM_TESTS_ORACLES_HPP

#include "dam/channel.hpp"
#include "dam/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

namespace oracle
{

struct Stream
{
    int ue = 0;
    Eigen::VectorXcd beam;
    int delay = 0; // pre-compensation
};

struct Powers
{
    double desired = 0.0;
    double isi = 0.0;
    double iui = 0.0;
};

// Received signal of UE k as a dictionary {(source UE, total delay) -> coefficient}, then
// split by the lock delay. Symbols are unit power and independent across UEs and time.
inline std::vector<Powers> received_powers(const dam::ScenarioChannel &ch, const std::vector<Stream> &streams,
                                           const std::vector<int> &lock)
{
    std::vector<Powers> out(static_cast<std::size_t>(ch.num_ues()));
    for (int k = 0; k < ch.num_ues(); ++k)
    {
        std::map<std::pair<int, int>, dam::cplx> taps;
        for (const auto &s : streams)
            for (int l = 0; l < ch.ues[k].num_paths(); ++l)
            {
                const Eigen::VectorXcd h = ch.ues[k].steering.col(l);
                taps[{s.ue, ch.ues[k].paths[l].delay + s.delay}] += h.dot(s.beam); // h^H f
            }
        for (const auto &[key, c] : taps)
        {
            const double p = std::norm(c);
            if (key.first != k)
                out[k].iui += p;
            else if (key.second == lock[k])
                out[k].desired += p;
            else
                out[k].isi += p;
        }
    }
    return out;
}

inline std::vector<Stream> dam_streams(const dam::ScenarioChannel &ch, const dam::BeamformerSet &F)
{
    std::vector<Stream> s;
    for (int k = 0; k < ch.num_ues(); ++k)
        for (int l = 0; l < ch.ues[k].num_paths(); ++l)
            s.push_back({k, F.per_ue[k].col(l), ch.ues[k].n_max - ch.ues[k].paths[l].delay});
    return s;
}

inline std::vector<int> dam_lock(const dam::ScenarioChannel &ch)
{
    std::vector<int> lock;
    for (const auto &u : ch.ues)
        lock.push_back(u.n_max);
    return lock;
}

// Random complex beams with one column per path (DAM layout).
inline dam::BeamformerSet random_beams(const dam::ScenarioChannel &ch, std::mt19937_64 &rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    dam::BeamformerSet F;
    for (int k = 0; k < ch.num_ues(); ++k)
    {
        Eigen::MatrixXcd f(ch.num_antennas, ch.ues[k].num_paths());
        for (Eigen::Index i = 0; i < f.size(); ++i)
            f(i) = dam::cplx(n(rng), n(rng));
        F.per_ue.push_back(f);
    }
    return F;
}

// H (H^H H)^{-1} through the normal equations.
inline Eigen::MatrixXcd zf_normal_equations(const Eigen::MatrixXcd &H)
{
    const Eigen::MatrixXcd gram = H.adjoint() * H;
    return H * gram.llt().solve(Eigen::MatrixXcd::Identity(H.cols(), H.cols()));
}

// Water-filling by bisection on the water level.
inline Eigen::VectorXd waterfill_bisection(const Eigen::VectorXd &g, double P, double s2)
{
    auto used = [&](double mu) {
        double s = 0.0;
        for (double gi : g)
            s += std::max(0.0, mu - s2 / gi);
        return s;
    };
    double lo = 0.0;
    double hi = P + s2 / g.minCoeff();
    for (int it = 0; it < 200; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (used(mid) < P ? lo : hi) = mid;
    }
    const double mu = 0.5 * (lo + hi);
    Eigen::VectorXd p(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
        p[i] = std::max(0.0, mu - s2 / g[i]);
    return p;
}

inline double rate_sum(const Eigen::VectorXd &p, const Eigen::VectorXd &g, double s2)
{
    double r = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        r += std::log2(1.0 + p[i] * g[i] / s2);
    return r;
}

// Maximum of a function over the box [lo, hi]^d (d = 1 or 2) by repeated zoomed grids.
inline double zoom_grid_max(int d, const Eigen::VectorXd &lo0, const Eigen::VectorXd &hi0,
                            const std::function<double(const Eigen::VectorXd &)> &f, int points = 41, int levels = 12)
{
    Eigen::VectorXd lo = lo0, hi = hi0, best_x = 0.5 * (lo0 + hi0);
    double best = -std::numeric_limits<double>::infinity();
    for (int lev = 0; lev < levels; ++lev)
    {
        const int ny = d == 2 ? points : 1;
        for (int i = 0; i < points; ++i)
            for (int j = 0; j < ny; ++j)
            {
                Eigen::VectorXd x(d);
                x[0] = lo[0] + (hi[0] - lo[0]) * i / (points - 1);
                if (d == 2)
                    x[1] = lo[1] + (hi[1] - lo[1]) * j / (points - 1);
                const double v = f(x);
                if (v > best)
                {
                    best = v;
                    best_x = x;
                }
            }
        const Eigen::VectorXd half = (hi - lo) / 8.0;
        lo = (best_x - half).cwiseMax(lo0);
        hi = (best_x + half).cwiseMin(hi0);
    }
    return best;
}

// Central finite-difference gradient.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd &)> &f, const Eigen::VectorXd &x,
                                   double rel_step = 1e-6)
{
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        const double h = rel_step * std::max(1.0, std::abs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

inline double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace oracle

#endif
