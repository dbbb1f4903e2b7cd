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

#ifndef DAM_CHANNEL_HPP
#define DAM_CHANNEL_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace dam
{
using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// dBm <-> W
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// Parameters of one random multi-user scenario. Powers are in watts.
struct ScenarioConfig
{
    int num_antennas = 128;                // M_t
    int num_ues = 2;                       // K
    std::vector<int> paths_per_ue = {5, 5}; // L_k, one entry per UE
    double transmit_power = 1.0;           // P [W]
    double noise_power = dbm_to_watt(-93.0); // sigma^2 [W]
    int max_delay = 40;                    // delays are drawn from {0, ..., max_delay}
    double aod_min_deg = -90.0;
    double aod_max_deg = 90.0;
    double pathloss_db = 0.0;              // global large-scale gain applied to every path
    std::uint64_t rng_seed = 1;

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    int total_paths() const;
};

struct PathParams
{
    cplx gain;     // alpha_kl
    double aod;    // theta_kl [rad]
    int delay = 0; // n_kl [symbols]
};

struct UeChannel
{
    std::vector<PathParams> paths;
    Eigen::MatrixXcd steering; // M_t x L_k, column l = h_kl = alpha_kl * a(theta_kl)
    int n_min = 0;
    int n_max = 0;

    int num_paths() const { return static_cast<int>(paths.size()); }

    // h_bar_k = [h_k1; ...; h_kL], length M_t * L_k
    Eigen::VectorXcd stacked() const;
};

struct ScenarioChannel
{
    int num_antennas = 0;
    std::vector<UeChannel> ues;
    Eigen::MatrixXcd H;           // M_t x L_tot, UE-major / path-minor columns
    std::vector<int> path_offset; // first column of UE k in H; size K + 1

    int num_ues() const { return static_cast<int>(ues.size()); }
    int total_paths() const { return static_cast<int>(H.cols()); }
    int column(int ue, int path) const { return path_offset[ue] + path; }

    // Assemble steering vectors, H and the delay extrema from raw path parameters.
    // Delays of one UE must be pairwise distinct.
    static ScenarioChannel from_paths(int num_antennas, const std::vector<std::vector<PathParams>> &paths);
};

// ULA response with half-wavelength spacing: element m equals exp(-j pi m cos(theta)).
Eigen::VectorXcd array_response(double theta, int num_antennas);

// Draw a channel realization. Per UE, L_k distinct delays are sampled without replacement
// from {0..max_delay}, AoDs uniformly from the configured range, and gains i.i.d.
// CN(0, 10^(pathloss_db/10) / L_k).
ScenarioChannel generate_scenario(const ScenarioConfig &config, std::mt19937_64 &rng);

// Same as above, seeded from config.rng_seed.
ScenarioChannel generate_scenario(const ScenarioConfig &config);

// |a^H b| / (|a| |b|)
double asymptotic_correlation(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b);

} // namespace dam

#endif
