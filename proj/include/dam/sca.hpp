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

#ifndef DAM_SCA_HPP
#define DAM_SCA_HPP

#include "dam/beamformers.hpp"

#include <vector>

namespace dam
{

// Real-valued quadratic description of the SINR of every UE as a function of the stacked,
// non-negative amplitude vector a = [a_1; ...; a_K] (one amplitude per stream):
//   P_DS,k  = ||a_k^T desired_k||^2
//   P_ISI,k = ||a_k^T self_k||^2
//   P_IUI,k = sum over cross terms c of ||a_{c.source}^T c.coeff||^2
// Each complex coupling coefficient u occupies a [Re u, Im u] column pair.
struct QuadraticSinrModel
{
    struct Cross
    {
        int source = 0;
        Eigen::MatrixXd coeff; // n_source x 2B
    };
    struct UeTerms
    {
        Eigen::MatrixXd desired; // n_k x 2
        Eigen::MatrixXd self;    // n_k x 2B (may have zero columns)
        std::vector<Cross> cross;
    };

    std::vector<int> offset; // first amplitude of UE k; size K + 1
    std::vector<UeTerms> ues;

    int num_ues() const { return static_cast<int>(ues.size()); }
    int num_vars() const { return offset.empty() ? 0 : offset.back(); }
    int block_size(int k) const { return offset[k + 1] - offset[k]; }

    double desired_power(int k, const Eigen::VectorXd &a) const;
    double isi_power(int k, const Eigen::VectorXd &a) const;
    double iui_power(int k, const Eigen::VectorXd &a) const;
    Eigen::VectorXd sinr(const Eigen::VectorXd &a, double noise_power) const;
    RateReport report(const Eigen::VectorXd &a, double noise_power) const;
};

// Append the [Re u, Im u] column pair of a complex coupling vector.
void append_coupling(Eigen::MatrixXd &m, const Eigen::VectorXcd &u);

// SINR model of path-based RZF with unit-norm directions f~_kl / ||f~_kl||.
QuadraticSinrModel build_rzf_sinr_data(const ScenarioChannel &channel, const DelayGrouping &grouping,
                                       const DirectionSet &directions);

// First-order expansion of f(a, g) = ||a^T U||^2 / g at (a0, g0). Because f is convex on
// g > 0 the expansion never exceeds f.
struct TaylorBound
{
    Eigen::VectorXd a0;
    double gamma0 = 0.0;
    double value0 = 0.0; // f(a0, g0)
    Eigen::VectorXd grad_a;
    double grad_gamma = 0.0;

    double operator()(const Eigen::VectorXd &a, double gamma) const
    {
        return value0 + grad_a.dot(a - a0) + grad_gamma * (gamma - gamma0);
    }
};

// Throws std::invalid_argument when gamma0 <= 0.
TaylorBound sca_taylor_bound(const Eigen::VectorXd &a0, double gamma0, const Eigen::MatrixXd &U);

struct ScaPoint
{
    Eigen::VectorXd a;     // stacked amplitudes
    Eigen::VectorXd gamma; // slack SINRs, one per UE
};

struct SubproblemOptions
{
    double gap_tolerance = 1e-10;      // surrogate duality gap, nats
    double residual_tolerance = 1e-9;  // dual residual
    int max_iterations = 200;
};

struct SubproblemResult
{
    ScaPoint point;
    double objective = 0.0;    // sum_k log2(1 + gamma_k)
    double kkt_residual = 0.0; // in units normalized by sigma^2 and P
    int iterations = 0;
};

// Solves the convex SCA subproblem
//   max  sum_k log2(1 + g_k)
//   s.t. P_ISI,k(a) + P_IUI,k(a) + sigma^2 <= TaylorBound_k(a_k, g_k)   for all k
//        ||a||^2 <= P,  a >= 0,  g >= 0
// with a primal-dual interior-point method on the problem rescaled by P and sigma^2.
// The local point must satisfy the non-linearized constraints.
SubproblemResult solve_sca_subproblem(const QuadraticSinrModel &model, const ScaPoint &local, double transmit_power,
                                      double noise_power, const SubproblemOptions &options = {});

// Objective of the subproblem at a point, with the constraints linearized at `local`:
// each g_k is set to the largest value the constraint allows. Returns -infinity when some
// g_k would be negative or a violates the power/sign constraints.
double sca_surrogate_objective(const QuadraticSinrModel &model, const ScaPoint &local, const Eigen::VectorXd &a,
                               double transmit_power, double noise_power);

struct ScaOptions
{
    double threshold = 1e-3; // stop when the fractional objective increase drops below this
    int max_iterations = 50;
    SubproblemOptions subproblem;
};

struct ScaResult
{
    ScaPoint point;
    std::vector<double> trace; // trace[0] is the initial point, trace[r] after iteration r
    int iterations = 0;
    bool converged = false;
};

// Successive convex approximation from the uniform start a = sqrt(P / n), g = exact SINR.
ScaResult run_sca(const QuadraticSinrModel &model, double transmit_power, double noise_power,
                  const ScaOptions &options = {});

struct RzfResult
{
    BeamformerSet beams;
    ScaResult sca;
};

RzfResult rzf_sca(const ScenarioChannel &channel, const DelayGrouping &grouping, const DirectionSet &directions,
                  double transmit_power, double noise_power, const ScaOptions &options = {});

} // namespace dam

#endif
