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

#ifndef DAM_EXPERIMENT_HPP
#define DAM_EXPERIMENT_HPP

#include "dam/schemes.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dam
{

// Large-scale attenuation applied to every path in the default experiment. It places the
// 128-antenna link in the same SNR regime as a 28 GHz non-line-of-sight link of roughly
// 100 m, where MRT is noise-limited up to about 20 dBm transmit power.
constexpr double kDefaultPathlossDb = -116.0;

enum class SweepVariable
{
    TransmitPowerDbm,
    PathsPerUe,
    Antennas,
};

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string &name);

struct ExperimentConfig
{
    ScenarioConfig scenario;
    ScaOptions sca;
    std::optional<double> rzf_epsilon;
    std::vector<Scheme> schemes;
    std::vector<double> grid; // empty: the sweep's default grid
    int trials = 200;
    std::uint64_t seed = 1;
    int workers = 1;
};

// M_t = 128, K = 2, L = [5, 5], delays in [0, 40], AoDs in [-90, 90] deg,
// sigma^2 = -93 dBm, P = 30 dBm, all six schemes.
ExperimentConfig default_config();

// JSON object whose keys override default_config(). Powers are given in dBm
// ("transmit_power_dbm", "noise_power_dbm") or watts ("noise_power_w"). Unknown keys
// and invalid scenarios are rejected with std::invalid_argument.
ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config(const std::string &path);

struct SweepSpec
{
    SweepVariable variable = SweepVariable::TransmitPowerDbm;
    std::vector<double> grid;
    std::vector<Scheme> schemes;
    int trials = 200;
    ScenarioConfig base;
    ScaOptions sca;
    std::optional<double> rzf_epsilon;
    std::uint64_t master_seed = 1;
    int workers = 1;
};

SweepSpec make_sweep_spec(const ExperimentConfig &config, SweepVariable variable);

struct SweepPoint
{
    double value = 0.0;
    Scheme scheme = Scheme::DamMrt;
    double mean = 0.0;
    double stderr_mean = 0.0;
    int trials = 0;   // successful trials entering the mean
    int failures = 0; // trials where the scheme threw
};

struct TrialRecord
{
    int grid_index = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::DamMrt;
    double sum_rate = 0.0;
    bool failed = false;
    std::string error;
};

struct SweepResult
{
    SweepVariable variable = SweepVariable::TransmitPowerDbm;
    std::vector<SweepPoint> points; // grid-major, scheme-minor
    std::vector<TrialRecord> trials;
    int failures = 0;

    const SweepPoint &at(double value, Scheme scheme) const;
};

// Channel seed of trial t at grid index g. Distinct (g, t) give unrelated streams.
std::uint64_t trial_seed(std::uint64_t master, int grid_index, int trial);

ScenarioConfig apply_sweep_value(const ScenarioConfig &base, SweepVariable variable, double value);

// Output depends only on the spec, not on the number of workers.
SweepResult run_sweep(const SweepSpec &spec);

// sweep_var,value,scheme,mean_sum_rate_bps_hz,stderr,trials,failures
std::string sweep_csv(const SweepResult &result);
// grid_index,value,trial,seed,scheme,sum_rate_bps_hz,error
std::string trial_csv(const SweepResult &result, const SweepSpec &spec);

struct ConvergenceTrace
{
    Scheme scheme = Scheme::DamRzf;
    std::vector<double> objective;
};

// SCA traces of the RZF schemes for the realization seeded by config.scenario.rng_seed.
std::vector<ConvergenceTrace> run_convergence_trace(const ExperimentConfig &config);

// iteration,objective,scheme
std::string convergence_csv(const std::vector<ConvergenceTrace> &traces);

struct ValidationCheck
{
    std::string name;
    bool passed = true;
    std::string detail;
    std::uint64_t seed = 0;
};

struct ValidationReport
{
    std::vector<ValidationCheck> checks;

    bool passed() const;
    const ValidationCheck *first_failure() const;
};

// Invariant suite on `instances` fresh realizations: time-domain reference vs analytic
// SINR, agreement of the SINR forms, ZF nulling, power budgets, Taylor bound validity,
// water-filling KKT and SCA monotonicity. Throws InfeasibleError when a requested scheme
// cannot be built for the configured dimensions.
ValidationReport run_validate(const ExperimentConfig &config, int instances);

} // namespace dam

#endif
