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

#include "dam/errors.hpp"
#include "dam/experiment.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace
{

struct CommonFlags
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> workers;
    std::string out;
    std::string schemes;
};

void add_common(CLI::App *cmd, CommonFlags &f)
{
    cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "Master seed");
    cmd->add_option("--trials", f.trials, "Trials per grid point")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "Output CSV (stdout when omitted)");
    cmd->add_option("--schemes", f.schemes, "Comma separated scheme list, e.g. DAM-ZF,SP-ZF");
}

dam::ExperimentConfig resolve(const CommonFlags &f)
{
    dam::ExperimentConfig c = f.config.empty() ? dam::default_config() : dam::load_config(f.config);
    if (f.seed)
    {
        c.seed = *f.seed;
        c.scenario.rng_seed = *f.seed;
    }
    if (f.trials)
        c.trials = *f.trials;
    if (f.workers)
        c.workers = *f.workers;
    if (!f.schemes.empty())
    {
        c.schemes.clear();
        std::stringstream ss(f.schemes);
        std::string name;
        while (std::getline(ss, name, ','))
            if (!name.empty())
                c.schemes.push_back(dam::parse_scheme(name));
        if (c.schemes.empty())
            throw std::invalid_argument("--schemes lists no scheme.");
    }
    return c;
}

void emit(const std::string &path, const std::string &text)
{
    if (path.empty())
    {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::invalid_argument("Cannot write '" + path + "'.");
    out << text;
}

int sweep(const CommonFlags &f, dam::SweepVariable var, const std::string &trial_log)
{
    const auto config = resolve(f);
    const auto spec = dam::make_sweep_spec(config, var);
    const auto result = dam::run_sweep(spec);
    emit(f.out, dam::sweep_csv(result));
    if (!trial_log.empty())
        emit(trial_log, dam::trial_csv(result, spec));
    if (result.failures > 0)
        std::cerr << "warning: " << result.failures << " trial(s) failed and were excluded from the means\n";
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Multi-user delay alignment modulation simulator"};
    app.require_subcommand(1);

    CommonFlags power_flags, paths_flags, conv_flags, val_flags;
    std::string power_log, paths_log;
    int instances = 5;

    auto *power = app.add_subcommand("sweep-power", "Sum rate versus transmit power (dBm grid)");
    add_common(power, power_flags);
    power->add_option("--trial-log", power_log, "Per-trial CSV with seeds");

    auto *paths = app.add_subcommand("sweep-paths", "Sum rate versus paths per UE");
    add_common(paths, paths_flags);
    paths->add_option("--trial-log", paths_log, "Per-trial CSV with seeds");

    auto *conv = app.add_subcommand("convergence", "SCA objective per iteration on one channel");
    add_common(conv, conv_flags);

    auto *val = app.add_subcommand("validate", "Run the invariant checks on random instances");
    add_common(val, val_flags);
    val->add_option("--instances", instances, "Random instances")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*power)
            return sweep(power_flags, dam::SweepVariable::TransmitPowerDbm, power_log);
        if (*paths)
            return sweep(paths_flags, dam::SweepVariable::PathsPerUe, paths_log);
        if (*conv)
        {
            const auto config = resolve(conv_flags);
            emit(conv_flags.out, dam::convergence_csv(dam::run_convergence_trace(config)));
            return 0;
        }
        if (*val)
        {
            const auto config = resolve(val_flags);
            const auto report = dam::run_validate(config, instances);
            std::ostringstream os;
            os << "check,passed,seed,detail\n";
            for (const auto &c : report.checks)
                os << c.name << "," << (c.passed ? "1" : "0") << "," << c.seed << "," << c.detail << "\n";
            emit(val_flags.out, os.str());
            if (const auto *bad = report.first_failure())
            {
                std::cerr << "error: check '" << bad->name << "' failed on instance seed " << bad->seed << ": "
                          << bad->detail << "\n";
                return 1;
            }
            std::cerr << report.checks.size() << " checks passed\n";
            return 0;
        }
    }
    catch (const dam::InfeasibleError &e)
    {
        std::cerr << "error: infeasible: " << e.what() << "\n";
        return 3;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "error: invalid configuration: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
