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

#include "dam/experiment.hpp"
#include "dam/errors.hpp"
#include "dam/waterfilling.hpp"

#include "json.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dam
{

std::string to_string(SweepVariable v)
{
    switch (v)
    {
    case SweepVariable::TransmitPowerDbm:
        return "transmit_power_dbm";
    case SweepVariable::PathsPerUe:
        return "paths_per_ue";
    case SweepVariable::Antennas:
        return "antennas";
    }
    return "?";
}

SweepVariable parse_sweep_variable(const std::string &name)
{
    for (auto v : {SweepVariable::TransmitPowerDbm, SweepVariable::PathsPerUe, SweepVariable::Antennas})
        if (to_string(v) == name)
            return v;
    throw std::invalid_argument("Unknown sweep variable '" + name + "'.");
}

ExperimentConfig default_config()
{
    ExperimentConfig c;
    c.scenario.num_antennas = 128;
    c.scenario.num_ues = 2;
    c.scenario.paths_per_ue = {5, 5};
    c.scenario.transmit_power = dbm_to_watt(30.0);
    c.scenario.noise_power = dbm_to_watt(-93.0);
    c.scenario.max_delay = 40;
    c.scenario.aod_min_deg = -90.0;
    c.scenario.aod_max_deg = 90.0;
    c.scenario.pathloss_db = kDefaultPathlossDb;
    c.scenario.rng_seed = 1;
    c.sca.threshold = 1e-3;
    c.sca.max_iterations = 50;
    c.schemes = all_schemes();
    return c;
}

ExperimentConfig parse_config(const std::string &json_text)
{
    using nlohmann::json;
    json j;
    try
    {
        j = json::parse(json_text);
    }
    catch (const json::parse_error &e)
    {
        throw std::invalid_argument(std::string("Config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("Config must be a JSON object.");

    ExperimentConfig c = default_config();
    auto &s = c.scenario;
    bool paths_given = false;
    try
    {
        for (const auto &[key, val] : j.items())
        {
            if (key == "num_antennas")
                s.num_antennas = val.get<int>();
            else if (key == "num_ues")
                s.num_ues = val.get<int>();
            else if (key == "paths_per_ue")
            {
                if (val.is_array())
                    s.paths_per_ue = val.get<std::vector<int>>();
                else
                    s.paths_per_ue.assign(1, val.get<int>());
                paths_given = true;
            }
            else if (key == "transmit_power_dbm")
                s.transmit_power = dbm_to_watt(val.get<double>());
            else if (key == "noise_power_dbm")
                s.noise_power = dbm_to_watt(val.get<double>());
            else if (key == "noise_power_w")
                s.noise_power = val.get<double>();
            else if (key == "max_delay")
                s.max_delay = val.get<int>();
            else if (key == "aod_range_deg")
            {
                const auto r = val.get<std::vector<double>>();
                if (r.size() != 2)
                    throw std::invalid_argument("aod_range_deg needs two entries.");
                s.aod_min_deg = r[0];
                s.aod_max_deg = r[1];
            }
            else if (key == "pathloss_db")
                s.pathloss_db = val.get<double>();
            else if (key == "seed")
            {
                c.seed = val.get<std::uint64_t>();
                s.rng_seed = c.seed;
            }
            else if (key == "trials")
                c.trials = val.get<int>();
            else if (key == "workers")
                c.workers = val.get<int>();
            else if (key == "grid")
                c.grid = val.get<std::vector<double>>();
            else if (key == "schemes")
            {
                c.schemes.clear();
                for (const auto &name : val.get<std::vector<std::string>>())
                    c.schemes.push_back(parse_scheme(name));
            }
            else if (key == "sca_threshold")
                c.sca.threshold = val.get<double>();
            else if (key == "sca_max_iter")
                c.sca.max_iterations = val.get<int>();
            else if (key == "rzf_epsilon")
                c.rzf_epsilon = val.get<double>();
            else
                throw std::invalid_argument("Unknown config key '" + key + "'.");
        }
    }
    catch (const json::exception &e)
    {
        throw std::invalid_argument(std::string("Config value has the wrong type: ") + e.what());
    }

    // A single path count applies to every UE.
    if (s.paths_per_ue.size() == 1 && s.num_ues > 1 && (paths_given || j.contains("num_ues")))
        s.paths_per_ue.assign(static_cast<std::size_t>(s.num_ues), s.paths_per_ue.front());
    else if (!paths_given && static_cast<int>(s.paths_per_ue.size()) != s.num_ues)
        s.paths_per_ue.assign(static_cast<std::size_t>(s.num_ues), s.paths_per_ue.front());

    s.validate();
    if (c.trials < 1)
        throw std::invalid_argument("trials must be at least 1.");
    if (c.workers < 1)
        throw std::invalid_argument("workers must be at least 1.");
    if (!(c.sca.threshold > 0.0) || c.sca.max_iterations < 1)
        throw std::invalid_argument("SCA threshold must be positive and the iteration cap at least 1.");
    if (c.schemes.empty())
        throw std::invalid_argument("At least one scheme is required.");
    return c;
}

ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("Cannot open config file '" + path + "'.");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

SweepSpec make_sweep_spec(const ExperimentConfig &config, SweepVariable variable)
{
    SweepSpec spec;
    spec.variable = variable;
    spec.grid = config.grid;
    if (spec.grid.empty())
    {
        switch (variable)
        {
        case SweepVariable::TransmitPowerDbm:
            spec.grid = {10.0, 15.0, 20.0, 25.0, 30.0};
            break;
        case SweepVariable::PathsPerUe:
            spec.grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
            break;
        case SweepVariable::Antennas:
            spec.grid = {32, 64, 128, 256};
            break;
        }
    }
    spec.schemes = config.schemes;
    spec.trials = config.trials;
    spec.base = config.scenario;
    spec.sca = config.sca;
    spec.rzf_epsilon = config.rzf_epsilon;
    spec.master_seed = config.seed;
    spec.workers = config.workers;
    return spec;
}

const SweepPoint &SweepResult::at(double value, Scheme scheme) const
{
    for (const auto &p : points)
        if (p.value == value && p.scheme == scheme)
            return p;
    throw std::out_of_range("No sweep point for " + to_string(scheme) + " at " + std::to_string(value) + ".");
}

namespace
{
std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string fmt_g9(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}
} // namespace

std::uint64_t trial_seed(std::uint64_t master, int grid_index, int trial)
{
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(grid_index));
    return splitmix64(h ^ (static_cast<std::uint64_t>(trial) << 1 | 1ULL));
}

ScenarioConfig apply_sweep_value(const ScenarioConfig &base, SweepVariable variable, double value)
{
    ScenarioConfig c = base;
    switch (variable)
    {
    case SweepVariable::TransmitPowerDbm:
        c.transmit_power = dbm_to_watt(value);
        break;
    case SweepVariable::PathsPerUe:
        if (value != std::round(value))
            throw std::invalid_argument("Path counts must be integers.");
        c.paths_per_ue.assign(static_cast<std::size_t>(c.num_ues), static_cast<int>(value));
        break;
    case SweepVariable::Antennas:
        if (value != std::round(value))
            throw std::invalid_argument("Antenna counts must be integers.");
        c.num_antennas = static_cast<int>(value);
        break;
    }
    c.validate();
    return c;
}

SweepResult run_sweep(const SweepSpec &spec)
{
    if (spec.grid.empty())
        throw std::invalid_argument("Sweep grid is empty.");
    if (spec.trials < 1)
        throw std::invalid_argument("Sweep needs at least one trial per point.");
    if (spec.schemes.empty())
        throw std::invalid_argument("Sweep needs at least one scheme.");

    std::vector<ScenarioConfig> configs;
    for (double v : spec.grid)
        configs.push_back(apply_sweep_value(spec.base, spec.variable, v));

    const int G = static_cast<int>(spec.grid.size());
    const int S = static_cast<int>(spec.schemes.size());
    const long tasks = static_cast<long>(G) * spec.trials;
    std::vector<TrialRecord> records(static_cast<std::size_t>(tasks * S));

    auto run_task = [&](long task) {
        const int g = static_cast<int>(task / spec.trials);
        const int t = static_cast<int>(task % spec.trials);
        ScenarioConfig cfg = configs[static_cast<std::size_t>(g)];
        cfg.rng_seed = trial_seed(spec.master_seed, g, t);
        SchemeParams params;
        params.transmit_power = cfg.transmit_power;
        params.noise_power = cfg.noise_power;
        params.sca = spec.sca;
        params.rzf_epsilon = spec.rzf_epsilon;
        const ChannelContext ctx = ChannelContext::build(generate_scenario(cfg));
        for (int s = 0; s < S; ++s)
        {
            TrialRecord &rec = records[static_cast<std::size_t>(task * S + s)];
            rec.grid_index = g;
            rec.trial = t;
            rec.seed = cfg.rng_seed;
            rec.scheme = spec.schemes[static_cast<std::size_t>(s)];
            try
            {
                rec.sum_rate = run_scheme(ctx, rec.scheme, params).report.sum_rate;
                if (!std::isfinite(rec.sum_rate))
                {
                    rec.failed = true;
                    rec.error = "non-finite sum rate";
                }
            }
            catch (const std::exception &e)
            {
                rec.failed = true;
                rec.error = e.what();
            }
        }
    };

    const int workers = std::max(1, std::min<int>(spec.workers, static_cast<int>(tasks)));
    if (workers == 1)
    {
        for (long task = 0; task < tasks; ++task)
            run_task(task);
    }
    else
    {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (long task = next++; task < tasks; task = next++)
                    run_task(task);
            });
        for (auto &th : pool)
            th.join();
    }

    SweepResult result;
    result.variable = spec.variable;
    for (int g = 0; g < G; ++g)
        for (int s = 0; s < S; ++s)
        {
            SweepPoint p;
            p.value = spec.grid[static_cast<std::size_t>(g)];
            p.scheme = spec.schemes[static_cast<std::size_t>(s)];
            double sum = 0.0;
            double sum_sq = 0.0;
            for (int t = 0; t < spec.trials; ++t)
            {
                const auto &rec = records[static_cast<std::size_t>((static_cast<long>(g) * spec.trials + t) * S + s)];
                if (rec.failed)
                {
                    ++p.failures;
                    continue;
                }
                ++p.trials;
                sum += rec.sum_rate;
                sum_sq += rec.sum_rate * rec.sum_rate;
            }
            if (p.trials > 0)
            {
                p.mean = sum / p.trials;
                const double var =
                    p.trials > 1 ? std::max(0.0, (sum_sq - p.trials * p.mean * p.mean) / (p.trials - 1)) : 0.0;
                p.stderr_mean = std::sqrt(var / p.trials);
            }
            else
            {
                p.mean = std::numeric_limits<double>::quiet_NaN();
                p.stderr_mean = std::numeric_limits<double>::quiet_NaN();
            }
            result.failures += p.failures;
            result.points.push_back(p);
        }
    result.trials = std::move(records);
    return result;
}

std::string sweep_csv(const SweepResult &result)
{
    std::string out = "sweep_var,value,scheme,mean_sum_rate_bps_hz,stderr,trials,failures\n";
    const std::string var = to_string(result.variable);
    for (const auto &p : result.points)
        out += var + "," + fmt_g9(p.value) + "," + to_string(p.scheme) + "," + fmt_g9(p.mean) + "," +
               fmt_g9(p.stderr_mean) + "," + std::to_string(p.trials) + "," + std::to_string(p.failures) + "\n";
    return out;
}

std::string trial_csv(const SweepResult &result, const SweepSpec &spec)
{
    std::string out = "grid_index,value,trial,seed,scheme,sum_rate_bps_hz,error\n";
    for (const auto &r : result.trials)
    {
        std::string err = r.error;
        for (char &ch : err)
            if (ch == ',' || ch == '\n')
                ch = ';';
        out += std::to_string(r.grid_index) + "," + fmt_g9(spec.grid[static_cast<std::size_t>(r.grid_index)]) + "," +
               std::to_string(r.trial) + "," + std::to_string(r.seed) + "," + to_string(r.scheme) + "," +
               (r.failed ? std::string("nan") : fmt_g9(r.sum_rate)) + "," + err + "\n";
    }
    return out;
}

std::vector<ConvergenceTrace> run_convergence_trace(const ExperimentConfig &config)
{
    const ChannelContext ctx = ChannelContext::build(generate_scenario(config.scenario));
    SchemeParams params;
    params.transmit_power = config.scenario.transmit_power;
    params.noise_power = config.scenario.noise_power;
    params.sca = config.sca;
    params.rzf_epsilon = config.rzf_epsilon;

    std::vector<ConvergenceTrace> traces;
    for (Scheme s : config.schemes)
    {
        if (s != Scheme::DamRzf && s != Scheme::SpRzf)
            continue;
        traces.push_back({s, run_scheme(ctx, s, params).trace});
    }
    if (traces.empty())
        throw std::invalid_argument("Convergence traces need DAM-RZF or SP-RZF among the schemes.");
    return traces;
}

std::string convergence_csv(const std::vector<ConvergenceTrace> &traces)
{
    std::string out = "iteration,objective,scheme\n";
    for (const auto &t : traces)
        for (std::size_t r = 0; r < t.objective.size(); ++r)
            out += std::to_string(r) + "," + fmt_g9(t.objective[r]) + "," + to_string(t.scheme) + "\n";
    return out;
}

bool ValidationReport::passed() const
{
    return first_failure() == nullptr;
}

const ValidationCheck *ValidationReport::first_failure() const
{
    for (const auto &c : checks)
        if (!c.passed)
            return &c;
    return nullptr;
}

namespace
{
bool close_rel(double a, double b, double rel, double floor)
{
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), floor});
}
} // namespace

ValidationReport run_validate(const ExperimentConfig &config, int instances)
{
    config.scenario.validate();
    if (instances < 1)
        throw std::invalid_argument("Validation needs at least one instance.");

    const double P = config.scenario.transmit_power;
    const double s2 = config.scenario.noise_power;
    for (Scheme s : config.schemes)
        if ((s == Scheme::DamZf && config.scenario.num_antennas < config.scenario.total_paths()) ||
            (s == Scheme::SpZf && config.scenario.num_antennas < config.scenario.num_ues))
            throw InfeasibleError(to_string(s) + " is infeasible: M_t = " + std::to_string(config.scenario.num_antennas) +
                                  ", needs at least " +
                                  std::to_string(s == Scheme::DamZf ? config.scenario.total_paths()
                                                                    : config.scenario.num_ues) +
                                  ".");

    SchemeParams params;
    params.transmit_power = P;
    params.noise_power = s2;
    params.sca = config.sca;
    params.rzf_epsilon = config.rzf_epsilon;

    ValidationReport report;
    auto check = [&](const std::string &name, bool ok, const std::string &detail, std::uint64_t seed) {
        report.checks.push_back({name, ok, ok ? std::string() : detail, seed});
    };

    for (int inst = 0; inst < instances; ++inst)
    {
        ScenarioConfig cfg = config.scenario;
        cfg.rng_seed = trial_seed(config.seed, -1, inst);
        const std::uint64_t seed = cfg.rng_seed;
        const ChannelContext ctx = ChannelContext::build(generate_scenario(cfg));
        const auto &ch = ctx.channel;

        for (Scheme s : config.schemes)
        {
            const std::string tag = to_string(s) + ": ";
            const SchemeOutcome out = run_scheme(ctx, s, params);

            const double used = transmit_power(out.beams);
            check(tag + "power budget", used <= P * (1.0 + 1e-9),
                  "uses " + std::to_string(used) + " W of " + std::to_string(P) + " W", seed);

            TimeDomainOptions td;
            td.num_symbols = 20000;
            td.seed = seed ^ 0x5eedULL;
            const RateReport emp = simulate_time_domain(stream_plan(ctx, out.beams), ch, s2, td);
            bool ok = true;
            std::string detail;
            for (int k = 0; k < ch.num_ues(); ++k)
            {
                const auto &a = out.report.ues[k];
                const auto &e = emp.ues[k];
                const double floor = 1e-9 * a.desired;
                for (auto [name, x, y] : {std::tuple{"desired", a.desired, e.desired}, std::tuple{"ISI", a.isi, e.isi},
                                          std::tuple{"IUI", a.iui, e.iui}})
                    if (!close_rel(x, y, 0.01, floor))
                    {
                        ok = false;
                        detail = "UE " + std::to_string(k) + " " + name + ": analytic " + std::to_string(x) +
                                 ", time-domain " + std::to_string(y);
                    }
            }
            check(tag + "time-domain reference", ok, detail, seed);

            if (!is_strongest_path(s))
            {
                const RateReport st = analytic_sinr(out.beams, ctx.grouping, ch, s2, SinrForm::Stacked);
                const RateReport mx = analytic_sinr(out.beams, ctx.grouping, ch, s2, SinrForm::Matrix);
                bool same = true;
                for (int k = 0; k < ch.num_ues(); ++k)
                {
                    const auto &a = out.report.ues[k];
                    const double floor = 1e-12 * a.desired;
                    for (const auto *r : {&st, &mx})
                        same = same && close_rel(a.desired, r->ues[k].desired, 1e-10, floor) &&
                               close_rel(a.isi, r->ues[k].isi, 1e-10, floor) &&
                               close_rel(a.iui, r->ues[k].iui, 1e-10, floor);
                }
                check(tag + "SINR forms agree", same, "per-path, stacked and matrix forms differ", seed);
            }

            if (!out.trace.empty())
            {
                bool mono = true;
                for (std::size_t r = 1; r < out.trace.size(); ++r)
                    mono = mono && out.trace[r] >= out.trace[r - 1] - 1e-9;
                check(tag + "SCA monotone", mono, "objective decreased", seed);
            }
        }

        if (ch.num_antennas >= ch.total_paths())
        {
            const DirectionSet zf = zf_directions(ch);
            const Eigen::MatrixXcd gram = ch.H.adjoint() * zf.raw;
            const double err = (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
            check("ZF nulling", err < 1e-9, "max |H^H W - I| = " + std::to_string(err), seed);

            Eigen::VectorXd q(ch.num_ues());
            const Eigen::VectorXd norms = zf.column_norms();
            for (int k = 0; k < ch.num_ues(); ++k)
                q[k] = norms.segment(ch.path_offset[k], ch.ues[k].num_paths()).cwiseInverse().squaredNorm();
            const auto wf = waterfilling(q, P, s2);
            const double res = waterfilling_kkt_residual(wf, q, P, s2);
            check("ZF water-filling KKT", res < 1e-8, "residual " + std::to_string(res), seed);
        }

        {
            Eigen::VectorXd g(ch.num_ues());
            for (int k = 0; k < ch.num_ues(); ++k)
                g[k] = ch.ues[k].steering.squaredNorm();
            const auto wf = waterfilling(g, P, s2);
            const double res = waterfilling_kkt_residual(wf, g, P, s2);
            check("MRT water-filling KKT", res < 1e-8, "residual " + std::to_string(res), seed);
        }

        {
            const QuadraticSinrModel model = build_rzf_sinr_data(
                ch, ctx.grouping,
                rzf_directions(ch, config.rzf_epsilon.value_or(default_rzf_epsilon(ch.total_paths(), s2, P))));
            std::mt19937_64 rng(seed ^ 0x7a710bULL);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            bool ok = true;
            for (int k = 0; k < model.num_ues() && ok; ++k)
            {
                const int n = model.block_size(k);
                Eigen::VectorXd a0(n);
                for (auto &v : a0)
                    v = std::sqrt(P / model.num_vars()) * (0.5 + u(rng));
                const double p0 = (a0.transpose() * model.ues[k].desired).squaredNorm();
                const double g0 = p0 / s2 * (0.1 + u(rng));
                const TaylorBound tb = sca_taylor_bound(a0, g0, model.ues[k].desired);
                ok = ok && close_rel(tb(a0, g0), p0 / g0, 1e-12, 0.0);
                for (int probe = 0; probe < 100 && ok; ++probe)
                {
                    Eigen::VectorXd a(n);
                    for (auto &v : a)
                        v = 2.0 * std::sqrt(P / model.num_vars()) * u(rng);
                    const double g = g0 * (0.01 + 3.0 * u(rng));
                    const double f = (a.transpose() * model.ues[k].desired).squaredNorm() / g;
                    ok = tb(a, g) <= f + 1e-10 * std::max(f, p0 / g0);
                }
            }
            check("Taylor lower bound", ok, "bound exceeds the function or is not tight", seed);
        }
    }
    return report;
}

} // namespace dam
