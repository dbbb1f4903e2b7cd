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

#include "dam/sca.hpp"
#include "dam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace dam
{

double QuadraticSinrModel::desired_power(int k, const Eigen::VectorXd &a) const
{
    return (a.segment(offset[k], block_size(k)).transpose() * ues[k].desired).squaredNorm();
}

double QuadraticSinrModel::isi_power(int k, const Eigen::VectorXd &a) const
{
    const auto &self = ues[k].self;
    if (self.cols() == 0)
        return 0.0;
    return (a.segment(offset[k], block_size(k)).transpose() * self).squaredNorm();
}

double QuadraticSinrModel::iui_power(int k, const Eigen::VectorXd &a) const
{
    double p = 0.0;
    for (const auto &c : ues[k].cross)
        if (c.coeff.cols() > 0)
            p += (a.segment(offset[c.source], block_size(c.source)).transpose() * c.coeff).squaredNorm();
    return p;
}

Eigen::VectorXd QuadraticSinrModel::sinr(const Eigen::VectorXd &a, double noise_power) const
{
    Eigen::VectorXd g(num_ues());
    for (int k = 0; k < num_ues(); ++k)
        g[k] = desired_power(k, a) / (isi_power(k, a) + iui_power(k, a) + noise_power);
    return g;
}

RateReport QuadraticSinrModel::report(const Eigen::VectorXd &a, double noise_power) const
{
    std::vector<UeRate> out;
    for (int k = 0; k < num_ues(); ++k)
    {
        UeRate u;
        u.desired = desired_power(k, a);
        u.isi = isi_power(k, a);
        u.iui = iui_power(k, a);
        u.noise = noise_power;
        out.push_back(u);
    }
    return make_report(std::move(out));
}

void append_coupling(Eigen::MatrixXd &m, const Eigen::VectorXcd &u)
{
    if (m.cols() > 0 && m.rows() != u.size())
        throw std::invalid_argument("Coupling vector length does not match the block size.");
    const Eigen::Index c = m.cols();
    m.conservativeResize(u.size(), c + 2);
    m.col(c) = u.real();
    m.col(c + 1) = u.imag();
}

QuadraticSinrModel build_rzf_sinr_data(const ScenarioChannel &channel, const DelayGrouping &grouping,
                                       const DirectionSet &directions)
{
    if (directions.raw.rows() != channel.num_antennas || directions.raw.cols() != channel.total_paths() ||
        directions.path_offset != channel.path_offset)
        throw std::invalid_argument("Direction set does not match the channel.");
    if (grouping.num_ues() != channel.num_ues())
        throw std::invalid_argument("Delay grouping does not match the channel.");

    const Eigen::MatrixXcd unit = directions.normalized();
    QuadraticSinrModel model;
    model.offset = channel.path_offset;
    const int K = channel.num_ues();
    for (int k = 0; k < K; ++k)
    {
        const auto &Hk = channel.ues[k].steering;
        const int Lk = channel.ues[k].num_paths();
        QuadraticSinrModel::UeTerms t;

        Eigen::VectorXcd u(Lk);
        for (int l = 0; l < Lk; ++l)
            u[l] = Hk.col(l).dot(unit.col(channel.column(k, l)));
        t.desired.resize(Lk, 0);
        append_coupling(t.desired, u);

        for (int kp = 0; kp < K; ++kp)
        {
            const int Lkp = channel.ues[kp].num_paths();
            const auto &pg = grouping.pair(k, kp);
            std::map<int, Eigen::VectorXcd> bins;
            for (int lp = 0; lp < Lkp; ++lp)
                for (const auto &e : pg.by_ref_path[lp])
                {
                    if (kp == k && e.offset == 0)
                        continue;
                    auto &v = bins.try_emplace(e.offset, Eigen::VectorXcd::Zero(Lkp)).first->second;
                    v[lp] = Hk.col(e.path).dot(unit.col(channel.column(kp, lp)));
                }
            Eigen::MatrixXd m(Lkp, 0);
            for (const auto &[i, v] : bins)
                append_coupling(m, v);
            if (kp == k)
                t.self = std::move(m);
            else
                t.cross.push_back({kp, std::move(m)});
        }
        model.ues.push_back(std::move(t));
    }
    return model;
}

TaylorBound sca_taylor_bound(const Eigen::VectorXd &a0, double gamma0, const Eigen::MatrixXd &U)
{
    if (!(gamma0 > 0.0))
        throw std::invalid_argument("Taylor expansion point needs a positive slack SINR.");
    if (U.rows() != a0.size())
        throw std::invalid_argument("Amplitude vector does not match the coupling matrix.");
    const Eigen::VectorXd Ua = U.transpose() * a0;
    const double p = Ua.squaredNorm();

    TaylorBound tb;
    tb.a0 = a0;
    tb.gamma0 = gamma0;
    tb.value0 = p / gamma0;
    tb.grad_a = (2.0 / gamma0) * (U * Ua);
    tb.grad_gamma = -p / (gamma0 * gamma0);
    return tb;
}

namespace
{

// The SCA subproblem in normalized units: alpha = a / sqrt(P), powers divided by sigma^2.
// Variables x = [alpha; gamma]. Constraint order: K interference constraints, the power
// budget, alpha >= 0, gamma >= 0.
class ScaledSubproblem
{
public:
    ScaledSubproblem(const QuadraticSinrModel &model, const ScaPoint &local, double P, double noise)
        : model_(model), n_(model.num_vars()), K_(model.num_ues()), m_(2 * K_ + 1 + n_)
    {
        const double s2 = P / noise;
        const double s = std::sqrt(s2);
        const Eigen::VectorXd alpha_r = local.a / std::sqrt(P);
        for (int k = 0; k < K_; ++k)
        {
            const auto &t = model.ues[k];
            Terms terms;
            terms.self_gram = s2 * (t.self * t.self.transpose());
            for (const auto &c : t.cross)
                terms.cross_gram.emplace_back(c.source, s2 * (c.coeff * c.coeff.transpose()));
            const TaylorBound tb = sca_taylor_bound(block(alpha_r, k), local.gamma[k], s * t.desired);
            terms.c = tb.grad_a;
            terms.d = -tb.grad_gamma;
            terms.constant = tb.value0 - tb.grad_a.dot(tb.a0) + terms.d * tb.gamma0;
            if (!(terms.d > 0.0))
                throw SolverError("UE " + std::to_string(k) + " has no desired signal at the local point.");
            terms_.push_back(std::move(terms));
        }
    }

    int num_x() const { return n_ + K_; }
    int num_constraints() const { return m_; }
    int num_vars() const { return n_; }
    int num_ues() const { return K_; }

    Eigen::VectorXd block(const Eigen::VectorXd &alpha, int k) const
    {
        return alpha.segment(model_.offset[k], model_.block_size(k));
    }

    // P_ISI + P_IUI + 1 at alpha (normalized)
    double interference(int k, const Eigen::VectorXd &alpha) const
    {
        const auto &t = terms_[k];
        const Eigen::VectorXd ak = block(alpha, k);
        double v = ak.dot(t.self_gram * ak) + 1.0;
        for (const auto &[src, G] : t.cross_gram)
        {
            const Eigen::VectorXd as = block(alpha, src);
            v += as.dot(G * as);
        }
        return v;
    }

    // Largest gamma_k allowed by the linearized constraint at alpha.
    double gamma_max(int k, const Eigen::VectorXd &alpha) const
    {
        const auto &t = terms_[k];
        return (t.constant + t.c.dot(block(alpha, k)) - interference(k, alpha)) / t.d;
    }

    Eigen::VectorXd constraints(const Eigen::VectorXd &x) const
    {
        const Eigen::VectorXd alpha = x.head(n_);
        Eigen::VectorXd g(m_);
        for (int k = 0; k < K_; ++k)
        {
            const auto &t = terms_[k];
            g[k] = interference(k, alpha) - t.constant - t.c.dot(block(alpha, k)) + t.d * x[n_ + k];
        }
        g[K_] = alpha.squaredNorm() - 1.0;
        g.segment(K_ + 1, n_) = -alpha;
        g.segment(K_ + 1 + n_, K_) = -x.tail(K_);
        return g;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd &x) const
    {
        const Eigen::VectorXd alpha = x.head(n_);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m_, num_x());
        for (int k = 0; k < K_; ++k)
        {
            const auto &t = terms_[k];
            const int off = model_.offset[k];
            const int nk = model_.block_size(k);
            D.block(k, off, 1, nk) += (2.0 * t.self_gram * block(alpha, k) - t.c).transpose();
            for (const auto &[src, G] : t.cross_gram)
                D.block(k, model_.offset[src], 1, model_.block_size(src)) += (2.0 * G * block(alpha, src)).transpose();
            D(k, n_ + k) = t.d;
        }
        D.block(K_, 0, 1, n_) = 2.0 * alpha.transpose();
        for (int i = 0; i < n_; ++i)
            D(K_ + 1 + i, i) = -1.0;
        for (int k = 0; k < K_; ++k)
            D(K_ + 1 + n_ + k, n_ + k) = -1.0;
        return D;
    }

    Eigen::VectorXd objective_gradient(const Eigen::VectorXd &x) const
    {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(num_x());
        for (int k = 0; k < K_; ++k)
            g[n_ + k] = -1.0 / (1.0 + x[n_ + k]);
        return g;
    }

    Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd &x, const Eigen::VectorXd &lambda) const
    {
        Eigen::MatrixXd Hs = Eigen::MatrixXd::Zero(num_x(), num_x());
        for (int k = 0; k < K_; ++k)
        {
            const auto &t = terms_[k];
            const int off = model_.offset[k];
            const int nk = model_.block_size(k);
            Hs.block(off, off, nk, nk) += 2.0 * lambda[k] * t.self_gram;
            for (const auto &[src, G] : t.cross_gram)
            {
                const int so = model_.offset[src];
                const int ns = model_.block_size(src);
                Hs.block(so, so, ns, ns) += 2.0 * lambda[k] * G;
            }
            const double q = 1.0 + x[n_ + k];
            Hs(n_ + k, n_ + k) += 1.0 / (q * q);
        }
        Hs.topLeftCorner(n_, n_).diagonal().array() += 2.0 * lambda[K_];
        return Hs;
    }

    // Stacked primal-dual residual for barrier parameter t.
    Eigen::VectorXd residual(const Eigen::VectorXd &x, const Eigen::VectorXd &lambda, double t) const
    {
        const Eigen::VectorXd g = constraints(x);
        Eigen::VectorXd r(num_x() + m_);
        r.head(num_x()) = objective_gradient(x) + jacobian(x).transpose() * lambda;
        r.tail(m_) = -lambda.cwiseProduct(g) - Eigen::VectorXd::Constant(m_, 1.0 / t);
        return r;
    }

private:
    struct Terms
    {
        Eigen::MatrixXd self_gram;
        std::vector<std::pair<int, Eigen::MatrixXd>> cross_gram;
        Eigen::VectorXd c;
        double d = 0.0;
        double constant = 0.0;
    };

    const QuadraticSinrModel &model_;
    int n_;
    int K_;
    int m_;
    std::vector<Terms> terms_;
};

void check_local_point(const QuadraticSinrModel &model, const ScaPoint &local)
{
    if (local.a.size() != model.num_vars() || local.gamma.size() != model.num_ues())
        throw std::invalid_argument("Local point does not match the SINR model.");
    if ((local.a.array() < 0.0).any())
        throw std::invalid_argument("Local point has negative amplitudes.");
    if (!(local.gamma.array() > 0.0).all())
        throw std::invalid_argument("Local point needs positive slack SINRs.");
}

} // namespace

SubproblemResult solve_sca_subproblem(const QuadraticSinrModel &model, const ScaPoint &local, double transmit_power,
                                      double noise_power, const SubproblemOptions &options)
{
    if (!(transmit_power > 0.0))
        throw std::invalid_argument("Transmit power must be positive.");
    if (!(noise_power > 0.0))
        throw std::invalid_argument("Noise power must be positive.");
    check_local_point(model, local);

    const ScaledSubproblem prob(model, local, transmit_power, noise_power);
    const int n = prob.num_vars();
    const int K = prob.num_ues();
    const int m = prob.num_constraints();

    // Strictly feasible start: pull the local point slightly towards a positive interior
    // point and back off the slack SINRs from their bounds.
    Eigen::VectorXd alpha_r = local.a / std::sqrt(transmit_power);
    const double norm_r = alpha_r.norm();
    if (norm_r > 1.0)
        alpha_r /= norm_r;
    constexpr double kShrink = 1e-2;
    Eigen::VectorXd x(prob.num_x());
    x.head(n) = (1.0 - kShrink) * alpha_r + Eigen::VectorXd::Constant(n, kShrink * 0.5 / std::sqrt(double(n)));
    for (int k = 0; k < K; ++k)
    {
        const double gmax = prob.gamma_max(k, x.head(n));
        if (!(gmax > 0.0))
            throw SolverError("Local point is infeasible for the SCA subproblem (UE " + std::to_string(k) + ").");
        x[n + k] = 0.9 * gmax;
    }
    Eigen::VectorXd g = prob.constraints(x);
    if (!(g.array() < 0.0).all())
        throw SolverError("Could not construct a strictly feasible starting point.");
    Eigen::VectorXd lambda = (-g).cwiseInverse();

    constexpr double kMu = 10.0;
    constexpr double kAlpha = 0.01;
    constexpr double kBeta = 0.5;

    SubproblemResult result;
    bool done = false;
    double s_prev = 1.0;
    for (int it = 0; it < options.max_iterations; ++it)
    {
        g = prob.constraints(x);
        const Eigen::MatrixXd D = prob.jacobian(x);
        const double gap = -g.dot(lambda);
        const Eigen::VectorXd r_dual = prob.objective_gradient(x) + D.transpose() * lambda;
        result.iterations = it;
        if (r_dual.norm() <= options.residual_tolerance && gap <= options.gap_tolerance)
        {
            done = true;
            break;
        }

        // Short steps mean the curved power constraint is in the way; recenter before pushing t.
        const double t = (s_prev > 0.5 ? kMu : (s_prev > 0.1 ? 2.0 : 1.0)) * m / gap;
        const Eigen::VectorXd r_cent = -lambda.cwiseProduct(g) - Eigen::VectorXd::Constant(m, 1.0 / t);
        const Eigen::VectorXd ratio = lambda.cwiseQuotient(g); // negative
        const Eigen::MatrixXd A = prob.lagrangian_hessian(x, lambda) - D.transpose() * ratio.asDiagonal() * D;
        const Eigen::VectorXd rhs = -r_dual - D.transpose() * r_cent.cwiseQuotient(g);
        const Eigen::VectorXd dx = A.ldlt().solve(rhs);
        const Eigen::VectorXd dlambda = (r_cent - lambda.cwiseProduct(D * dx)).cwiseQuotient(g);

        double s = 1.0;
        for (int i = 0; i < m; ++i)
            if (dlambda[i] < 0.0)
                s = std::min(s, -lambda[i] / dlambda[i]);
        s *= 0.99;

        const double r0 = prob.residual(x, lambda, t).norm();
        while (s > 1e-16)
        {
            const Eigen::VectorXd xn = x + s * dx;
            if ((prob.constraints(xn).array() < 0.0).all())
                break;
            s *= kBeta;
        }
        while (s > 1e-16 && prob.residual(x + s * dx, lambda + s * dlambda, t).norm() > (1.0 - kAlpha * s) * r0)
            s *= kBeta;
        if (s <= 1e-16)
        {
            // Stalled at the limit of floating point; accept if close enough.
            if (r_dual.norm() <= 1e3 * options.residual_tolerance && gap <= 1e3 * options.gap_tolerance)
            {
                done = true;
                break;
            }
            throw SolverError("SCA subproblem line search stalled.");
        }
        x += s * dx;
        lambda += s * dlambda;
        s_prev = s;
    }
    if (!done)
        throw SolverError("SCA subproblem did not converge within " + std::to_string(options.max_iterations) +
                          " iterations.");

    g = prob.constraints(x);
    const Eigen::VectorXd r_dual = prob.objective_gradient(x) + prob.jacobian(x).transpose() * lambda;
    result.kkt_residual = std::max({r_dual.cwiseAbs().maxCoeff(), lambda.cwiseProduct(g).cwiseAbs().maxCoeff(),
                                    std::max(0.0, g.maxCoeff()), std::max(0.0, -lambda.minCoeff())});

    result.point.a = std::sqrt(transmit_power) * x.head(n);
    result.point.gamma = x.tail(K);
    result.objective = 0.0;
    for (int k = 0; k < K; ++k)
        result.objective += std::log2(1.0 + result.point.gamma[k]);
    return result;
}

double sca_surrogate_objective(const QuadraticSinrModel &model, const ScaPoint &local, const Eigen::VectorXd &a,
                               double transmit_power, double noise_power)
{
    check_local_point(model, local);
    if (a.size() != model.num_vars())
        throw std::invalid_argument("Amplitude vector does not match the SINR model.");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    if ((a.array() < 0.0).any() || a.squaredNorm() > transmit_power * (1.0 + 1e-12))
        return -kInf;

    double obj = 0.0;
    for (int k = 0; k < model.num_ues(); ++k)
    {
        const auto ak0 = local.a.segment(model.offset[k], model.block_size(k));
        const auto ak = a.segment(model.offset[k], model.block_size(k));
        const TaylorBound tb = sca_taylor_bound(ak0, local.gamma[k], model.ues[k].desired);
        const double slack = tb.value0 + tb.grad_a.dot(ak - ak0) - model.isi_power(k, a) - model.iui_power(k, a) -
                             noise_power;
        const double gamma = tb.gamma0 + slack / (-tb.grad_gamma);
        if (gamma < 0.0)
            return -kInf;
        obj += std::log2(1.0 + gamma);
    }
    return obj;
}

ScaResult run_sca(const QuadraticSinrModel &model, double transmit_power, double noise_power,
                  const ScaOptions &options)
{
    if (!(options.threshold > 0.0))
        throw std::invalid_argument("SCA threshold must be positive.");
    if (options.max_iterations < 1)
        throw std::invalid_argument("SCA needs at least one iteration.");
    if (!(noise_power > 0.0))
        throw std::invalid_argument("Noise power must be positive.");

    const int n = model.num_vars();
    ScaResult res;
    res.point.a = Eigen::VectorXd::Constant(n, std::sqrt(transmit_power / n));
    res.point.gamma = model.sinr(res.point.a, noise_power);
    if (!(res.point.gamma.array() > 0.0).all())
        throw SolverError("Uniform power start has a UE without desired signal.");

    auto objective = [](const Eigen::VectorXd &gamma) {
        double s = 0.0;
        for (double v : gamma)
            s += std::log2(1.0 + v);
        return s;
    };
    res.trace.push_back(objective(res.point.gamma));

    for (int r = 1; r <= options.max_iterations; ++r)
    {
        const SubproblemResult sub =
            solve_sca_subproblem(model, res.point, transmit_power, noise_power, options.subproblem);
        const double prev = res.trace.back();
        res.point = sub.point;
        res.trace.push_back(sub.objective);
        res.iterations = r;
        if ((sub.objective - prev) / std::max(std::abs(prev), 1e-12) < options.threshold)
        {
            res.converged = true;
            break;
        }
    }
    return res;
}

RzfResult rzf_sca(const ScenarioChannel &channel, const DelayGrouping &grouping, const DirectionSet &directions,
                  double transmit_power, double noise_power, const ScaOptions &options)
{
    const QuadraticSinrModel model = build_rzf_sinr_data(channel, grouping, directions);
    RzfResult out;
    out.sca = run_sca(model, transmit_power, noise_power, options);
    out.beams = assemble_rzf(directions, split_by_ue(out.sca.point.a, directions.path_offset));
    out.beams.scheme = Scheme::DamRzf;
    return out;
}

} // namespace dam
