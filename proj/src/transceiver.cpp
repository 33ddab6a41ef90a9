// SPDX-License-Identifier: Apache-2.0
//
// uerislink - link-level simulator for UE-mounted RIS assisted MIMO links
// Copyright (C) 2026 The uerislink authors
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

#include "uerislink/transceiver.hpp"

#include "uerislink/rng.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uerislink {

namespace {

void fix_column_phase(CMat &a, Eigen::Index col, CMat *partner)
{
    const double scale = a.col(col).cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
    {
        if (std::abs(a(r, col)) > 1e-12 * std::max(1.0, scale))
        {
            const cd rot = std::conj(a(r, col)) / std::abs(a(r, col));
            a.col(col) *= rot;
            if (partner)
                partner->col(col) *= rot;
            a(r, col) = std::abs(a(r, col));
            return;
        }
    }
}

CMat unit_phase(const CMat &m, double modulus)
{
    CMat out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i)
    {
        const cd z = m(i);
        out(i) = std::abs(z) > 0.0 ? modulus * z / std::abs(z) : cd(modulus, 0.0);
    }
    return out;
}

CMat least_squares(const CMat &a, const CMat &b)
{
    return a.completeOrthogonalDecomposition().solve(b);
}

// One sweep of exact single-entry phase updates. Rows decouple because
// ||T - A D||^2 = sum_n ||t_n - a_n D||^2.
void sweep_analog(CMat &analog, const CMat &digital, const CMat &target, double modulus)
{
    for (Eigen::Index n = 0; n < analog.rows(); ++n)
    {
        Eigen::RowVectorXcd e = target.row(n) - analog.row(n) * digital;
        for (Eigen::Index k = 0; k < analog.cols(); ++k)
        {
            const auto d_k = digital.row(k);
            e += analog(n, k) * d_k;
            const cd c = e.dot(d_k);   // sum_j conj(e_j) d_kj
            if (std::abs(c) > 0.0)
                analog(n, k) = modulus * std::conj(c) / std::abs(c);
            e -= analog(n, k) * d_k;
        }
    }
}

struct Candidate
{
    CMat analog;
    CMat digital;
    std::vector<double> history;
};

Candidate alternate(const CMat &target, CMat analog, const FactorizationOptions &options, double modulus)
{
    Candidate c;
    c.digital = least_squares(analog, target);
    double residual = (target - analog * c.digital).norm();
    c.history.push_back(residual);
    for (int it = 0; it < options.max_iterations; ++it)
    {
        sweep_analog(analog, c.digital, target, modulus);
        CMat digital = least_squares(analog, target);
        const double next = (target - analog * digital).norm();
        // The LS solve is optimal for fixed analog, so it cannot lose to the previous digital
        // stage beyond rounding; keep the old one if it does.
        const double previous = (target - analog * c.digital).norm();
        if (next <= previous)
            c.digital = std::move(digital);
        const double r = std::min(next, previous);
        c.history.push_back(r);
        const bool done = std::abs(residual - r) < options.tolerance;
        residual = r;
        if (done)
            break;
    }
    c.analog = std::move(analog);
    return c;
}

void scale_to_streams(CMat &digital, const CMat &analog, Eigen::Index n_streams)
{
    const double norm = (analog * digital).norm();
    if (norm > 0.0)
        digital *= std::sqrt(static_cast<double>(n_streams)) / norm;
}

// Exact realization with two phase shifters per stream: t = s (e^{j(a+b)} + e^{j(a-b)}) / sqrt(n).
Candidate two_shifter_construction(const CMat &target, int n_rf, double modulus)
{
    const Eigen::Index n = target.rows();
    const Eigen::Index streams = target.cols();
    const double peak = target.cwiseAbs().maxCoeff();
    const double s = peak > 0.0 ? peak / (2.0 * modulus) : 1.0;

    Candidate c;
    c.analog.resize(n, n_rf);
    c.digital = CMat::Zero(n_rf, streams);
    for (Eigen::Index k = 0; k < streams; ++k)
    {
        for (Eigen::Index r = 0; r < n; ++r)
        {
            const cd t = target(r, k);
            const double ratio = std::clamp(std::abs(t) / (2.0 * modulus * s), 0.0, 1.0);
            const double spread = std::acos(ratio);
            const double angle = std::arg(t);
            c.analog(r, 2 * k) = std::polar(modulus, angle + spread);
            c.analog(r, 2 * k + 1) = std::polar(modulus, angle - spread);
        }
        c.digital(2 * k, k) = s;
        c.digital(2 * k + 1, k) = s;
    }
    for (Eigen::Index col = 2 * streams; col < n_rf; ++col)
        for (Eigen::Index r = 0; r < n; ++r)
            c.analog(r, col) = std::polar(modulus, 2.0 * kPi * static_cast<double>(r * col) / static_cast<double>(n));
    return c;
}

} // namespace

SvdTriple svd_decompose(const CMat &h)
{
    if (!h.allFinite())
        throw std::invalid_argument("svd_decompose: non-finite input");
    Eigen::JacobiSVD<CMat> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SvdTriple out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    const Eigen::Index paired = out.sigma.size();
    for (Eigen::Index k = 0; k < out.u.cols(); ++k)
        fix_column_phase(out.u, k, k < paired ? &out.v : nullptr);
    for (Eigen::Index k = paired; k < out.v.cols(); ++k)
        fix_column_phase(out.v, k, nullptr);
    return out;
}

HybridFactorization factorize_hybrid(const CMat &target, int n_rf, const FactorizationOptions &options)
{
    const Eigen::Index n = target.rows();
    const Eigen::Index streams = target.cols();
    if (streams < 1 || n < 1 || n_rf < streams || n_rf > n)
        throw std::invalid_argument("factorize_hybrid: infeasible dimensions (" + std::to_string(streams) +
                                    " streams, " + std::to_string(n_rf) + " RF chains, " + std::to_string(n) +
                                    " antennas)");
    const double modulus = 1.0 / std::sqrt(static_cast<double>(n));

    HybridFactorization best;
    best.residual = std::numeric_limits<double>::infinity();
    auto consider = [&](Candidate c, bool closed_form) {
        scale_to_streams(c.digital, c.analog, streams);
        const double r = (target - c.analog * c.digital).norm();
        if (r < best.residual)
        {
            best.analog = std::move(c.analog);
            best.digital = std::move(c.digital);
            best.residual = r;
            best.residual_history = std::move(c.history);
            best.closed_form = closed_form;
        }
    };

    if (n_rf >= 2 * streams)
        consider(two_shifter_construction(target, n_rf, modulus), true);
    if (best.residual <= 1e-12)
        return best;

    for (int restart = 0; restart < std::max(1, options.restarts); ++restart)
    {
        CMat analog(n, n_rf);
        if (restart == 0)
        {
            analog.leftCols(streams) = unit_phase(target, modulus);
            for (Eigen::Index col = streams; col < n_rf; ++col)
                for (Eigen::Index r = 0; r < n; ++r)
                    analog(r, col) =
                        std::polar(modulus, 2.0 * kPi * static_cast<double>(r * (col - streams + 1)) / static_cast<double>(n));
        }
        else
        {
            Rng rng = make_rng(options.seed, "hybrid-restart", static_cast<std::uint64_t>(restart));
            for (Eigen::Index i = 0; i < analog.size(); ++i)
                analog(i) = std::polar(modulus, uniform(rng, 0.0, 2.0 * kPi));
        }
        consider(alternate(target, std::move(analog), options, modulus), false);
    }
    return best;
}

HybridFactorization design_hybrid_precoder(const SvdTriple &svd, const ScenarioConfig &config,
                                           const FactorizationOptions &options)
{
    const int n = config.n_streams;
    if (n > config.n_tx_rf_chains || config.n_tx_rf_chains > svd.v.rows())
        throw std::invalid_argument("design_hybrid_precoder: infeasible dimensions");
    return factorize_hybrid(svd.v.leftCols(n), config.n_tx_rf_chains, options);
}

HybridFactorization design_hybrid_combiner(const SvdTriple &svd, const ScenarioConfig &config,
                                           const FactorizationOptions &options)
{
    const int n = config.n_streams;
    if (n > config.n_rx_rf_chains || config.n_rx_rf_chains > svd.u.rows())
        throw std::invalid_argument("design_hybrid_combiner: infeasible dimensions");
    return factorize_hybrid(svd.u.leftCols(n), config.n_rx_rf_chains, options);
}

HybridTransceiver design_transceiver(const SvdTriple &svd, const ScenarioConfig &config,
                                     const FactorizationOptions &options)
{
    auto pre = design_hybrid_precoder(svd, config, options);
    auto comb = design_hybrid_combiner(svd, config, options);
    return {std::move(pre.analog), std::move(pre.digital), comb.analog.adjoint(), comb.digital.adjoint()};
}

} // namespace uerislink
