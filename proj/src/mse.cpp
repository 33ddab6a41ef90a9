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

#include "uerislink/mse.hpp"

#include <cmath>
#include <stdexcept>

namespace uerislink {

MseReport mse_matrix(const CMat &h, const HybridTransceiver &tx, double symbol_power, double noise_power)
{
    const CMat w = tx.combiner();
    const CMat f = tx.precoder();
    if (w.cols() != h.rows() || f.rows() != h.cols() || w.rows() != f.cols())
        throw std::invalid_argument("mse_matrix: transceiver does not match channel dimensions");

    MseReport r;
    r.w_combined = w;
    r.keff = w * h * f;
    const CMat e = r.keff - CMat::Identity(r.keff.rows(), r.keff.cols());
    r.mse_matrix = symbol_power * (e * e.adjoint()) + noise_power * (w * w.adjoint());
    r.delta = r.mse_matrix.trace().real();
    return r;
}

MseReport mse_matrix(const ChannelSet &channels, const RisConfiguration &ris, const HybridTransceiver &tx,
                     const ScenarioConfig &config)
{
    return mse_matrix(assemble_effective_channel(channels, ris), tx, config.symbol_power, config.noise_power);
}

double calibrated_noise_power(const ScenarioConfig &config)
{
    if (!config.receive_snr_db)
        return config.noise_power;
    const double snr = std::pow(10.0, *config.receive_snr_db / 10.0);
    return config.symbol_power * config.n_streams * reference_direct_gain(config) / snr;
}

ScenarioConfig with_calibrated_noise(ScenarioConfig config)
{
    config.noise_power = calibrated_noise_power(config);
    return config;
}

std::vector<cd> qam_constellation(int order)
{
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (order < 4 || side * side != order || (side & (side - 1)) != 0)
        throw std::invalid_argument("qam_constellation: " + std::to_string(order) + " is not a square QAM order");
    // Levels +-1, +-3, ...; average energy of the square grid is 2 (order - 1) / 3.
    const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
    std::vector<cd> points;
    points.reserve(static_cast<std::size_t>(order));
    for (int i = 0; i < side; ++i)
        for (int q = 0; q < side; ++q)
            points.emplace_back(scale * (2 * i - side + 1), scale * (2 * q - side + 1));
    return points;
}

EmpiricalMse simulate_link(const CMat &h, const HybridTransceiver &tx, double symbol_power, double noise_power,
                           int n_symbols, int constellation_order, Rng &symbol_rng, Rng &noise_rng)
{
    if (n_symbols < 1)
        throw std::invalid_argument("simulate_link: need at least one symbol");
    const auto alphabet = qam_constellation(constellation_order);
    const MseReport analytic = mse_matrix(h, tx, symbol_power, noise_power);
    const Eigen::Index n = analytic.keff.rows();
    const Eigen::Index nr = h.rows();
    const CMat distortion = analytic.keff - CMat::Identity(n, n);
    const CMat &w = analytic.w_combined;
    const double amplitude = std::sqrt(symbol_power);

    std::uniform_int_distribution<int> pick(0, constellation_order - 1);
    CVec x(n), noise(nr), err(n);
    // Welford running mean / variance
    double mean = 0.0, m2 = 0.0;
    for (int s = 0; s < n_symbols; ++s)
    {
        for (Eigen::Index k = 0; k < n; ++k)
            x(k) = amplitude * alphabet[static_cast<std::size_t>(pick(symbol_rng))];
        for (Eigen::Index k = 0; k < nr; ++k)
            noise(k) = complex_normal(noise_rng, noise_power);
        // y - x = (Keff - I) x + W n
        err.noalias() = distortion * x;
        err.noalias() += w * noise;
        const double v = err.squaredNorm();
        const double delta = v - mean;
        mean += delta / (s + 1);
        m2 += delta * (v - mean);
    }
    EmpiricalMse out;
    out.mean = mean;
    out.n_symbols = n_symbols;
    out.std_error = n_symbols > 1 ? std::sqrt(m2 / (n_symbols - 1) / n_symbols) : 0.0;
    return out;
}

EmpiricalMse simulate_link(const ChannelSet &channels, const RisConfiguration &ris, const HybridTransceiver &tx,
                           const ScenarioConfig &config, Rng &symbol_rng, Rng &noise_rng)
{
    return simulate_link(assemble_effective_channel(channels, ris), tx, config.symbol_power, config.noise_power,
                         config.n_symbols, config.constellation_order, symbol_rng, noise_rng);
}

} // namespace uerislink
