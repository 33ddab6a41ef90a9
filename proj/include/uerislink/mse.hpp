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

#ifndef UERISLINK_MSE_HPP
#define UERISLINK_MSE_HPP

#include "uerislink/channel.hpp"
#include "uerislink/transceiver.hpp"

#include <vector>

namespace uerislink {

// M(x) = p (Keff - I)(Keff - I)^H + sigma_n^2 W W^H, with Keff = W H F_A F_D and
// W = W_D^H W_A^H. delta is the (real) trace of M(x).
struct MseReport
{
    CMat mse_matrix;   // N x N Hermitian
    double delta = 0.0;
    CMat keff;         // N x N
    CMat w_combined;   // N x N_r
};

MseReport mse_matrix(const CMat &effective_channel, const HybridTransceiver &tx, double symbol_power,
                     double noise_power);
MseReport mse_matrix(const ChannelSet &channels, const RisConfiguration &ris, const HybridTransceiver &tx,
                     const ScenarioConfig &config);

// Noise power giving the configured receive SNR, defined per receive antenna before
// combining for an isotropic precoder on the direct link:
//   p E||H_d F_A F_D||_F^2 / (N_r sigma_n^2) = SNR   =>   sigma_n^2 = p N g_d / SNR
// where g_d is the per-entry direct-link gain. Returns config.noise_power when no SNR is set.
double calibrated_noise_power(const ScenarioConfig &config);
ScenarioConfig with_calibrated_noise(ScenarioConfig config);

// Square QAM alphabet with unit average symbol energy.
std::vector<cd> qam_constellation(int order);

struct EmpiricalMse
{
    double mean = 0.0;        // (1/S) sum_s ||y_s - x_s||^2
    double std_error = 0.0;   // sample standard deviation / sqrt(S)
    int n_symbols = 0;
};

// Draws S symbol vectors x with E[x x^H] = p I_N from the QAM alphabet and noise
// n ~ CN(0, sigma_n^2 I_{N_r}), forms y = W H F x + W n and averages ||y - x||^2.
EmpiricalMse simulate_link(const CMat &effective_channel, const HybridTransceiver &tx, double symbol_power,
                           double noise_power, int n_symbols, int constellation_order, Rng &symbol_rng,
                           Rng &noise_rng);
EmpiricalMse simulate_link(const ChannelSet &channels, const RisConfiguration &ris, const HybridTransceiver &tx,
                           const ScenarioConfig &config, Rng &symbol_rng, Rng &noise_rng);

} // namespace uerislink

#endif
