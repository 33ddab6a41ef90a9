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

#ifndef UERISLINK_CHANNEL_HPP
#define UERISLINK_CHANNEL_HPP

#include "uerislink/scenario.hpp"
#include "uerislink/types.hpp"

#include <vector>

namespace uerislink {

// Direct channel and per-UE cascade segments.
//   h_direct: N_r x N_t
//   g_list[i]: M x N_t   (TX -> RIS_i)
//   q_list[i]: N_r x M   (RIS_i -> RX)
struct ChannelSet
{
    CMat h_direct;
    std::vector<CMat> g_list;
    std::vector<CMat> q_list;

    int n_ues() const { return static_cast<int>(g_list.size()); }
    int n_rx() const { return static_cast<int>(h_direct.rows()); }
    int n_tx() const { return static_cast<int>(h_direct.cols()); }
    int ris_elements(int ue) const { return static_cast<int>(g_list.at(static_cast<std::size_t>(ue)).rows()); }

    // Throws std::invalid_argument on inconsistent shapes or non-finite entries.
    void check() const;

    // Keeps only the listed UEs, in the listed order.
    ChannelSet subset(const std::vector<int> &ues) const;
};

struct RisConfiguration
{
    std::vector<std::vector<int>> phase_indices;   // one length-M vector per UE
    PhaseSet phase_set;

    int n_ues() const { return static_cast<int>(phase_indices.size()); }
    void check() const;

    // Every UE set to phase index 0.
    static RisConfiguration zeros(const std::vector<int> &elements_per_ue, PhaseSet phases);
    static RisConfiguration zeros(const ChannelSet &channels, PhaseSet phases);

    // All indices flattened UE-major, the order used for lexicographic tie-breaks.
    std::vector<int> flat() const;
};

// Free-space (Friis) power gain (lambda / (4 pi d))^2 between isotropic antennas.
double friis_gain(double distance_m, double wavelength_m);

// Uniform linear array response with unit-modulus entries; spacing in half wavelengths.
CVec ula_response(int n, double spacing_half_wavelengths, double angle_rad);

// Geometric narrowband model: each link is one LOS ray (Rician K-factor) plus NLOS rays
// with complex Gaussian gains, scaled so that the mean per-entry power equals the
// link's large-scale gain. H_d has 3 NLOS rays, G_i and Q_i have 2.
ChannelSet generate_channels(const ScenarioConfig &config, const Geometry &geometry, Rng &rng);

// Per-entry power of the direct link under the large-scale model, before any normalization.
double direct_link_gain(const ScenarioConfig &config);

// Amplitude factor applied to H_d and every Q_i so that E||H_d||_F^2 = N (unit gain per stream).
double gain_normalization(const ScenarioConfig &config);
ChannelSet normalize_gain(ChannelSet channels, const ScenarioConfig &config);

// Per-entry power of the direct link in the units the optimizer sees.
double reference_direct_gain(const ScenarioConfig &config);

// diag(exp(j phi_1), ..., exp(j phi_M)) for one UE.
CMat ris_phase_matrix(const RisConfiguration &ris, int ue_index);

// H = H_d + sum_i Q_i Phi_i G_i
CMat assemble_effective_channel(const ChannelSet &channels, const RisConfiguration &ris);

} // namespace uerislink

#endif
