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

#include "uerislink/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uerislink {

namespace {

constexpr int kDirectNlosRays = 3;
constexpr int kSegmentNlosRays = 2;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double bearing(const Vec3 &from, const Vec3 &to) { return std::atan2(to.y - from.y, to.x - from.x); }

struct LinkEnd
{
    int n;
    double spacing;     // half wavelengths
    double los_angle;   // relative to the array broadside
};

// rx x tx matrix: sqrt(gain) * sum_l alpha_l a_rx(theta_l) a_tx(theta_l)^H
CMat geometric_link(const LinkEnd &rx, const LinkEnd &tx, double gain, double los_phase, double k_factor,
                    int n_nlos, bool los_present, Rng &rng)
{
    CMat h = CMat::Zero(rx.n, tx.n);
    const double los_power = los_present ? k_factor / (k_factor + 1.0) : 0.0;
    const double nlos_power = los_present ? 1.0 / (k_factor + 1.0) : 1.0;

    if (los_present)
    {
        const cd alpha = std::sqrt(los_power) * std::polar(1.0, los_phase);
        h += alpha * ula_response(rx.n, rx.spacing, rx.los_angle) * ula_response(tx.n, tx.spacing, tx.los_angle).adjoint();
    }
    for (int l = 0; l < n_nlos; ++l)
    {
        const cd alpha = complex_normal(rng, nlos_power / n_nlos);
        const double aoa = uniform(rng, -0.5 * kPi, 0.5 * kPi);
        const double aod = uniform(rng, -0.5 * kPi, 0.5 * kPi);
        h += alpha * ula_response(rx.n, rx.spacing, aoa) * ula_response(tx.n, tx.spacing, aod).adjoint();
    }
    return std::sqrt(gain) * h;
}

} // namespace

void ChannelSet::check() const
{
    if (g_list.size() != q_list.size())
        throw std::invalid_argument("channel set: G and Q lists differ in length");
    if (!h_direct.allFinite())
        throw std::invalid_argument("channel set: non-finite entry in H_d");
    for (std::size_t i = 0; i < g_list.size(); ++i)
    {
        const auto &g = g_list[i];
        const auto &q = q_list[i];
        if (g.cols() != h_direct.cols() || q.rows() != h_direct.rows() || q.cols() != g.rows() || g.rows() < 1)
            throw std::invalid_argument("channel set: inconsistent dimensions for UE " + std::to_string(i));
        if (!g.allFinite() || !q.allFinite())
            throw std::invalid_argument("channel set: non-finite entry for UE " + std::to_string(i));
    }
}

ChannelSet ChannelSet::subset(const std::vector<int> &ues) const
{
    ChannelSet out;
    out.h_direct = h_direct;
    for (int i : ues)
    {
        out.g_list.push_back(g_list.at(static_cast<std::size_t>(i)));
        out.q_list.push_back(q_list.at(static_cast<std::size_t>(i)));
    }
    return out;
}

void RisConfiguration::check() const
{
    for (const auto &v : phase_indices)
        for (int idx : v)
            if (idx < 0 || idx >= phase_set.size())
                throw std::invalid_argument("RIS configuration: phase index " + std::to_string(idx) +
                                            " outside alphabet of size " + std::to_string(phase_set.size()));
}

RisConfiguration RisConfiguration::zeros(const std::vector<int> &elements_per_ue, PhaseSet phases)
{
    RisConfiguration ris;
    ris.phase_set = std::move(phases);
    for (int m : elements_per_ue)
        ris.phase_indices.emplace_back(static_cast<std::size_t>(m), 0);
    return ris;
}

RisConfiguration RisConfiguration::zeros(const ChannelSet &channels, PhaseSet phases)
{
    std::vector<int> counts;
    for (int i = 0; i < channels.n_ues(); ++i)
        counts.push_back(channels.ris_elements(i));
    return zeros(counts, std::move(phases));
}

std::vector<int> RisConfiguration::flat() const
{
    std::vector<int> out;
    for (const auto &v : phase_indices)
        out.insert(out.end(), v.begin(), v.end());
    return out;
}

double friis_gain(double distance_m, double wavelength_m)
{
    const double a = wavelength_m / (4.0 * kPi * distance_m);
    return a * a;
}

CVec ula_response(int n, double spacing_half_wavelengths, double angle_rad)
{
    CVec a(n);
    const double step = kPi * spacing_half_wavelengths * std::sin(angle_rad);
    for (int k = 0; k < n; ++k)
        a(k) = std::polar(1.0, step * k);
    return a;
}

double direct_link_gain(const ScenarioConfig &config)
{
    return friis_gain(config.tx_rx_distance_m, config.wavelength());
}

ChannelSet generate_channels(const ScenarioConfig &config, const Geometry &geometry, Rng &rng)
{
    const double lambda = geometry.wavelength;
    const double k_factor = db_to_linear(config.rician_k_db);
    const double d_direct = distance(geometry.tx, geometry.rx);
    const double beta_direct = friis_gain(d_direct, lambda);
    const double beta_half = friis_gain(0.5 * d_direct, lambda);
    // Re-radiation gain of one RIS element: a UE at the midpoint yields a cascade whose
    // per-entry power is ris_link_gain_db relative to the direct link.
    const double ris_gain = db_to_linear(config.ris_link_gain_db) * beta_direct / (beta_half * beta_half);

    const int nt = config.n_tx_antennas;
    const int nr = config.n_rx_antennas;
    const int m = config.ris_elements_per_ue;
    const double ris_spacing = config.element_spacing_multiplier;

    ChannelSet ch;
    {
        const LinkEnd rx{nr, 1.0, std::atan2(geometry.tx.y - geometry.rx.y, geometry.rx.x - geometry.tx.x)};
        const LinkEnd tx{nt, 1.0, bearing(geometry.tx, geometry.rx)};
        ch.h_direct = geometric_link(rx, tx, beta_direct, -2.0 * kPi * d_direct / lambda, k_factor, kDirectNlosRays,
                                     true, rng);
        if (config.no_los)
            ch.h_direct.setZero();
    }

    for (std::size_t i = 0; i < geometry.ues.size(); ++i)
    {
        const Vec3 &ue = geometry.ues[i];
        const double psi = geometry.ue_orientation.at(i);
        const double d1 = distance(geometry.tx, ue);
        const double d2 = distance(ue, geometry.rx);

        const LinkEnd tx{nt, 1.0, bearing(geometry.tx, ue)};
        const LinkEnd ris_in{m, ris_spacing, bearing(ue, geometry.tx) - psi};
        ch.g_list.push_back(geometric_link(ris_in, tx, friis_gain(d1, lambda), -2.0 * kPi * d1 / lambda, k_factor,
                                           kSegmentNlosRays, true, rng));

        const LinkEnd ris_out{m, ris_spacing, bearing(ue, geometry.rx) - psi};
        const LinkEnd rx{nr, 1.0, std::atan2(ue.y - geometry.rx.y, geometry.rx.x - ue.x)};
        ch.q_list.push_back(geometric_link(rx, ris_out, friis_gain(d2, lambda) * ris_gain, -2.0 * kPi * d2 / lambda,
                                           k_factor, kSegmentNlosRays, true, rng));
    }
    return ch;
}

double gain_normalization(const ScenarioConfig &config)
{
    const double per_entry = static_cast<double>(config.n_streams) /
                             (static_cast<double>(config.n_rx_antennas) * config.n_tx_antennas);
    return std::sqrt(per_entry / direct_link_gain(config));
}

ChannelSet normalize_gain(ChannelSet channels, const ScenarioConfig &config)
{
    const double c = gain_normalization(config);
    channels.h_direct *= c;
    for (auto &q : channels.q_list)
        q *= c;
    return channels;
}

double reference_direct_gain(const ScenarioConfig &config)
{
    if (config.normalize_channel_gain)
        return static_cast<double>(config.n_streams) /
               (static_cast<double>(config.n_rx_antennas) * config.n_tx_antennas);
    return direct_link_gain(config);
}

CMat ris_phase_matrix(const RisConfiguration &ris, int ue_index)
{
    if (ue_index < 0 || ue_index >= ris.n_ues())
        throw std::out_of_range("ris_phase_matrix: UE index " + std::to_string(ue_index) + " out of range");
    const auto &idx = ris.phase_indices[static_cast<std::size_t>(ue_index)];
    CMat phi = CMat::Zero(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t m = 0; m < idx.size(); ++m)
        phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = ris.phase_set.phasor(idx[m]);
    return phi;
}

CMat assemble_effective_channel(const ChannelSet &channels, const RisConfiguration &ris)
{
    if (ris.n_ues() != channels.n_ues())
        throw std::invalid_argument("assemble_effective_channel: RIS configuration covers " +
                                    std::to_string(ris.n_ues()) + " UEs, channel set has " +
                                    std::to_string(channels.n_ues()));
    ris.check();
    CMat h = channels.h_direct;
    for (int i = 0; i < channels.n_ues(); ++i)
    {
        const auto &idx = ris.phase_indices[static_cast<std::size_t>(i)];
        if (static_cast<int>(idx.size()) != channels.ris_elements(i))
            throw std::invalid_argument("assemble_effective_channel: element count mismatch for UE " +
                                        std::to_string(i));
        const auto &q = channels.q_list[static_cast<std::size_t>(i)];
        const auto &g = channels.g_list[static_cast<std::size_t>(i)];
        // Q Phi G without forming the diagonal matrix.
        h.noalias() += (q * ris_phase_matrix(ris, i).diagonal().asDiagonal()) * g;
    }
    return h;
}

} // namespace uerislink
