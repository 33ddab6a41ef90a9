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

#include "uerislink/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace uerislink {

namespace {

std::string ue_name(int ue) { return "UE" + std::to_string(ue); }

struct Logger
{
    MessageLog &log;
    std::uint64_t next;

    void operator()(MessageKind kind, std::string src, std::string dst, int ue)
    {
        log.push_back({next++, kind, std::move(src), std::move(dst), ue});
    }
};

} // namespace

std::string to_string(MessageKind kind)
{
    switch (kind)
    {
    case MessageKind::RequestToParticipate: return "REQUEST_TO_PARTICIPATE";
    case MessageKind::Accept: return "ACCEPT";
    case MessageKind::StartCe: return "START_CE";
    case MessageKind::Ack: return "ACK";
    case MessageKind::SendS: return "SEND_S";
    case MessageKind::CeComplete: return "CE_COMPLETE";
    }
    return "UNKNOWN";
}

void write_log(std::ostream &os, const MessageLog &log)
{
    for (const auto &m : log)
        os << "{\"t\":" << m.seq << ",\"kind\":\"" << to_string(m.kind) << "\",\"src\":\"" << m.source
           << "\",\"dst\":\"" << m.destination << "\",\"ue\":" << m.ue << "}\n";
}

std::vector<UeRecord> make_population(const ScenarioConfig &config, Rng &rng)
{
    std::vector<UeRecord> population;
    for (int i = 0; i < config.candidate_count(); ++i)
    {
        UeRecord r;
        r.ue_id = i;
        r.accepted = uniform(rng, 0.0, 1.0) < config.acceptance_probability;
        r.mobility_score = uniform(rng, 0.0, 1.0);
        population.push_back(std::move(r));
    }
    return population;
}

CMat pilot_matrix(int n, double energy)
{
    CMat s(n, n);
    const double amp = std::sqrt(energy / n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            s(r, c) = std::polar(amp, -2.0 * kPi * r * c / n);
    return s;
}

CMat ls_estimate(const CMat &truth, const CMat &pilot, double noise_power, Rng &rng)
{
    if (pilot.rows() != truth.cols() || pilot.cols() < pilot.rows())
        throw std::invalid_argument("ls_estimate: pilot does not match channel dimensions");
    CMat y = truth * pilot;
    if (noise_power > 0.0)
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y(i) += complex_normal(rng, noise_power);
    // Right pseudo-inverse; equals S^{-1} for a square pilot.
    return y * pilot.adjoint() * (pilot * pilot.adjoint()).inverse();
}

double segment_noise_power(const ScenarioConfig &config)
{
    if (!config.normalize_channel_gain)
        return config.noise_power;
    const double c = gain_normalization(config);
    return config.noise_power / (c * c);
}

SelectionShortfall::SelectionShortfall(int achieved, int required)
    : std::runtime_error("UE selection shortfall: " + std::to_string(achieved) + " eligible UEs, " +
                         std::to_string(required) + " required"),
      achieved_(achieved), required_(required)
{
}

ChanEstResult chan_est(const std::vector<int> &ue_ids, const ChannelSet &channels, const CMat &pilot,
                       const ScenarioConfig &config, Rng &rng, std::uint64_t first_seq)
{
    ChanEstResult out;
    Logger log{out.log, first_seq};
    for (int ue : ue_ids)
    {
        const std::string name = ue_name(ue);
        log(MessageKind::StartCe, "TX", name + "+RX", ue);
        if (uniform(rng, 0.0, 1.0) < config.ack_timeout_probability)
        {
            out.skipped.push_back(ue);
            continue;
        }
        log(MessageKind::Ack, name + "+RX", "TX", ue);
        log(MessageKind::SendS, "TX", name, ue);
        out.q_hat.push_back(ls_estimate(channels.q_list.at(static_cast<std::size_t>(ue)), pilot, config.noise_power, rng));
        out.estimated.push_back(ue);
        log(MessageKind::CeComplete, "RX", "TX", ue);
    }
    return out;
}

SelectionResult ue_select(std::vector<UeRecord> population, const ChannelSet &channels, const ScenarioConfig &config,
                          Rng &rng)
{
    const int required = config.n_cooperating_ues;
    if (static_cast<int>(population.size()) < required)
        throw SelectionShortfall(static_cast<int>(population.size()), required);
    if (channels.n_ues() < static_cast<int>(population.size()))
        throw std::invalid_argument("ue_select: channel set smaller than the population");

    SelectionResult out;
    Logger log{out.log, 0};
    log(MessageKind::RequestToParticipate, "TX", "ALL", -1);

    const CMat tx_pilot = pilot_matrix(channels.n_tx(), config.pilot_energy);
    const double g_noise = segment_noise_power(config);
    std::vector<const UeRecord *> eligible;
    for (auto &r : population)
    {
        if (!r.accepted)
            continue;
        log(MessageKind::Accept, ue_name(r.ue_id), "TX", r.ue_id);
        r.g_hat = ls_estimate(channels.g_list.at(static_cast<std::size_t>(r.ue_id)), tx_pilot, g_noise, rng);
        r.cqi = r.g_hat.norm();
    }
    for (const auto &r : population)
        if (r.accepted && r.mobility_score <= config.mobility_threshold)
            eligible.push_back(&r);
    if (static_cast<int>(eligible.size()) < required)
        throw SelectionShortfall(static_cast<int>(eligible.size()), required);

    std::stable_sort(eligible.begin(), eligible.end(), [](const UeRecord *a, const UeRecord *b) {
        if (a->cqi != b->cqi)
            return a->cqi > b->cqi;
        if (a->mobility_score != b->mobility_score)
            return a->mobility_score < b->mobility_score;
        return a->ue_id < b->ue_id;
    });
    const int candidates = static_cast<int>(population.size());
    const int shortlist_size = std::min(static_cast<int>(eligible.size()),
                                        config.n_shortlist_ues > 0 ? config.n_shortlist_ues
                                                                   : std::min(candidates, 2 * required));
    for (int k = 0; k < shortlist_size; ++k)
        out.shortlist.push_back(eligible[static_cast<std::size_t>(k)]->ue_id);

    const CMat ris_pilot = pilot_matrix(channels.q_list.empty() ? 1 : static_cast<int>(channels.q_list.front().cols()),
                                        config.pilot_energy);
    ChanEstResult ce = chan_est(out.shortlist, channels, ris_pilot, config, rng, out.log.size());
    out.log.insert(out.log.end(), ce.log.begin(), ce.log.end());
    if (static_cast<int>(ce.estimated.size()) < required)
        throw SelectionShortfall(static_cast<int>(ce.estimated.size()), required);

    std::vector<std::pair<double, int>> by_quality;
    for (std::size_t k = 0; k < ce.estimated.size(); ++k)
    {
        const int ue = ce.estimated[k];
        auto it = std::find_if(population.begin(), population.end(), [&](const UeRecord &r) { return r.ue_id == ue; });
        it->q_hat = ce.q_hat[k];
        by_quality.emplace_back(-ce.q_hat[k].norm(), ue);
    }
    std::sort(by_quality.begin(), by_quality.end());
    for (int k = 0; k < required; ++k)
        out.selected.push_back(by_quality[static_cast<std::size_t>(k)].second);
    out.records = std::move(population);
    return out;
}

FarFieldIdentification farfield_identify(const ChannelSet &estimates, const Geometry &geometry)
{
    if (static_cast<int>(geometry.ues.size()) != estimates.n_ues())
        throw std::invalid_argument("farfield_identify: geometry and estimates cover different UEs");
    FarFieldIdentification out;
    out.ratio = geometry.far_field_ratio();
    if (out.ratio < kFarFieldRatio)
    {
        std::ostringstream os;
        os << "farfield_identify: link distance / d' ratio " << out.ratio << " below " << kFarFieldRatio
           << "; patch estimates cannot stand in for RIS channels";
        throw std::domain_error(os.str());
    }
    estimates.check();
    out.channels = estimates;
    std::ostringstream os;
    os << "G_i, Q_i replaced by patch estimates for " << estimates.n_ues() << " UEs (min ratio " << out.ratio << ")";
    out.note = os.str();
    return out;
}

} // namespace uerislink
