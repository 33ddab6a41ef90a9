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

#ifndef UERISLINK_PROTOCOL_HPP
#define UERISLINK_PROTOCOL_HPP

#include "uerislink/channel.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace uerislink {

enum class MessageKind
{
    RequestToParticipate,
    Accept,
    StartCe,
    Ack,
    SendS,
    CeComplete,
};

std::string to_string(MessageKind kind);

struct ControlMessage
{
    std::uint64_t seq = 0;   // position in the global log
    MessageKind kind = MessageKind::RequestToParticipate;
    std::string source;
    std::string destination;
    int ue = -1;             // -1 for broadcasts
};

using MessageLog = std::vector<ControlMessage>;

// Line-delimited JSON: {"t":..,"kind":..,"src":..,"dst":..,"ue":..}
void write_log(std::ostream &os, const MessageLog &log);

struct UeRecord
{
    int ue_id = 0;
    bool accepted = true;
    double mobility_score = 0.0;   // lower = more static
    CMat g_hat;                    // estimate of G_i (M x N_t)
    CMat q_hat;                    // estimate of Q_i (N_r x M), empty until estimated
    double cqi = 0.0;              // ||G_hat_i||_F
};

// Candidate UEs: acceptance with config.acceptance_probability, mobility uniform in [0, 1).
std::vector<UeRecord> make_population(const ScenarioConfig &config, Rng &rng);

// Unitary DFT pilot with per-column energy `energy`: S S^H = energy I.
CMat pilot_matrix(int n, double energy);

// Observes Y = C S + N with N ~ CN(0, noise_power) entrywise and returns Y S^{-1}.
CMat ls_estimate(const CMat &truth, const CMat &pilot, double noise_power, Rng &rng);

// Noise power seen when estimating G_i. G_i is not rescaled by the gain
// normalization, so its pilot noise is expressed in unnormalized units.
double segment_noise_power(const ScenarioConfig &config);

class SelectionShortfall : public std::runtime_error
{
public:
    SelectionShortfall(int achieved, int required);
    int achieved() const { return achieved_; }
    int required() const { return required_; }

private:
    int achieved_;
    int required_;
};

struct ChanEstResult
{
    std::vector<int> estimated;   // UE ids that completed estimation, in protocol order
    std::vector<CMat> q_hat;      // parallel to `estimated`
    std::vector<int> skipped;     // UE ids whose ACK timed out
    MessageLog log;
};

// Sequential pilot-based estimation of Q_i: per UE START_CE -> ACK -> SEND_S ->
// (RX least-squares estimate) -> CE_COMPLETE. A timed-out ACK skips the UE.
ChanEstResult chan_est(const std::vector<int> &ue_ids, const ChannelSet &channels, const CMat &pilot,
                       const ScenarioConfig &config, Rng &rng, std::uint64_t first_seq = 0);

struct SelectionResult
{
    std::vector<int> selected;     // N_d UE ids, best first
    std::vector<int> shortlist;    // L_M UE ids passed to channel estimation
    std::vector<UeRecord> records; // population with estimates filled in
    MessageLog log;
};

// Broadcast, estimate G_i for acceptors, shortlist L_M by (CQI desc, mobility asc, id asc)
// among static UEs, estimate Q_i for the shortlist, keep the N_d best by ||Q_hat_i||_F.
SelectionResult ue_select(std::vector<UeRecord> population, const ChannelSet &channels,
                          const ScenarioConfig &config, Rng &rng);

struct FarFieldIdentification
{
    ChannelSet channels;   // the estimates, adopted as the channels for optimization
    double ratio = 0.0;    // smallest link-distance / d' ratio
    std::string note;
};

// Adopts G_hat/Q_hat as G/Q. Throws std::domain_error when some UE is closer than
// kFarFieldRatio * d' to the TX or the RX.
FarFieldIdentification farfield_identify(const ChannelSet &estimates, const Geometry &geometry);

} // namespace uerislink

#endif
