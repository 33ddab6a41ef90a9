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

#ifndef UERISLINK_PHASEOPT_HPP
#define UERISLINK_PHASEOPT_HPP

#include "uerislink/channel.hpp"
#include "uerislink/transceiver.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace uerislink {

enum class PhaseMethod
{
    Exhaustive,    // ES
    BranchPrune,   // BP
};

std::string to_string(PhaseMethod method);
PhaseMethod parse_phase_method(const std::string &text);   // "es" or "bp"

struct PhaseSearchResult
{
    RisConfiguration ris;
    double objective = 0.0;            // delta of ris under the fixed transceiver
    std::uint64_t nodes_expanded = 0;  // ES: candidates scored; BP: tree nodes expanded
    PhaseMethod method = PhaseMethod::Exhaustive;
    // Largest |incremental - recomputed| objective seen at accepted leaves.
    double max_incremental_error = 0.0;
};

class SearchBudgetExceeded : public std::length_error
{
public:
    using std::length_error::length_error;
};

// delta for one phase assignment with the transceiver held fixed.
double objective(const ChannelSet &channels, const RisConfiguration &ris, const HybridTransceiver &tx,
                 const ScenarioConfig &config);

// Scores every one of the K^(sum of RIS elements) assignments. Ties go to the
// lexicographically smallest UE-major index vector. Refuses instances above config.es_budget.
PhaseSearchResult exhaustive_search(const ChannelSet &channels, const HybridTransceiver &tx,
                                    const ScenarioConfig &config);

struct BranchPruneOptions
{
    const RisConfiguration *warm_start = nullptr;   // seeds the incumbent; result is never worse
    std::ostream *trace = nullptr;                  // line-delimited JSON node records
};

// Depth-first branch and prune over RIS elements, UEs ordered by descending
// ||Q_i||_F ||G_i||_F. A subtree is dropped once its lower bound
//   p max(0, ||S|| - sum_remaining ||W q_e|| ||g_e^T F||)^2 + sigma_n^2 ||W||_F^2
// (S the partial mismatch W H F - I) cannot beat the incumbent by more than the
// relative gap, so the result is within (1 + near_optimality_gap) of the optimum.
PhaseSearchResult branch_prune_search(const ChannelSet &channels, const HybridTransceiver &tx,
                                      const ScenarioConfig &config, const BranchPruneOptions &options = {});

PhaseSearchResult search_phases(PhaseMethod method, const ChannelSet &channels, const HybridTransceiver &tx,
                                const ScenarioConfig &config, const RisConfiguration *warm_start = nullptr);

// Coordinate ascent on ||H_d + sum Q_i Phi_i G_i||_F^2, starting from all-zero indices.
// Used to seed the alternating optimization before any transceiver exists.
RisConfiguration maximize_channel_gain(const ChannelSet &channels, const PhaseSet &phases);

} // namespace uerislink

#endif
