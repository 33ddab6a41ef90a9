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

#ifndef UERISLINK_AO_HPP
#define UERISLINK_AO_HPP

#include "uerislink/phaseopt.hpp"

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace uerislink {

struct AoIteration
{
    int iteration = 0;
    double delta = 0.0;              // after the transceiver redesign
    double err = 0.0;                // delta_{k-1} - delta_k; 0 for iteration 0
    double phase_step_delta = 0.0;   // after the phase search, transceiver of iteration k-1
    std::vector<int> phases;         // UE-major flattened indices
    std::uint64_t nodes_expanded = 0;
    int transceiver_id = 0;          // index of the transceiver snapshot designed in this iteration
};

struct AoTrace
{
    std::vector<AoIteration> iterations;   // iteration 0 is the initial design
    RisConfiguration final_ris;
    HybridTransceiver final_tx;
    double tolerance = 0.0;                // absolute threshold on err (ao_tolerance * delta_0)
    bool converged = false;
    int iterations_used = 0;               // loop passes after the initial design
    std::uint64_t total_nodes = 0;
    int redesign_increases = 0;            // iterations where the redesign raised delta above the phase step

    double initial_delta() const { return iterations.front().delta; }
    double final_delta() const { return iterations.back().delta; }
};

class AoError : public std::runtime_error
{
public:
    AoError(const std::string &what, AoTrace partial) : std::runtime_error(what), trace_(std::move(partial)) {}
    const AoTrace &trace() const { return trace_; }

private:
    AoTrace trace_;
};

// Alternating optimization: initial phases from a channel-gain surrogate, then
// {phase search with the current transceiver, reassemble H, SVD, hybrid redesign}
// until delta_{k-1} - delta_k <= tolerance or max_ao_iterations passes.
AoTrace run_ao(const ChannelSet &channels, const ScenarioConfig &config, PhaseMethod method);

// One JSON object per line: iteration, delta, err, phase_step_delta, nodes_expanded, transceiver_id, phases.
void write_trace(std::ostream &os, const AoTrace &trace);

} // namespace uerislink

#endif
