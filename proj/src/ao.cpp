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

#include "uerislink/ao.hpp"

#include "uerislink/mse.hpp"

#include <cmath>
#include <ostream>

namespace uerislink {

namespace {

HybridTransceiver redesign(const ChannelSet &channels, const RisConfiguration &ris, const ScenarioConfig &config)
{
    return design_transceiver(svd_decompose(assemble_effective_channel(channels, ris)), config);
}

} // namespace

AoTrace run_ao(const ChannelSet &channels, const ScenarioConfig &config, PhaseMethod method)
{
    channels.check();
    const PhaseSet phases = build_phase_set(config.phase_cardinality);

    AoTrace trace;
    RisConfiguration ris = maximize_channel_gain(channels, phases);
    HybridTransceiver tx = redesign(channels, ris, config);
    double delta = objective(channels, ris, tx, config);

    trace.iterations.push_back({0, delta, 0.0, delta, ris.flat(), 0, 0});
    if (!std::isfinite(delta))
        throw AoError("alternating optimization: non-finite initial MSE", trace);
    trace.tolerance = config.ao_tolerance * delta;

    while (trace.iterations_used < config.max_ao_iterations)
    {
        const int k = ++trace.iterations_used;
        // Nothing to search without RIS elements.
        const PhaseSearchResult step = channels.n_ues() == 0
                                           ? PhaseSearchResult{ris, delta, 0, method, 0.0}
                                           : search_phases(method, channels, tx, config, &ris);
        trace.total_nodes += step.nodes_expanded;
        ris = step.ris;
        tx = redesign(channels, ris, config);
        const double next = objective(channels, ris, tx, config);

        AoIteration rec;
        rec.iteration = k;
        rec.delta = next;
        rec.err = delta - next;
        rec.phase_step_delta = step.objective;
        rec.phases = ris.flat();
        rec.nodes_expanded = step.nodes_expanded;
        rec.transceiver_id = k;
        trace.iterations.push_back(rec);
        if (next > step.objective)
            ++trace.redesign_increases;

        if (!std::isfinite(next))
            throw AoError("alternating optimization: non-finite MSE at iteration " + std::to_string(k), trace);
        delta = next;
        if (rec.err <= trace.tolerance)
        {
            trace.converged = true;
            break;
        }
    }
    trace.final_ris = std::move(ris);
    trace.final_tx = std::move(tx);
    return trace;
}

void write_trace(std::ostream &os, const AoTrace &trace)
{
    const auto old_precision = os.precision(17);
    for (const auto &it : trace.iterations)
    {
        os << "{\"iteration\":" << it.iteration << ",\"delta\":" << it.delta << ",\"err\":" << it.err
           << ",\"phase_step_delta\":" << it.phase_step_delta << ",\"nodes_expanded\":" << it.nodes_expanded
           << ",\"transceiver_id\":" << it.transceiver_id << ",\"phases\":[";
        for (std::size_t i = 0; i < it.phases.size(); ++i)
            os << (i ? "," : "") << it.phases[i];
        os << "]}\n";
    }
    os.precision(old_precision);
}

} // namespace uerislink
