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

#include "test_support.hpp"

#include "uerislink/ao.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace uerislink;

namespace {

ChannelSet channels_for(const ScenarioConfig &cfg, std::uint64_t seed)
{
    Rng rng(seed);
    return testsupport::iid_channels(cfg, rng);
}

void check_trace_contract(const AoTrace &t, const ScenarioConfig &cfg)
{
    REQUIRE(t.iterations.size() == static_cast<std::size_t>(t.iterations_used) + 1);
    CHECK(t.iterations_used <= cfg.max_ao_iterations);
    CHECK(t.iterations_used >= 1);
    CHECK(t.tolerance == doctest::Approx(cfg.ao_tolerance * t.initial_delta()));
    for (std::size_t k = 1; k < t.iterations.size(); ++k)
    {
        const auto &it = t.iterations[k];
        CHECK(it.iteration == static_cast<int>(k));
        CHECK(it.err == t.iterations[k - 1].delta - it.delta);
        // Every pass before the last kept going, so its err exceeded the threshold.
        if (k + 1 < t.iterations.size())
            CHECK(it.err > t.tolerance);
    }
    CHECK(t.converged == (t.iterations.back().err <= t.tolerance && t.iterations_used > 0));
    CHECK(t.final_ris.flat() == t.iterations.back().phases);
}

} // namespace

TEST_SUITE("ao")
{
    TEST_CASE("no cooperating UEs: one design on the direct link")
    {
        const auto cfg = testsupport::small_config(4, 4, 2, 0, 1, 3);
        const auto ch = channels_for(cfg, 1);
        const auto t = run_ao(ch, cfg, PhaseMethod::BranchPrune);
        CHECK(t.iterations_used == 1);
        CHECK(t.converged);
        CHECK(t.iterations.back().err == 0.0);
        CHECK(t.final_delta() == t.initial_delta());
    }

    TEST_CASE("single-phase alphabet exits after one pass")
    {
        const auto cfg = testsupport::small_config(4, 4, 2, 2, 2, 1);
        const auto t = run_ao(channels_for(cfg, 2), cfg, PhaseMethod::Exhaustive);
        CHECK(t.iterations_used == 1);
        CHECK(t.converged);
        CHECK(t.iterations.back().err <= t.tolerance);
        CHECK(t.final_delta() == t.initial_delta());
    }

    TEST_CASE("small instances with exhaustive search")
    {
        const auto cfg = testsupport::small_config(4, 4, 2, 2, 2, 3);
        int improved = 0;
        for (std::uint64_t s = 0; s < 30; ++s)
        {
            const auto ch = channels_for(cfg, 100 + s);
            const auto t = run_ao(ch, cfg, PhaseMethod::Exhaustive);
            check_trace_contract(t, cfg);
            for (std::size_t k = 1; k < t.iterations.size(); ++k)
                CHECK(t.iterations[k].phase_step_delta <= t.iterations[k - 1].delta + 1e-10);
            improved += t.final_delta() <= t.initial_delta() ? 1 : 0;
            CHECK(objective(ch, t.final_ris, t.final_tx, cfg) == doctest::Approx(t.final_delta()).epsilon(1e-12));
        }
        CHECK(improved >= 29);
    }

    TEST_CASE("branch-and-prune phase steps never increase the MSE")
    {
        const auto cfg = testsupport::small_config(8, 8, 4, 6, 2, 3);
        for (std::uint64_t s = 0; s < 10; ++s)
        {
            const auto t = run_ao(channels_for(cfg, 200 + s), cfg, PhaseMethod::BranchPrune);
            check_trace_contract(t, cfg);
            for (std::size_t k = 1; k < t.iterations.size(); ++k)
                CHECK(t.iterations[k].phase_step_delta <= t.iterations[k - 1].delta + 1e-10);
        }
    }

    TEST_CASE("iteration cap")
    {
        auto cfg = testsupport::small_config(6, 6, 2, 4, 2, 3);
        cfg.ao_tolerance = 0.0;
        cfg.max_ao_iterations = 2;
        const auto t = run_ao(channels_for(cfg, 3), cfg, PhaseMethod::BranchPrune);
        CHECK(t.iterations_used <= 2);
        CHECK(t.converged == (t.iterations.back().err <= 0.0));
    }

    TEST_CASE("reproducible traces")
    {
        const auto cfg = testsupport::small_config(6, 6, 2, 3, 2, 3);
        const auto ch = channels_for(cfg, 4);
        const auto a = run_ao(ch, cfg, PhaseMethod::BranchPrune);
        const auto b = run_ao(ch, cfg, PhaseMethod::BranchPrune);
        std::ostringstream sa, sb;
        write_trace(sa, a);
        write_trace(sb, b);
        CHECK(sa.str() == sb.str());
        CHECK(a.final_tx.f_digital == b.final_tx.f_digital);
    }

    TEST_CASE("trace serialization")
    {
        const auto cfg = testsupport::small_config(4, 4, 2, 2, 2, 3);
        const auto t = run_ao(channels_for(cfg, 5), cfg, PhaseMethod::Exhaustive);
        std::ostringstream os;
        write_trace(os, t);
        std::istringstream in(os.str());
        std::size_t k = 0;
        for (std::string line; std::getline(in, line); ++k)
        {
            const auto j = nlohmann::json::parse(line);
            CHECK(j.at("iteration").get<int>() == static_cast<int>(k));
            CHECK(j.at("delta").get<double>() == t.iterations[k].delta);
            CHECK(j.at("phases").size() == 4);
        }
        CHECK(k == t.iterations.size());
    }

    TEST_CASE("non-finite MSE aborts with the partial trace")
    {
        const auto cfg = testsupport::small_config(4, 4, 2, 1, 2, 3);
        auto ch = channels_for(cfg, 6);
        ch.h_direct *= 1e200;
        ch.q_list[0] *= 1e200;
        try
        {
            run_ao(ch, cfg, PhaseMethod::BranchPrune);
            FAIL("expected AoError");
        }
        catch (const AoError &e)
        {
            CHECK_FALSE(e.trace().iterations.empty());
        }
    }
}
