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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "test_support.hpp"

#include "uerislink/ao.hpp"
#include "uerislink/harness.hpp"
#include "uerislink/phaseopt.hpp"
#include "uerislink/protocol.hpp"
#include "uerislink/transceiver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

using namespace uerislink;
using testsupport::random_matrix;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

double median(std::vector<double> v)
{
    return quantile(std::move(v), 0.5);
}

// 1. Pruned search against the exhaustive oracle.
Outcome oracle_equivalence()
{
    const auto t0 = Clock::now();
    int within = 0;
    bool counts_ok = true;
    for (std::uint64_t s = 0; s < 100; ++s)
    {
        const auto cfg = testsupport::small_config(4, 4, 2, 2, 2, 3);
        Rng rng = make_rng(s, "acceptance-oracle");
        const auto ch = testsupport::iid_channels(cfg, rng);
        const auto ris0 = RisConfiguration::zeros(ch, build_phase_set(3));
        const auto tx = design_transceiver(svd_decompose(assemble_effective_channel(ch, ris0)), cfg);
        const auto es = exhaustive_search(ch, tx, cfg);
        const auto bp = branch_prune_search(ch, tx, cfg);
        counts_ok = counts_ok && es.nodes_expanded == 81;
        within += std::abs(bp.objective - es.objective) <= 0.01 * es.objective ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    return {within >= 95 && counts_ok && secs < 60.0,
            fmt("%d/100 within 1%%, ES count 81 on all: %s, %.1f s", within, counts_ok ? "yes" : "no", secs)};
}

// 2. Analytic trace against 1e5-symbol Monte Carlo at full sizes.
Outcome analytic_vs_empirical()
{
    const auto t0 = Clock::now();
    auto spec = paper_preset();
    const Arm arm{"dist-3x4", 3, 4, std::nullopt, false};
    const auto cfg = arm_config(spec, arm);
    int inside = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        const auto seeds = trial_seeds(1000 + s, 0);
        Rng geo(seeds.geometry), chr(seeds.channel);
        const auto g = sample_geometry(cfg, geo);
        const auto ch = normalize_gain(generate_channels(cfg, g, chr), cfg);
        const auto ao = run_ao(ch, cfg, PhaseMethod::BranchPrune);
        const CMat h = assemble_effective_channel(ch, ao.final_ris);
        const double delta = mse_matrix(h, ao.final_tx, cfg.symbol_power, cfg.noise_power).delta;
        Rng sym(seeds.symbols), noise(seeds.noise);
        const auto e = simulate_link(h, ao.final_tx, cfg.symbol_power, cfg.noise_power, 100000,
                                     cfg.constellation_order, sym, noise);
        const double z = std::abs(e.mean - delta) / e.std_error;
        worst = std::max(worst, z);
        inside += z <= 3.0 ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    return {inside == 20 && secs < 120.0, fmt("%d/20 within 3 SE (worst %.2f SE), %.1f s", inside, worst, secs)};
}

// 3. Alternating optimization with exhaustive phase steps.
Outcome ao_behavior()
{
    const auto cfg = testsupport::small_config(4, 4, 2, 2, 2, 3);
    int monotone = 0, exits = 0, improved = 0;
    for (std::uint64_t s = 0; s < 50; ++s)
    {
        Rng rng = make_rng(s, "acceptance-ao");
        const auto t = run_ao(testsupport::iid_channels(cfg, rng), cfg, PhaseMethod::Exhaustive);
        bool mono = true, exit_ok = true;
        for (std::size_t k = 1; k < t.iterations.size(); ++k)
        {
            mono = mono && t.iterations[k].phase_step_delta <= t.iterations[k - 1].delta + 1e-10;
            const bool last = k + 1 == t.iterations.size();
            const bool below = t.iterations[k].err <= t.tolerance;
            exit_ok = exit_ok && (last ? (below || t.iterations_used == cfg.max_ao_iterations) : !below);
        }
        exit_ok = exit_ok && t.converged == (t.iterations.back().err <= t.tolerance);
        monotone += mono ? 1 : 0;
        exits += exit_ok ? 1 : 0;
        improved += t.final_delta() <= t.initial_delta() ? 1 : 0;
    }
    return {monotone == 50 && exits == 50 && improved >= 48,
            fmt("phase steps monotone %d/50, exit rule %d/50, final <= initial %d/50", monotone, exits, improved)};
}

// 4. Hybrid transceiver constraints.
Outcome transceiver_constraints()
{
    const auto t0 = Clock::now();
    double modulus = 0.0, power = 0.0;
    int monotone = 0;
    Rng rng = make_rng(4, "acceptance-transceiver");
    auto cfg = paper_preset().base;
    for (int d = 0; d < 1000; ++d)
    {
        cfg.n_streams = 1 + d % 8;
        const auto svd = svd_decompose(random_matrix(16, 12, rng));
        const auto pre = design_hybrid_precoder(svd, cfg);
        const auto comb = design_hybrid_combiner(svd, cfg);
        const HybridTransceiver tx{pre.analog, pre.digital, comb.analog.adjoint(), comb.digital.adjoint()};
        modulus = std::max({modulus, (tx.f_analog.cwiseAbs().array() - 1.0 / std::sqrt(12.0)).abs().maxCoeff(),
                            (tx.w_analog_h.cwiseAbs().array() - 0.25).abs().maxCoeff()});
        power = std::max({power, std::abs(tx.precoder().squaredNorm() - cfg.n_streams),
                          std::abs(tx.combiner().squaredNorm() - cfg.n_streams)});
        bool mono = true;
        for (const auto *f : {&pre, &comb})
            for (std::size_t i = 1; i < f->residual_history.size(); ++i)
                mono = mono && f->residual_history[i] <= f->residual_history[i - 1] + 1e-12;
        monotone += mono ? 1 : 0;
    }
    return {modulus <= 1e-9 && power <= 1e-9 && monotone == 1000,
            fmt("max modulus dev %.1e, max power dev %.1e, monotone residual %d/1000, %.1f s", modulus, power,
                monotone, seconds_since(t0))};
}

struct PresetRun
{
    ExperimentResult result;
    double seconds = 0.0;
};

// 5. Ordinal reproduction with the reference preset.
Outcome ordinal_reproduction(const PresetRun &run)
{
    std::map<std::string, double> med;
    for (const auto &s : run.result.summary)
        med[s.arm] = s.median;
    const double none = med["no-ris"], mono = med["mono-1x12"];
    bool pass = run.result.ok() && none > mono && mono > med["dist-12x1"];
    for (const auto *arm : {"dist-3x4", "dist-6x2", "dist-12x1"})
        pass = pass && med[arm] < mono;
    return {pass && run.seconds < 1800.0,
            fmt("medians no-RIS %.3f, 1x12 %.3f, 3x4 %.3f, 6x2 %.3f, 12x1 %.3f, failed %d, %.0f s", none, mono,
                med["dist-3x4"], med["dist-6x2"], med["dist-12x1"], run.result.failed, run.seconds)};
}

// 6. Conditioning of the optimized effective channel, 200 seeds.
Outcome conditioning(const PresetRun &run, const ExperimentSpec &spec)
{
    std::vector<double> mono, dist;
    auto collect = [&](const TrialResult &t) {
        if (t.failed)
            return;
        if (t.arm == "mono-1x12")
            mono.push_back(t.condition_number);
        else if (t.arm == "dist-12x1")
            dist.push_back(t.condition_number);
    };
    for (const auto &t : run.result.trials)
        collect(t);
    for (const auto &arm : spec.arms)
        if (arm.name == "mono-1x12" || arm.name == "dist-12x1")
            for (int trial = spec.trials; trial < 200; ++trial)
                collect(run_trial(spec, arm, trial));
    const double m1 = median(mono), m12 = median(dist);
    return {mono.size() >= 180 && dist.size() >= 180 && m12 < m1,
            fmt("median cond 12x1 %.1f vs 1x12 %.1f over %zu/%zu seeds", m12, m1, dist.size(), mono.size())};
}

// 7. Protocol message order and least-squares behaviour.
Outcome protocol_conformance()
{
    int runs = 0, conforming = 0;
    const MessageKind order[] = {MessageKind::StartCe, MessageKind::Ack, MessageKind::SendS, MessageKind::CeComplete};
    for (std::uint64_t s = 0; s < 200; ++s)
    {
        auto cfg = testsupport::small_config(8, 8, 2, 4, 1 + static_cast<int>(s % 4), 3);
        cfg.n_candidate_ues = 10;
        cfg.acceptance_probability = 0.9;
        cfg.ack_timeout_probability = s % 2 ? 0.05 : 0.0;
        Rng rng = make_rng(s, "acceptance-protocol");
        auto pc = cfg;
        pc.n_cooperating_ues = 10;
        const auto ch = testsupport::iid_channels(pc, rng);
        const auto pop = make_population(pc, rng);
        SelectionResult sel;
        try
        {
            sel = ue_select(pop, ch, cfg, rng);
        }
        catch (const SelectionShortfall &)
        {
            continue;   // the log of a failed selection is not returned
        }
        ++runs;
        // Timed-out UEs leave a lone START_CE; everything else is a full sequential block.
        bool ok = sel.log.front().kind == MessageKind::RequestToParticipate;
        std::size_t k = 0;
        while (k < sel.log.size() && sel.log[k].kind != MessageKind::StartCe)
            ++k;
        std::vector<int> seen;
        while (ok && k < sel.log.size())
        {
            const int ue = sel.log[k].ue;
            ok = sel.log[k].kind == MessageKind::StartCe &&
                 std::find(seen.begin(), seen.end(), ue) == seen.end();
            seen.push_back(ue);
            if (k + 1 < sel.log.size() && sel.log[k + 1].kind != MessageKind::StartCe)
            {
                for (int j = 0; j < 4 && ok; ++j)
                    ok = k + j < sel.log.size() && sel.log[k + j].kind == order[j] && sel.log[k + j].ue == ue;
                k += 4;
            }
            else
                ++k;
        }
        ok = ok && seen == sel.shortlist;
        conforming += ok ? 1 : 0;
    }

    Rng rng = make_rng(7, "acceptance-ls");
    double exact_err = 0.0;
    for (int m = 1; m <= 4; ++m)
    {
        const CMat q = random_matrix(16, m, rng);
        exact_err = std::max(exact_err, (ls_estimate(q, pilot_matrix(m, 1.0), 0.0, rng) - q).norm());
    }
    const CMat q = random_matrix(16, 4, rng);
    std::vector<double> lo, hi;
    for (int d = 0; d < 500; ++d)
    {
        lo.push_back((ls_estimate(q, pilot_matrix(4, 1.0), 0.1, rng) - q).squaredNorm());
        hi.push_back((ls_estimate(q, pilot_matrix(4, 10.0), 0.1, rng) - q).squaredNorm());
    }
    const double ratio = median(lo) / median(hi);
    return {runs > 0 && conforming == runs && exact_err <= 1e-10 && ratio >= 5.0 && ratio <= 20.0,
            fmt("order ok on %d/%d runs, noiseless LS error %.1e, +10 dB error ratio %.2f", conforming, runs,
                exact_err, ratio)};
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 8. Byte-identical reruns and bitwise replay through the command line tool.
Outcome determinism(const std::string &cli)
{
    const fs::path root = fs::current_path() / "acceptance_determinism";
    fs::remove_all(root);
    const int trials = 3;
    const std::string run = cli + " run --preset paper-fig5 --method bp --trials " + std::to_string(trials) +
                            " --seed 20261016 --out ";
    bool pass = std::system((run + (root / "a").string() + " > /dev/null").c_str()) == 0 &&
                std::system((run + (root / "b").string() + " > /dev/null").c_str()) == 0;
    int identical = 0;
    for (const char *f : {"results.csv", "summary.csv", "plotdata.csv", "seeds.csv", "experiment.json"})
    {
        const auto x = slurp(root / "a" / f);
        identical += !x.empty() && x == slurp(root / "b" / f) ? 1 : 0;
    }
    pass = pass && identical == 5;
    int replayed = 0;
    for (int t = 0; t < trials; ++t)
    {
        const std::string cmd = cli + " replay --out " + (root / "a").string() + " --trial-id " + std::to_string(t) +
                                " > " + (root / ("replay" + std::to_string(t) + ".txt")).string();
        replayed += std::system(cmd.c_str()) == 0 ? 1 : 0;
    }
    pass = pass && replayed == trials;
    return {pass, fmt("%d/5 output files identical, %d/%d trial ids replay bitwise", identical, replayed, trials)};
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Acceptance criteria"};
    std::string cli = "uerislink";
    std::vector<int> only;
    app.add_option("--cli", cli, "Path to the command line tool");
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);

    auto wanted = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };

    ExperimentSpec preset = paper_preset();
    PresetRun preset_run;
    if (wanted(5) || wanted(6))
    {
        const auto t0 = Clock::now();
        preset_run.result = run_experiment(preset);
        preset_run.seconds = seconds_since(t0);
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence (BP vs ES)", oracle_equivalence},
        {"analytic vs empirical MSE", analytic_vs_empirical},
        {"AO behaviour", ao_behavior},
        {"transceiver constraints", transceiver_constraints},
        {"ordinal reproduction (reference preset)", [&] { return ordinal_reproduction(preset_run); }},
        {"conditioning trend", [&] { return conditioning(preset_run, preset); }},
        {"protocol conformance", protocol_conformance},
        {"determinism and replay", [&] { return determinism(cli); }},
    };

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k)
    {
        const int id = static_cast<int>(k) + 1;
        if (!wanted(id))
            continue;
        Outcome o;
        try
        {
            o = criteria[k].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
