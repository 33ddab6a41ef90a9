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

// Command line front end: run an experiment, validate a configuration, replay a trial.

#include "uerislink/harness.hpp"
#include "uerislink/mse.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace uerislink;

namespace {

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_issues(const ConfigError &e)
{
    for (const auto &issue : e.issues())
        std::cerr << "  " << issue.field << ": " << issue.message << '\n';
}

// results.csv rows keyed by (arm, trial)
std::map<std::pair<std::string, int>, std::vector<std::string>> read_results(const std::string &path)
{
    std::map<std::pair<std::string, int>, std::vector<std::string>> rows;
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line))
    {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');)
            cells.push_back(cell);
        if (cells.size() >= 2)
            rows[{cells[0], std::stoi(cells[1])}] = cells;
    }
    return rows;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Distributed UE-mounted RIS link simulator"};
    app.require_subcommand(1);

    std::string config_path, preset = "paper-fig5", method = "bp", out_dir = "out";
    int trials = 100, jobs = 1;
    std::optional<std::uint64_t> seed;
    bool ideal_csi = false, timing = false;

    auto *run = app.add_subcommand("run", "Run the Monte-Carlo experiment and write CSV outputs");
    run->add_option("--config", config_path, "key=value scenario file overriding the preset");
    run->add_option("--preset", preset, "Experiment preset")->check(CLI::IsMember({"paper-fig5"}));
    run->add_option("--method", method, "Phase search method")->check(CLI::IsMember({"es", "bp"}));
    run->add_option("--trials", trials, "Trials per arm")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Base seed");
    run->add_flag("--ideal-csi", ideal_csi, "Skip UE selection and channel estimation");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--timing", timing, "Record wall time (outputs are then not byte-stable)");

    std::string validate_path;
    auto *val = app.add_subcommand("validate", "Check a scenario file against the constraints");
    val->add_option("config", validate_path, "key=value scenario file")->required();

    std::string replay_dir = "out", replay_arm;
    int trial_id = 0;
    auto *rep = app.add_subcommand("replay", "Recompute one trial from a previous run and compare");
    rep->add_option("--out", replay_dir, "Directory of the previous run");
    rep->add_option("--trial-id", trial_id, "Trial index")->required();
    rep->add_option("--arm", replay_arm, "Arm name (all arms when omitted)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            ExperimentSpec spec = paper_preset();
            spec.preset = preset;
            if (!config_path.empty())
                spec.base = load_config(config_path);
            if (seed)
                spec.base.rng_seed = *seed;
            spec.trials = trials;
            spec.method = parse_phase_method(method);
            spec.ideal_csi = ideal_csi;
            spec.record_timing = timing;
            spec.jobs = jobs;
            const ExperimentResult result = run_experiment(spec);
            emit_results(spec, result, out_dir);
            for (const auto &s : result.summary)
                std::printf("%-10s N_d=%-2d M=%-2d median=%.4f IQR=[%.4f, %.4f] failed=%d/%d\n", s.arm.c_str(),
                            s.n_ues, s.elements, s.median, s.q1, s.q3, s.failed, s.trials);
            for (const auto &t : result.trials)
                if (t.failed)
                    std::fprintf(stderr, "trial %s/%d failed: %s\n", t.arm.c_str(), t.trial, t.error.c_str());
            if (!result.ok())
            {
                std::fprintf(stderr, "more than 10%% of trials failed (%d)\n", result.failed);
                return 3;
            }
            return 0;
        }
        if (*val)
        {
            const ScenarioConfig cfg = load_config(validate_path);
            const auto issues = check(with_calibrated_noise(cfg));
            if (issues.empty())
            {
                std::cout << "ok\n";
                return 0;
            }
            std::cerr << "invalid configuration:\n";
            print_issues(ConfigError(issues));
            return 2;
        }
        if (*rep)
        {
            const ExperimentSpec spec = spec_from_json(read_file(replay_dir + "/experiment.json"));
            if (trial_id < 0 || trial_id >= spec.trials)
                throw std::out_of_range("trial id outside [0, " + std::to_string(spec.trials) + ")");
            const auto recorded = read_results(replay_dir + "/results.csv");
            bool all_match = true, any = false;
            for (const auto &arm : spec.arms)
            {
                if (!replay_arm.empty() && arm.name != replay_arm)
                    continue;
                any = true;
                const TrialResult t = run_trial(spec, arm, trial_id);
                const auto it = recorded.find({arm.name, trial_id});
                const bool match = it != recorded.end() && it->second.size() >= 5 &&
                                   it->second[3] == exact(t.delta_analytic) &&
                                   it->second[4] == exact(t.mse_empirical);
                all_match = all_match && match;
                std::printf("%s trial=%d seed=%llu delta=%s mse=%s iterations=%d nodes=%llu %s\n", arm.name.c_str(),
                            trial_id, static_cast<unsigned long long>(t.seeds.trial), exact(t.delta_analytic).c_str(),
                            exact(t.mse_empirical).c_str(), t.iterations,
                            static_cast<unsigned long long>(t.nodes_expanded), match ? "MATCH" : "MISMATCH");
            }
            if (!any)
                throw std::invalid_argument("unknown arm " + replay_arm);
            return all_match ? 0 : 4;
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "invalid configuration:\n";
        print_issues(e);
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
