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

#include "uerislink/harness.hpp"

#include "uerislink/mse.hpp"
#include "uerislink/protocol.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace uerislink {

namespace {

constexpr int kPresetElementBudget = 12;

std::ofstream open_output(const std::filesystem::path &path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    return os;
}

double condition_number(const CMat &h)
{
    const RVec s = svd_decompose(h).sigma;
    if (s.size() == 0 || s(0) == 0.0)
        return std::numeric_limits<double>::infinity();
    double smallest = s(0);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-10 * s(0))
            smallest = s(i);
    return s(0) / smallest;
}

} // namespace

std::string exact(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

ExperimentSpec paper_preset()
{
    ExperimentSpec spec;
    spec.preset = "paper-fig5";
    spec.base = ScenarioConfig{};
    spec.base.n_tx_antennas = 12;
    spec.base.n_rx_antennas = 16;
    spec.base.n_streams = 8;
    spec.base.n_tx_rf_chains = 8;
    spec.base.n_rx_rf_chains = 8;
    spec.base.phase_cardinality = 3;
    spec.base.carrier_frequency_hz = 28e9;
    spec.base.tx_rx_distance_m = 60.0;
    spec.base.receive_snr_db = 25.0;
    spec.base.n_symbols = 200;
    spec.base.constellation_order = 64;
    spec.arms = {
        {"no-ris", 0, 1, std::nullopt, false},
        {"mono-1x12", 1, 12, std::nullopt, false},
        {"dist-3x4", 3, 4, std::nullopt, false},
        {"dist-6x2", 6, 2, std::nullopt, false},
        {"dist-12x1", 12, 1, std::nullopt, false},
    };
    spec.trials = 100;
    return spec;
}

void validate_spec(const ExperimentSpec &spec)
{
    std::vector<ConfigIssue> issues;
    if (spec.trials < 1)
        issues.push_back({"trials", "must be positive"});
    if (spec.jobs < 1)
        issues.push_back({"jobs", "must be positive"});
    if (spec.arms.empty())
        issues.push_back({"arms", "at least one arm required"});
    for (const auto &arm : spec.arms)
    {
        if (arm.name.empty() || arm.name.find_first_of(",\"\n") != std::string::npos)
            issues.push_back({"arms", "arm name '" + arm.name + "' is empty or contains , \" or newline"});
        if (spec.preset == "paper-fig5" && arm.n_ues > 1 && arm.n_ues * arm.elements != kPresetElementBudget)
            issues.push_back({"arms", "distributed arm " + arm.name + " must satisfy N_d * M = 12"});
        for (auto &issue : check(arm_config(spec, arm)))
            issues.push_back({arm.name + "." + issue.field, issue.message});
    }
    if (!issues.empty())
        throw ConfigError(std::move(issues));
}

ScenarioConfig arm_config(const ExperimentSpec &spec, const Arm &arm)
{
    ScenarioConfig c = spec.base;
    c.n_cooperating_ues = arm.n_ues;
    c.ris_elements_per_ue = arm.elements;
    c.ue_ris_mode = arm.elements <= 4;
    c.no_los = spec.base.no_los || arm.no_los;
    if (c.n_candidate_ues > 0 && c.n_candidate_ues < arm.n_ues)
        c.n_candidate_ues = arm.n_ues;
    if (c.n_shortlist_ues > 0)
        c.n_shortlist_ues = std::clamp(c.n_shortlist_ues, arm.n_ues, c.candidate_count());
    return with_calibrated_noise(c);
}

TrialSeeds trial_seeds(std::uint64_t base_seed, int trial)
{
    TrialSeeds s;
    s.trial = derive_seed(base_seed, "trial", static_cast<std::uint64_t>(trial));
    s.geometry = derive_seed(s.trial, "geometry");
    s.channel = derive_seed(s.trial, "channel");
    s.population = derive_seed(s.trial, "population");
    s.protocol = derive_seed(s.trial, "protocol");
    s.symbols = derive_seed(s.trial, "symbols");
    s.noise = derive_seed(s.trial, "noise");
    return s;
}

TrialResult run_trial(const ExperimentSpec &spec, const Arm &arm, int trial)
{
    TrialResult r;
    r.arm = arm.name;
    r.trial = trial;
    r.seeds = trial_seeds(spec.base.rng_seed, trial);
    const auto start = std::chrono::steady_clock::now();
    try
    {
        const ScenarioConfig cfg = validate(arm_config(spec, arm));
        const PhaseMethod method = arm.method.value_or(spec.method);

        // Geometry and channels cover every candidate UE; selection narrows them to N_d.
        ScenarioConfig population_cfg = cfg;
        population_cfg.n_cooperating_ues = cfg.candidate_count();
        Rng geometry_rng(r.seeds.geometry);
        const Geometry geometry = sample_geometry(population_cfg, geometry_rng);
        Rng channel_rng(r.seeds.channel);
        ChannelSet truth = generate_channels(population_cfg, geometry, channel_rng);
        if (cfg.normalize_channel_gain)
            truth = normalize_gain(std::move(truth), cfg);

        std::vector<int> selected;
        ChannelSet working;
        if (spec.ideal_csi)
        {
            for (int i = 0; i < cfg.n_cooperating_ues; ++i)
                selected.push_back(i);
            working = truth.subset(selected);
        }
        else
        {
            Rng protocol_rng(r.seeds.protocol);
            ChannelSet estimates;
            estimates.h_direct =
                ls_estimate(truth.h_direct, pilot_matrix(cfg.n_tx_antennas, cfg.pilot_energy), cfg.noise_power, protocol_rng);
            if (cfg.n_cooperating_ues > 0)
            {
                Rng population_rng(r.seeds.population);
                SelectionResult sel = ue_select(make_population(population_cfg, population_rng), truth, cfg, protocol_rng);
                selected = sel.selected;
                for (int ue : selected)
                {
                    const auto &rec = sel.records.at(static_cast<std::size_t>(ue));
                    estimates.g_list.push_back(rec.g_hat);
                    estimates.q_list.push_back(rec.q_hat);
                }
            }
            Geometry chosen = geometry;
            chosen.ues.clear();
            chosen.ue_orientation.clear();
            for (int ue : selected)
            {
                chosen.ues.push_back(geometry.ues.at(static_cast<std::size_t>(ue)));
                chosen.ue_orientation.push_back(geometry.ue_orientation.at(static_cast<std::size_t>(ue)));
            }
            working = farfield_identify(estimates, chosen).channels;
        }

        const AoTrace ao = run_ao(working, cfg, method);
        const ChannelSet actual = truth.subset(selected);
        const CMat h = assemble_effective_channel(actual, ao.final_ris);
        r.delta_analytic = mse_matrix(h, ao.final_tx, cfg.symbol_power, cfg.noise_power).delta;
        Rng symbol_rng(r.seeds.symbols);
        Rng noise_rng(r.seeds.noise);
        const EmpiricalMse emp = simulate_link(h, ao.final_tx, cfg.symbol_power, cfg.noise_power, cfg.n_symbols,
                                               cfg.constellation_order, symbol_rng, noise_rng);
        r.mse_empirical = emp.mean;
        r.mse_std_error = emp.std_error;
        r.iterations = ao.iterations_used;
        r.nodes_expanded = ao.total_nodes;
        r.converged = ao.converged;
        r.condition_number = condition_number(h);
    }
    catch (const std::exception &e)
    {
        r.failed = true;
        r.error = e.what();
        r.delta_analytic = std::numeric_limits<double>::quiet_NaN();
        r.mse_empirical = std::numeric_limits<double>::quiet_NaN();
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

ExperimentResult run_experiment(const ExperimentSpec &spec)
{
    validate_spec(spec);
    const std::size_t n_arms = spec.arms.size();
    const auto trials = static_cast<std::size_t>(spec.trials);
    ExperimentResult result;
    result.trials.resize(n_arms * trials);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < result.trials.size(); job = next++)
            result.trials[job] = run_trial(spec, spec.arms[job / trials], static_cast<int>(job % trials));
    };
    if (spec.jobs <= 1)
        worker();
    else
    {
        std::vector<std::jthread> pool;
        for (int j = 0; j < spec.jobs; ++j)
            pool.emplace_back(worker);
    }

    for (const auto &t : result.trials)
        result.failed += t.failed ? 1 : 0;
    result.summary = summarize(spec, result.trials);
    return result;
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<ArmSummary> summarize(const ExperimentSpec &spec, const std::vector<TrialResult> &trials)
{
    std::vector<ArmSummary> out;
    for (const auto &arm : spec.arms)
    {
        ArmSummary s;
        s.arm = arm.name;
        s.n_ues = arm.n_ues;
        s.elements = arm.elements;
        std::vector<double> deltas, empirical;
        for (const auto &t : trials)
        {
            if (t.arm != arm.name)
                continue;
            ++s.trials;
            if (t.failed)
            {
                ++s.failed;
                continue;
            }
            deltas.push_back(t.delta_analytic);
            empirical.push_back(t.mse_empirical);
        }
        s.median = quantile(deltas, 0.5);
        s.q1 = quantile(deltas, 0.25);
        s.q3 = quantile(deltas, 0.75);
        s.median_empirical = quantile(empirical, 0.5);
        out.push_back(s);
    }
    return out;
}

void emit_results(const ExperimentSpec &spec, const ExperimentResult &result, const std::string &dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        auto os = open_output(fs::path(dir) / "results.csv");
        os << "arm,trial,seed,delta_analytic,mse_empirical,iterations,nodes_expanded,wall_time\n";
        for (const auto &t : result.trials)
            os << t.arm << ',' << t.trial << ',' << t.seeds.trial << ',' << exact(t.delta_analytic) << ','
               << exact(t.mse_empirical) << ',' << t.iterations << ',' << t.nodes_expanded << ','
               << (spec.record_timing ? exact(t.wall_time) : std::string("NA")) << '\n';
    }
    {
        auto os = open_output(fs::path(dir) / "summary.csv");
        os << "arm,n_ues,elements,trials,failed,median_delta,q1_delta,q3_delta,median_mse_empirical\n";
        for (const auto &s : result.summary)
            os << s.arm << ',' << s.n_ues << ',' << s.elements << ',' << s.trials << ',' << s.failed << ','
               << exact(s.median) << ',' << exact(s.q1) << ',' << exact(s.q3) << ',' << exact(s.median_empirical)
               << '\n';
    }
    {
        auto os = open_output(fs::path(dir) / "plotdata.csv");
        os << "arm,n_ues,elements,median_delta,iqr_low,iqr_high\n";
        for (const auto &s : result.summary)
            os << s.arm << ',' << s.n_ues << ',' << s.elements << ',' << exact(s.median) << ',' << exact(s.q1)
               << ',' << exact(s.q3) << '\n';
    }
    {
        auto os = open_output(fs::path(dir) / "seeds.csv");
        os << "arm,trial,trial_seed,geometry,channel,population,protocol,symbols,noise\n";
        for (const auto &t : result.trials)
            os << t.arm << ',' << t.trial << ',' << t.seeds.trial << ',' << t.seeds.geometry << ','
               << t.seeds.channel << ',' << t.seeds.population << ',' << t.seeds.protocol << ','
               << t.seeds.symbols << ',' << t.seeds.noise << '\n';
    }
    {
        auto os = open_output(fs::path(dir) / "experiment.json");
        os << spec_to_json(spec) << '\n';
    }
}

std::string spec_to_json(const ExperimentSpec &spec)
{
    nlohmann::ordered_json j;
    j["preset"] = spec.preset;
    j["trials"] = spec.trials;
    j["method"] = to_string(spec.method);
    j["ideal_csi"] = spec.ideal_csi;
    j["record_timing"] = spec.record_timing;
    j["config"] = to_key_value(spec.base);
    auto arms = nlohmann::ordered_json::array();
    for (const auto &a : spec.arms)
    {
        nlohmann::ordered_json aj;
        aj["name"] = a.name;
        aj["n_ues"] = a.n_ues;
        aj["elements"] = a.elements;
        aj["method"] = a.method ? to_string(*a.method) : std::string();
        aj["no_los"] = a.no_los;
        arms.push_back(aj);
    }
    j["arms"] = arms;
    return j.dump(2);
}

ExperimentSpec spec_from_json(const std::string &text)
{
    const auto j = nlohmann::json::parse(text);
    ExperimentSpec spec;
    spec.preset = j.at("preset").get<std::string>();
    spec.trials = j.at("trials").get<int>();
    spec.method = parse_phase_method(j.at("method").get<std::string>());
    spec.ideal_csi = j.at("ideal_csi").get<bool>();
    spec.record_timing = j.at("record_timing").get<bool>();
    std::istringstream cfg(j.at("config").get<std::string>());
    spec.base = parse_config(cfg);
    for (const auto &aj : j.at("arms"))
    {
        Arm a;
        a.name = aj.at("name").get<std::string>();
        a.n_ues = aj.at("n_ues").get<int>();
        a.elements = aj.at("elements").get<int>();
        const auto m = aj.at("method").get<std::string>();
        if (!m.empty())
            a.method = parse_phase_method(m);
        a.no_los = aj.at("no_los").get<bool>();
        spec.arms.push_back(a);
    }
    return spec;
}

} // namespace uerislink
