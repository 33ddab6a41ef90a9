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

#ifndef UERISLINK_HARNESS_HPP
#define UERISLINK_HARNESS_HPP

#include "uerislink/ao.hpp"
#include "uerislink/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace uerislink {

struct Arm
{
    std::string name;
    int n_ues = 0;                        // N_d; 0 is the no-RIS baseline
    int elements = 1;                     // M
    std::optional<PhaseMethod> method;    // defaults to the experiment's method
    bool no_los = false;
};

struct ExperimentSpec
{
    std::string preset;                   // informational
    std::vector<Arm> arms;
    int trials = 100;
    ScenarioConfig base;
    PhaseMethod method = PhaseMethod::BranchPrune;
    bool ideal_csi = false;               // skip UE selection and channel estimation
    bool record_timing = false;           // wall_time is "NA" otherwise, keeping outputs byte-stable
    int jobs = 1;
};

// no-RIS, one 12-element RIS, and 3x4, 6x2, 12x1 distributed arms at the
// N_t=12, N_r=16, N=8, K=3, 28 GHz, 60 m, 25 dB operating point.
ExperimentSpec paper_preset();

// Throws ConfigError on malformed arms or when a distributed preset arm violates N_d * M = 12.
void validate_spec(const ExperimentSpec &spec);

// The per-arm scenario: base config with the arm's N_d, M and flags applied, noise calibrated.
ScenarioConfig arm_config(const ExperimentSpec &spec, const Arm &arm);

struct TrialSeeds
{
    std::uint64_t trial = 0;
    std::uint64_t geometry = 0;
    std::uint64_t channel = 0;
    std::uint64_t population = 0;
    std::uint64_t protocol = 0;
    std::uint64_t symbols = 0;
    std::uint64_t noise = 0;
};

TrialSeeds trial_seeds(std::uint64_t base_seed, int trial);

struct TrialResult
{
    std::string arm;
    int trial = 0;
    TrialSeeds seeds;
    bool failed = false;
    std::string error;
    double delta_analytic = 0.0;     // on the true channels
    double mse_empirical = 0.0;
    double mse_std_error = 0.0;
    int iterations = 0;
    std::uint64_t nodes_expanded = 0;
    double wall_time = 0.0;
    double condition_number = 0.0;   // sigma_max / smallest nonzero sigma of the optimized H
    bool converged = false;
};

struct ArmSummary
{
    std::string arm;
    int n_ues = 0;
    int elements = 0;
    int trials = 0;
    int failed = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double median_empirical = 0.0;
};

struct ExperimentResult
{
    std::vector<TrialResult> trials;   // arm-major, trial-minor, in spec order
    std::vector<ArmSummary> summary;
    int failed = 0;
    bool ok() const { return failed * 10 <= static_cast<int>(trials.size()); }
};

// One trial is a pure function of (spec, arm, trial index); module errors are
// recorded in the result rather than thrown.
TrialResult run_trial(const ExperimentSpec &spec, const Arm &arm, int trial);

ExperimentResult run_experiment(const ExperimentSpec &spec);

// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

std::vector<ArmSummary> summarize(const ExperimentSpec &spec, const std::vector<TrialResult> &trials);

// Writes results.csv, summary.csv, plotdata.csv and seeds.csv into `dir`, plus
// experiment.json describing the spec for `replay`.
void emit_results(const ExperimentSpec &spec, const ExperimentResult &result, const std::string &dir);

std::string spec_to_json(const ExperimentSpec &spec);
ExperimentSpec spec_from_json(const std::string &text);

// Decimal text that parses back to the same double.
std::string exact(double v);

} // namespace uerislink

#endif
