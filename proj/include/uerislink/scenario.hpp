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

#ifndef UERISLINK_SCENARIO_HPP
#define UERISLINK_SCENARIO_HPP

#include "uerislink/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uerislink {

// All dimensional and physical parameters of one experiment. Field names are
// also the keys of the key-value config file.
struct ScenarioConfig
{
    // Array and stream dimensions
    int n_tx_antennas = 12;        // N_t
    int n_rx_antennas = 16;        // N_r
    int n_tx_rf_chains = 8;        // N_rt
    int n_rx_rf_chains = 8;        // N_rs
    int n_streams = 8;             // N
    int n_cooperating_ues = 12;    // N_d
    int ris_elements_per_ue = 1;   // M
    int phase_cardinality = 3;     // K, size of the discrete phase alphabet
    bool ue_ris_mode = true;       // caps M at 4 (handset-mounted strips)

    // Link budget
    double symbol_power = 1.0;                  // p
    double noise_power = 1e-3;                  // sigma_n^2, overwritten when receive_snr_db is set
    std::optional<double> receive_snr_db = 25.0;
    double carrier_frequency_hz = 28e9;
    double tx_rx_distance_m = 60.0;
    int element_spacing_multiplier = 1;         // RIS element spacing k * lambda / 2
    double ris_to_patch_offset_m = 0.05;        // d'
    double rician_k_db = 10.0;
    double ris_link_gain_db = -10.0;            // per-element cascade power vs direct link, UE at midpoint
    bool no_los = false;
    bool normalize_channel_gain = true;

    // Optimizer
    double ao_tolerance = 1e-4;                 // relative to delta_0
    int max_ao_iterations = 50;
    double near_optimality_gap = 0.01;          // relative epsilon of the pruned search
    double es_budget = 1e7;

    // Protocol
    int n_candidate_ues = 0;                    // N_D; 0 means N_d
    int n_shortlist_ues = 0;                    // L_M; 0 means min(N_D, 2 N_d)
    double acceptance_probability = 1.0;
    double mobility_threshold = 1.0;            // UEs above it are treated as mobile
    double pilot_energy = 1.0;
    double ack_timeout_probability = 0.0;

    // Monte Carlo
    std::uint64_t rng_seed = 1;
    int n_symbols = 200;
    int constellation_order = 64;

    int candidate_count() const { return n_candidate_ues > 0 ? n_candidate_ues : n_cooperating_ues; }
    double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }
    int total_ris_elements() const { return n_cooperating_ues * ris_elements_per_ue; }

    bool operator==(const ScenarioConfig &) const = default;
};

struct ConfigIssue
{
    std::string field;
    std::string message;
};

class ConfigError : public std::invalid_argument
{
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue> &issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

// One entry per violated invariant; empty means valid.
std::vector<ConfigIssue> check(const ScenarioConfig &config);

// Returns the config unchanged when valid, throws ConfigError naming every violation otherwise.
ScenarioConfig validate(const ScenarioConfig &config);

// Flat "key = value" format, '#' starts a comment. Unknown keys and malformed values throw ConfigError.
ScenarioConfig parse_config(std::istream &in);
ScenarioConfig load_config(const std::string &path);
std::string to_key_value(const ScenarioConfig &config);

// Discrete RIS phase alphabet: K uniformly spaced angles starting at 0.
struct PhaseSet
{
    std::vector<double> angles;

    int size() const { return static_cast<int>(angles.size()); }
    cd phasor(int index) const;
};

PhaseSet build_phase_set(int k);

struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;
};

double distance(const Vec3 &a, const Vec3 &b);

// Minimum link-distance / d' ratio for treating the antenna-patch channel as the RIS channel.
inline constexpr double kFarFieldRatio = 100.0;

struct Geometry
{
    Vec3 tx;
    Vec3 rx;
    std::vector<Vec3> ues;
    std::vector<double> ue_orientation;   // RIS strip axis angle in the xy-plane, radians
    double ris_to_patch_offset = 0.05;
    double wavelength = 0.0;

    // Smallest of d(tx, ue_i)/d' and d(ue_i, rx)/d' over all UEs; +inf without UEs.
    double far_field_ratio() const;
};

// TX at the origin, RX on the +x axis. UEs uniform in a disc of radius 0.4 D around
// the TX-RX midpoint, rejecting samples too close to either end.
Geometry sample_geometry(const ScenarioConfig &config, Rng &rng);

} // namespace uerislink

#endif
