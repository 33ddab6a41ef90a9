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

#include "uerislink/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <variant>

namespace uerislink {

namespace {

using FieldRef = std::variant<int ScenarioConfig::*,
                              double ScenarioConfig::*,
                              bool ScenarioConfig::*,
                              std::uint64_t ScenarioConfig::*,
                              std::optional<double> ScenarioConfig::*>;

struct Field
{
    const char *name;
    FieldRef ref;
};

const std::vector<Field> &fields()
{
    using C = ScenarioConfig;
    static const std::vector<Field> table = {
        {"n_tx_antennas", &C::n_tx_antennas},
        {"n_rx_antennas", &C::n_rx_antennas},
        {"n_tx_rf_chains", &C::n_tx_rf_chains},
        {"n_rx_rf_chains", &C::n_rx_rf_chains},
        {"n_streams", &C::n_streams},
        {"n_cooperating_ues", &C::n_cooperating_ues},
        {"ris_elements_per_ue", &C::ris_elements_per_ue},
        {"phase_cardinality", &C::phase_cardinality},
        {"ue_ris_mode", &C::ue_ris_mode},
        {"symbol_power", &C::symbol_power},
        {"noise_power", &C::noise_power},
        {"receive_snr_db", &C::receive_snr_db},
        {"carrier_frequency_hz", &C::carrier_frequency_hz},
        {"tx_rx_distance_m", &C::tx_rx_distance_m},
        {"element_spacing_multiplier", &C::element_spacing_multiplier},
        {"ris_to_patch_offset_m", &C::ris_to_patch_offset_m},
        {"rician_k_db", &C::rician_k_db},
        {"ris_link_gain_db", &C::ris_link_gain_db},
        {"no_los", &C::no_los},
        {"normalize_channel_gain", &C::normalize_channel_gain},
        {"ao_tolerance", &C::ao_tolerance},
        {"max_ao_iterations", &C::max_ao_iterations},
        {"near_optimality_gap", &C::near_optimality_gap},
        {"es_budget", &C::es_budget},
        {"n_candidate_ues", &C::n_candidate_ues},
        {"n_shortlist_ues", &C::n_shortlist_ues},
        {"acceptance_probability", &C::acceptance_probability},
        {"mobility_threshold", &C::mobility_threshold},
        {"pilot_energy", &C::pilot_energy},
        {"ack_timeout_probability", &C::ack_timeout_probability},
        {"rng_seed", &C::rng_seed},
        {"n_symbols", &C::n_symbols},
        {"constellation_order", &C::constellation_order},
    };
    return table;
}

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool is_square_qam(int order)
{
    if (order < 4)
        return false;
    int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    return root * root == order && (root & (root - 1)) == 0;
}

} // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::invalid_argument([&] {
          std::string msg = "invalid scenario config:";
          for (const auto &i : issues)
              msg += "\n  " + i.field + ": " + i.message;
          return msg;
      }()),
      issues_(std::move(issues))
{
}

std::vector<ConfigIssue> check(const ScenarioConfig &c)
{
    std::vector<ConfigIssue> out;
    auto fail = [&](const char *field, const std::string &msg) { out.push_back({field, msg}); };

    if (c.n_tx_antennas < 1) fail("n_tx_antennas", "must be positive");
    if (c.n_rx_antennas < 1) fail("n_rx_antennas", "must be positive");
    if (c.n_tx_rf_chains < 1) fail("n_tx_rf_chains", "must be positive");
    if (c.n_rx_rf_chains < 1) fail("n_rx_rf_chains", "must be positive");
    if (c.n_streams < 1) fail("n_streams", "must be positive");
    if (c.n_streams > c.n_rx_rf_chains) fail("n_streams", "streams exceed RX RF chains");
    if (c.n_streams > c.n_tx_rf_chains) fail("n_streams", "streams exceed TX RF chains");
    if (c.n_rx_rf_chains > c.n_rx_antennas) fail("n_rx_rf_chains", "RX RF chains exceed RX antennas");
    if (c.n_tx_rf_chains > c.n_tx_antennas) fail("n_tx_rf_chains", "TX RF chains exceed TX antennas");
    if (c.n_cooperating_ues < 0) fail("n_cooperating_ues", "must be nonnegative");
    if (c.ris_elements_per_ue < 1) fail("ris_elements_per_ue", "must be positive");
    if (c.ue_ris_mode && c.ris_elements_per_ue > 4) fail("ris_elements_per_ue", "UE RIS exceeds 4 elements");
    if (c.phase_cardinality < 1) fail("phase_cardinality", "must be at least 1");
    if (!(c.symbol_power > 0.0)) fail("symbol_power", "must be positive");
    if (!(c.noise_power > 0.0)) fail("noise_power", "must be positive");
    if (c.receive_snr_db && !std::isfinite(*c.receive_snr_db)) fail("receive_snr_db", "must be finite");
    if (!(c.carrier_frequency_hz > 0.0)) fail("carrier_frequency_hz", "must be positive");
    if (!(c.tx_rx_distance_m > 0.0)) fail("tx_rx_distance_m", "must be positive");
    if (c.element_spacing_multiplier < 1) fail("element_spacing_multiplier", "must be a positive integer");
    if (!(c.ris_to_patch_offset_m > 0.0)) fail("ris_to_patch_offset_m", "must be positive");
    if (!std::isfinite(c.rician_k_db)) fail("rician_k_db", "must be finite");
    if (!std::isfinite(c.ris_link_gain_db)) fail("ris_link_gain_db", "must be finite");
    if (!(c.ao_tolerance >= 0.0)) fail("ao_tolerance", "must be nonnegative");
    if (c.max_ao_iterations < 1) fail("max_ao_iterations", "must be positive");
    if (!(c.near_optimality_gap >= 0.0)) fail("near_optimality_gap", "must be nonnegative");
    if (!(c.es_budget >= 1.0)) fail("es_budget", "must be at least 1");
    if (c.n_candidate_ues < 0) fail("n_candidate_ues", "must be nonnegative");
    else if (c.candidate_count() < c.n_cooperating_ues) fail("n_candidate_ues", "fewer candidates than cooperating UEs");
    if (c.n_shortlist_ues < 0) fail("n_shortlist_ues", "must be nonnegative");
    else if (c.n_shortlist_ues > 0 &&
             (c.n_shortlist_ues < c.n_cooperating_ues || c.n_shortlist_ues > c.candidate_count()))
        fail("n_shortlist_ues", "shortlist must lie between N_d and the candidate count");
    if (!(c.acceptance_probability >= 0.0 && c.acceptance_probability <= 1.0))
        fail("acceptance_probability", "must lie in [0, 1]");
    if (!(c.ack_timeout_probability >= 0.0 && c.ack_timeout_probability <= 1.0))
        fail("ack_timeout_probability", "must lie in [0, 1]");
    if (std::isnan(c.mobility_threshold)) fail("mobility_threshold", "must be a number");
    if (!(c.pilot_energy > 0.0)) fail("pilot_energy", "must be positive");
    if (c.n_symbols < 1) fail("n_symbols", "must be positive");
    if (!is_square_qam(c.constellation_order)) fail("constellation_order", "must be a square QAM order (4, 16, 64, ...)");
    return out;
}

ScenarioConfig validate(const ScenarioConfig &config)
{
    auto issues = check(config);
    if (!issues.empty())
        throw ConfigError(std::move(issues));
    return config;
}

ScenarioConfig parse_config(std::istream &in)
{
    ScenarioConfig config;
    std::vector<ConfigIssue> issues;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
        {
            issues.push_back({"line " + std::to_string(line_no), "expected 'key = value'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        const Field *field = nullptr;
        for (const auto &f : fields())
            if (key == f.name)
                field = &f;
        if (!field)
        {
            issues.push_back({key, "unknown key"});
            continue;
        }

        try
        {
            std::size_t used = 0;
            std::visit(
                [&](auto member) {
                    using T = std::remove_cvref_t<decltype(config.*member)>;
                    if constexpr (std::is_same_v<T, int>)
                        config.*member = std::stoi(value, &used);
                    else if constexpr (std::is_same_v<T, double>)
                        config.*member = std::stod(value, &used);
                    else if constexpr (std::is_same_v<T, std::uint64_t>)
                        config.*member = std::stoull(value, &used);
                    else if constexpr (std::is_same_v<T, bool>)
                    {
                        if (value != "true" && value != "false")
                            throw std::invalid_argument("expected true or false");
                        config.*member = value == "true";
                        used = value.size();
                    }
                    else
                    {
                        if (value == "none")
                        {
                            config.*member = std::nullopt;
                            used = value.size();
                        }
                        else
                            config.*member = std::stod(value, &used);
                    }
                },
                field->ref);
            if (used != value.size())
                throw std::invalid_argument("trailing characters");
        }
        catch (const std::exception &)
        {
            issues.push_back({key, "malformed value '" + value + "'"});
        }
    }
    if (!issues.empty())
        throw ConfigError(std::move(issues));
    return config;
}

ScenarioConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path);
    return parse_config(in);
}

std::string to_key_value(const ScenarioConfig &config)
{
    std::ostringstream os;
    for (const auto &f : fields())
    {
        os << f.name << " = ";
        std::visit(
            [&](auto member) {
                using T = std::remove_cvref_t<decltype(config.*member)>;
                const auto &v = config.*member;
                if constexpr (std::is_same_v<T, double>)
                    os << format_double(v);
                else if constexpr (std::is_same_v<T, bool>)
                    os << (v ? "true" : "false");
                else if constexpr (std::is_same_v<T, std::optional<double>>)
                    os << (v ? format_double(*v) : std::string("none"));
                else
                    os << v;
            },
            f.ref);
        os << '\n';
    }
    return os.str();
}

cd PhaseSet::phasor(int index) const
{
    const double a = angles.at(static_cast<std::size_t>(index));
    return {std::cos(a), std::sin(a)};
}

PhaseSet build_phase_set(int k)
{
    if (k < 1)
        throw std::invalid_argument("phase set cardinality must be at least 1");
    PhaseSet set;
    set.angles.reserve(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m)
        set.angles.push_back(2.0 * kPi * m / k);
    return set;
}

double distance(const Vec3 &a, const Vec3 &b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

double Geometry::far_field_ratio() const
{
    double ratio = std::numeric_limits<double>::infinity();
    for (const auto &ue : ues)
        ratio = std::min({ratio, distance(tx, ue) / ris_to_patch_offset, distance(ue, rx) / ris_to_patch_offset});
    return ratio;
}

Geometry sample_geometry(const ScenarioConfig &config, Rng &rng)
{
    Geometry g;
    const double d = config.tx_rx_distance_m;
    g.tx = {0.0, 0.0, 0.0};
    g.rx = {d, 0.0, 0.0};
    g.ris_to_patch_offset = config.ris_to_patch_offset_m;
    g.wavelength = config.wavelength();

    const double radius = 0.4 * d;
    const double keep_out = std::max(0.5, kFarFieldRatio * config.ris_to_patch_offset_m);
    const Vec3 centre{0.5 * d, 0.0, 0.0};

    g.ues.reserve(static_cast<std::size_t>(config.n_cooperating_ues));
    while (static_cast<int>(g.ues.size()) < config.n_cooperating_ues)
    {
        // Uniform in the disc by inverse-CDF on the radius.
        const double r = radius * std::sqrt(uniform(rng, 0.0, 1.0));
        const double phi = uniform(rng, 0.0, 2.0 * kPi);
        const Vec3 p{centre.x + r * std::cos(phi), centre.y + r * std::sin(phi), 0.0};
        if (distance(p, g.tx) <= keep_out || distance(p, g.rx) <= keep_out)
            continue;
        g.ues.push_back(p);
        g.ue_orientation.push_back(uniform(rng, -kPi, kPi));
    }
    return g;
}

} // namespace uerislink
