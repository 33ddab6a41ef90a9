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

#include "uerislink/phaseopt.hpp"

#include "uerislink/mse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace uerislink {

namespace {

// The phase problem for a fixed transceiver. With a_e = W q_e and b_e = g_e^T F for
// RIS element e (column e of Q_i, row e of G_i):
//   W H F - I = S0 + sum_e phi_e a_e b_e,   S0 = W H_d F - I
//   delta = p ||W H F - I||_F^2 + sigma_n^2 ||W||_F^2
struct PhaseProblem
{
    double symbol_power = 1.0;
    double noise_term = 0.0;
    CMat s0;
    std::vector<CVec> a;
    std::vector<Eigen::RowVectorXcd> b;
    std::vector<cd> phasors;
    std::vector<int> elements_per_ue;

    int n_elements() const { return static_cast<int>(a.size()); }
    int n_phases() const { return static_cast<int>(phasors.size()); }
    double value(const CMat &s) const { return symbol_power * s.squaredNorm() + noise_term; }

    void apply(CMat &s, int element, cd weight) const { s.noalias() += (weight * a[static_cast<std::size_t>(element)]) * b[static_cast<std::size_t>(element)]; }

    CMat mismatch(const std::vector<int> &flat) const
    {
        CMat s = s0;
        for (int e = 0; e < n_elements(); ++e)
            apply(s, e, phasors[static_cast<std::size_t>(flat[static_cast<std::size_t>(e)])]);
        return s;
    }

    RisConfiguration to_ris(const std::vector<int> &flat, const PhaseSet &set) const
    {
        RisConfiguration ris;
        ris.phase_set = set;
        auto it = flat.begin();
        for (int m : elements_per_ue)
        {
            ris.phase_indices.emplace_back(it, it + m);
            it += m;
        }
        return ris;
    }
};

PhaseProblem build_problem(const ChannelSet &channels, const HybridTransceiver &tx, const ScenarioConfig &config,
                           const PhaseSet &phases)
{
    channels.check();
    const CMat w = tx.combiner();
    const CMat f = tx.precoder();
    if (w.cols() != channels.n_rx() || f.rows() != channels.n_tx() || w.rows() != f.cols())
        throw std::invalid_argument("phase search: transceiver does not match channel dimensions");

    PhaseProblem pb;
    pb.symbol_power = config.symbol_power;
    pb.noise_term = config.noise_power * w.squaredNorm();
    pb.s0 = w * channels.h_direct * f - CMat::Identity(w.rows(), f.cols());
    for (int i = 0; i < channels.n_ues(); ++i)
    {
        const CMat wq = w * channels.q_list[static_cast<std::size_t>(i)];
        const CMat gf = channels.g_list[static_cast<std::size_t>(i)] * f;
        pb.elements_per_ue.push_back(static_cast<int>(gf.rows()));
        for (Eigen::Index m = 0; m < gf.rows(); ++m)
        {
            pb.a.emplace_back(wq.col(m));
            pb.b.emplace_back(gf.row(m));
        }
    }
    for (int k = 0; k < phases.size(); ++k)
        pb.phasors.push_back(phases.phasor(k));
    return pb;
}

double candidate_count(int k, int elements)
{
    return std::pow(static_cast<double>(k), static_cast<double>(elements));
}

std::vector<int> flatten_checked(const RisConfiguration &ris, const PhaseProblem &pb)
{
    if (ris.n_ues() != static_cast<int>(pb.elements_per_ue.size()))
        throw std::invalid_argument("phase search: warm start covers the wrong number of UEs");
    for (std::size_t i = 0; i < pb.elements_per_ue.size(); ++i)
        if (static_cast<int>(ris.phase_indices[i].size()) != pb.elements_per_ue[i])
            throw std::invalid_argument("phase search: warm start has the wrong element count");
    ris.check();
    if (ris.phase_set.size() != pb.n_phases())
        throw std::invalid_argument("phase search: warm start uses a different phase alphabet");
    return ris.flat();
}

class BranchPrune
{
public:
    BranchPrune(const PhaseProblem &pb, std::vector<int> order, double gap, std::ostream *trace)
        : pb_(pb), order_(std::move(order)), gap_(gap), trace_(trace)
    {
        const int l = pb_.n_elements();
        const int k = pb_.n_phases();
        remaining_.assign(static_cast<std::size_t>(l + 1), 0.0);
        for (int d = l - 1; d >= 0; --d)
        {
            const auto e = static_cast<std::size_t>(order_[static_cast<std::size_t>(d)]);
            remaining_[static_cast<std::size_t>(d)] = remaining_[static_cast<std::size_t>(d + 1)] + pb_.a[e].norm() * pb_.b[e].norm();
        }
        const Eigen::Index n = pb_.s0.rows();
        stack_.assign(static_cast<std::size_t>(l + 1), CMat::Zero(n, n));
        children_.assign(static_cast<std::size_t>(l), std::vector<CMat>(static_cast<std::size_t>(k), CMat::Zero(n, n)));
        path_.assign(static_cast<std::size_t>(l), 0);
    }

    void offer(const std::vector<int> &flat, double value)
    {
        if (value < incumbent_ || (value == incumbent_ && flat < best_))
        {
            incumbent_ = value;
            best_ = flat;
        }
    }

    void run()
    {
        stack_[0] = pb_.s0;
        dfs(0);
    }

    const std::vector<int> &best() const { return best_; }
    double incumbent() const { return incumbent_; }
    std::uint64_t expanded() const { return expanded_; }
    const std::vector<std::vector<int>> &accepted() const { return accepted_; }

private:
    void dfs(int depth)
    {
        ++expanded_;
        const std::uint64_t node_id = expanded_;
        const int k = pb_.n_phases();
        const auto d = static_cast<std::size_t>(depth);
        const int element = order_[d];

        std::vector<std::pair<double, int>> ranked;
        ranked.reserve(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c)
        {
            CMat &child = children_[d][static_cast<std::size_t>(c)];
            child = stack_[d];
            pb_.apply(child, element, pb_.phasors[static_cast<std::size_t>(c)]);
            ranked.emplace_back(child.norm(), c);
        }
        std::sort(ranked.begin(), ranked.end());

        const bool leaf_level = depth + 1 == pb_.n_elements();
        for (const auto &[norm, c] : ranked)
        {
            path_[d] = c;
            if (leaf_level)
            {
                const double value = pb_.symbol_power * norm * norm + pb_.noise_term;
                const std::vector<int> flat = canonical();
                const bool better = value < incumbent_ || (value == incumbent_ && flat < best_);
                if (better)
                {
                    incumbent_ = value;
                    best_ = flat;
                    accepted_.push_back(flat);
                }
                continue;
            }
            const double slack = std::max(0.0, norm - remaining_[d + 1]);
            const double bound = pb_.symbol_power * slack * slack + pb_.noise_term;
            if (trace_)
                *trace_ << "{\"node\":" << node_id << ",\"depth\":" << depth + 1 << ",\"bound\":" << bound
                        << ",\"incumbent\":" << incumbent_ << "}\n";
            if (bound * (1.0 + gap_) > incumbent_)
                continue;
            stack_[d + 1] = children_[d][static_cast<std::size_t>(c)];
            dfs(depth + 1);
        }
    }

    std::vector<int> canonical() const
    {
        std::vector<int> flat(path_.size());
        for (std::size_t d = 0; d < path_.size(); ++d)
            flat[static_cast<std::size_t>(order_[d])] = path_[d];
        return flat;
    }

    const PhaseProblem &pb_;
    std::vector<int> order_;
    double gap_;
    std::ostream *trace_;
    std::vector<double> remaining_;
    std::vector<CMat> stack_;
    std::vector<std::vector<CMat>> children_;
    std::vector<int> path_;
    std::vector<int> best_;
    double incumbent_ = std::numeric_limits<double>::infinity();
    std::uint64_t expanded_ = 0;
    std::vector<std::vector<int>> accepted_;
};

// Single-element coordinate descent on the full objective, visiting elements in `order`.
std::vector<int> local_descent(const PhaseProblem &pb, std::vector<int> flat, const std::vector<int> &order)
{
    CMat s = pb.mismatch(flat);
    double current = s.squaredNorm();
    CMat trial(s.rows(), s.cols());
    for (int sweep = 0; sweep < 100; ++sweep)
    {
        bool improved = false;
        for (int e : order)
        {
            const auto ue = static_cast<std::size_t>(e);
            const cd old_phase = pb.phasors[static_cast<std::size_t>(flat[ue])];
            int best_k = flat[ue];
            double best_v = current;
            for (int k = 0; k < pb.n_phases(); ++k)
            {
                if (k == flat[ue])
                    continue;
                trial = s;
                pb.apply(trial, e, pb.phasors[static_cast<std::size_t>(k)] - old_phase);
                const double v = trial.squaredNorm();
                if (v < best_v * (1.0 - 1e-12))
                {
                    best_v = v;
                    best_k = k;
                }
            }
            if (best_k != flat[ue])
            {
                pb.apply(s, e, pb.phasors[static_cast<std::size_t>(best_k)] - old_phase);
                flat[ue] = best_k;
                current = s.squaredNorm();
                improved = true;
            }
        }
        if (!improved)
            break;
    }
    return flat;
}

// Greedy dive: fix elements one at a time in `order`, each to the phase minimizing the partial mismatch.
std::vector<int> greedy_dive(const PhaseProblem &pb, const std::vector<int> &order)
{
    std::vector<int> flat(static_cast<std::size_t>(pb.n_elements()), 0);
    CMat s = pb.s0;
    CMat trial(s.rows(), s.cols());
    for (int e : order)
    {
        int best_k = 0;
        double best_v = std::numeric_limits<double>::infinity();
        for (int k = 0; k < pb.n_phases(); ++k)
        {
            trial = s;
            pb.apply(trial, e, pb.phasors[static_cast<std::size_t>(k)]);
            const double v = trial.squaredNorm();
            if (v < best_v)
            {
                best_v = v;
                best_k = k;
            }
        }
        pb.apply(s, e, pb.phasors[static_cast<std::size_t>(best_k)]);
        flat[static_cast<std::size_t>(e)] = best_k;
    }
    return flat;
}

} // namespace

std::string to_string(PhaseMethod method)
{
    return method == PhaseMethod::Exhaustive ? "es" : "bp";
}

PhaseMethod parse_phase_method(const std::string &text)
{
    if (text == "es")
        return PhaseMethod::Exhaustive;
    if (text == "bp")
        return PhaseMethod::BranchPrune;
    throw std::invalid_argument("unknown phase method '" + text + "' (expected es or bp)");
}

double objective(const ChannelSet &channels, const RisConfiguration &ris, const HybridTransceiver &tx,
                 const ScenarioConfig &config)
{
    return mse_matrix(channels, ris, tx, config).delta;
}

PhaseSearchResult exhaustive_search(const ChannelSet &channels, const HybridTransceiver &tx,
                                    const ScenarioConfig &config)
{
    const PhaseSet phases = build_phase_set(config.phase_cardinality);
    const PhaseProblem pb = build_problem(channels, tx, config, phases);
    const int l = pb.n_elements();
    const int k = pb.n_phases();
    const double total = candidate_count(k, l);
    if (total > config.es_budget)
        throw SearchBudgetExceeded("exhaustive_search: " + std::to_string(k) + "^" + std::to_string(l) +
                                   " candidates exceed the budget of " + std::to_string(config.es_budget));

    // Lexicographic odometer over prefix sums: stack[d] holds S0 plus the first d elements.
    std::vector<CMat> stack(static_cast<std::size_t>(l + 1), pb.s0);
    std::vector<int> digits(static_cast<std::size_t>(l), 0);
    std::vector<int> best = digits;
    double best_value = std::numeric_limits<double>::infinity();
    std::uint64_t scored = 0;

    for (int d = 0; d < l; ++d)
    {
        stack[static_cast<std::size_t>(d + 1)] = stack[static_cast<std::size_t>(d)];
        pb.apply(stack[static_cast<std::size_t>(d + 1)], d, pb.phasors[0]);
    }
    while (true)
    {
        ++scored;
        const double v = pb.value(stack[static_cast<std::size_t>(l)]);
        if (v < best_value)
        {
            best_value = v;
            best = digits;
        }
        int d = l - 1;
        while (d >= 0 && digits[static_cast<std::size_t>(d)] == k - 1)
            --d;
        if (d < 0)
            break;
        ++digits[static_cast<std::size_t>(d)];
        for (int j = d; j < l; ++j)
        {
            if (j > d)
                digits[static_cast<std::size_t>(j)] = 0;
            stack[static_cast<std::size_t>(j + 1)] = stack[static_cast<std::size_t>(j)];
            pb.apply(stack[static_cast<std::size_t>(j + 1)], j, pb.phasors[static_cast<std::size_t>(digits[static_cast<std::size_t>(j)])]);
        }
    }

    PhaseSearchResult out;
    out.method = PhaseMethod::Exhaustive;
    out.ris = pb.to_ris(best, phases);
    out.objective = objective(channels, out.ris, tx, config);
    out.nodes_expanded = scored;
    out.max_incremental_error = std::abs(out.objective - best_value);
    return out;
}

PhaseSearchResult branch_prune_search(const ChannelSet &channels, const HybridTransceiver &tx,
                                      const ScenarioConfig &config, const BranchPruneOptions &options)
{
    const PhaseSet phases = build_phase_set(config.phase_cardinality);
    const PhaseProblem pb = build_problem(channels, tx, config, phases);
    const int l = pb.n_elements();

    PhaseSearchResult out;
    out.method = PhaseMethod::BranchPrune;
    if (l == 0 || pb.n_phases() == 1)
    {
        out.ris = pb.to_ris(std::vector<int>(static_cast<std::size_t>(l), 0), phases);
        out.objective = objective(channels, out.ris, tx, config);
        out.nodes_expanded = 1;
        return out;
    }

    // Information-directed ordering: UEs with the strongest composite link are decided first.
    std::vector<int> ue_order(channels.n_ues());
    std::iota(ue_order.begin(), ue_order.end(), 0);
    std::vector<double> strength;
    for (int i = 0; i < channels.n_ues(); ++i)
        strength.push_back(channels.q_list[static_cast<std::size_t>(i)].norm() * channels.g_list[static_cast<std::size_t>(i)].norm());
    std::stable_sort(ue_order.begin(), ue_order.end(),
                     [&](int x, int y) { return strength[static_cast<std::size_t>(x)] > strength[static_cast<std::size_t>(y)]; });
    std::vector<int> offset(static_cast<std::size_t>(channels.n_ues()), 0);
    for (int i = 1; i < channels.n_ues(); ++i)
        offset[static_cast<std::size_t>(i)] = offset[static_cast<std::size_t>(i - 1)] + pb.elements_per_ue[static_cast<std::size_t>(i - 1)];
    std::vector<int> order;
    for (int i : ue_order)
        for (int m = 0; m < pb.elements_per_ue[static_cast<std::size_t>(i)]; ++m)
            order.push_back(offset[static_cast<std::size_t>(i)] + m);

    BranchPrune search(pb, order, config.near_optimality_gap, options.trace);
    const std::vector<int> dive = local_descent(pb, greedy_dive(pb, order), order);
    search.offer(dive, pb.value(pb.mismatch(dive)));
    if (options.warm_start)
    {
        const std::vector<int> warm = flatten_checked(*options.warm_start, pb);
        search.offer(warm, pb.value(pb.mismatch(warm)));
        const std::vector<int> polished = local_descent(pb, warm, order);
        search.offer(polished, pb.value(pb.mismatch(polished)));
    }
    search.run();

    out.ris = pb.to_ris(search.best(), phases);
    out.objective = objective(channels, out.ris, tx, config);
    out.nodes_expanded = search.expanded();
    out.max_incremental_error = std::abs(out.objective - search.incumbent());
    for (const auto &flat : search.accepted())
    {
        const RisConfiguration ris = pb.to_ris(flat, phases);
        const double incremental = pb.value(pb.mismatch(flat));
        out.max_incremental_error = std::max(out.max_incremental_error, std::abs(incremental - objective(channels, ris, tx, config)));
    }
    return out;
}

PhaseSearchResult search_phases(PhaseMethod method, const ChannelSet &channels, const HybridTransceiver &tx,
                                const ScenarioConfig &config, const RisConfiguration *warm_start)
{
    if (method == PhaseMethod::Exhaustive)
        return exhaustive_search(channels, tx, config);
    BranchPruneOptions options;
    options.warm_start = warm_start;
    return branch_prune_search(channels, tx, config, options);
}

RisConfiguration maximize_channel_gain(const ChannelSet &channels, const PhaseSet &phases)
{
    channels.check();
    RisConfiguration ris = RisConfiguration::zeros(channels, phases);
    CMat h = assemble_effective_channel(channels, ris);
    CMat trial(h.rows(), h.cols());
    for (int sweep = 0; sweep < 100; ++sweep)
    {
        bool improved = false;
        for (int i = 0; i < channels.n_ues(); ++i)
        {
            const auto &q = channels.q_list[static_cast<std::size_t>(i)];
            const auto &g = channels.g_list[static_cast<std::size_t>(i)];
            auto &idx = ris.phase_indices[static_cast<std::size_t>(i)];
            for (Eigen::Index m = 0; m < g.rows(); ++m)
            {
                const cd old_phase = phases.phasor(idx[static_cast<std::size_t>(m)]);
                const int current = idx[static_cast<std::size_t>(m)];
                double best_v = h.squaredNorm();
                int best_k = current;
                for (int k = 0; k < phases.size(); ++k)
                {
                    if (k == current)
                        continue;
                    trial = h;
                    trial.noalias() += ((phases.phasor(k) - old_phase) * q.col(m)) * g.row(m);
                    const double v = trial.squaredNorm();
                    if (v > best_v * (1.0 + 1e-12))
                    {
                        best_v = v;
                        best_k = k;
                    }
                }
                if (best_k != idx[static_cast<std::size_t>(m)])
                {
                    h.noalias() += ((phases.phasor(best_k) - old_phase) * q.col(m)) * g.row(m);
                    idx[static_cast<std::size_t>(m)] = best_k;
                    improved = true;
                }
            }
        }
        if (!improved)
            break;
    }
    return ris;
}

} // namespace uerislink
