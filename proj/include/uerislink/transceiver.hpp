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

#ifndef UERISLINK_TRANSCEIVER_HPP
#define UERISLINK_TRANSCEIVER_HPP

#include "uerislink/scenario.hpp"
#include "uerislink/types.hpp"

#include <cstdint>
#include <vector>

namespace uerislink {

// Full SVD H = U diag(sigma) V^H, sigma descending. Phase convention: the first
// nonzero entry of every column of U is real-positive; the paired column of V is
// rotated by the same phase. Columns of V without a partner follow the same rule.
struct SvdTriple
{
    CMat u;       // N_r x N_r
    RVec sigma;   // min(N_r, N_t)
    CMat v;       // N_t x N_t
};

SvdTriple svd_decompose(const CMat &h);

struct HybridTransceiver
{
    CMat f_analog;     // N_t x N_rt, entries of modulus 1/sqrt(N_t)
    CMat f_digital;    // N_rt x N
    CMat w_analog_h;   // N_rs x N_r, entries of modulus 1/sqrt(N_r)
    CMat w_digital_h;  // N x N_rs

    CMat precoder() const { return f_analog * f_digital; }
    CMat combiner() const { return w_digital_h * w_analog_h; }
};

struct FactorizationOptions
{
    int max_iterations = 200;
    double tolerance = 1e-8;   // stop when the residual changes less than this
    int restarts = 4;          // restart 0 is deterministic, the rest use seeded random phases
    std::uint64_t seed = 0x68796272;
};

struct HybridFactorization
{
    CMat analog;    // n_antennas x n_rf, constant modulus 1/sqrt(n_antennas)
    CMat digital;   // n_rf x n_streams, scaled so ||analog * digital||_F^2 = n_streams
    double residual = 0.0;                 // ||target - analog * digital||_F after scaling
    std::vector<double> residual_history;  // winning restart, one entry per least-squares step
    bool closed_form = false;              // exact two-phase-shifter construction was used
};

// Approximates target (n_antennas x N) by analog * digital with a constant-modulus
// analog stage. Alternates a least-squares digital step with exact per-entry phase
// updates of the analog stage; both steps are non-increasing in the residual.
// When n_rf >= 2N the target is realized exactly by pairing phase shifters.
HybridFactorization factorize_hybrid(const CMat &target, int n_rf, const FactorizationOptions &options = {});

// Targets the first N right singular vectors with the N_rt-chain TX architecture.
HybridFactorization design_hybrid_precoder(const SvdTriple &svd, const ScenarioConfig &config,
                                           const FactorizationOptions &options = {});

// Targets the first N left singular vectors; the returned factors are W_A and W_D
// (not yet Hermitian-transposed), so that W_D^H W_A^H approximates U_N^H.
HybridFactorization design_hybrid_combiner(const SvdTriple &svd, const ScenarioConfig &config,
                                           const FactorizationOptions &options = {});

HybridTransceiver design_transceiver(const SvdTriple &svd, const ScenarioConfig &config,
                                     const FactorizationOptions &options = {});

} // namespace uerislink

#endif
