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

#ifndef UERISLINK_RNG_HPP
#define UERISLINK_RNG_HPP

#include "uerislink/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace uerislink {

using Rng = std::mt19937_64;

// Every random draw in the simulator comes from a named sub-stream of one base
// seed, so any stage can be re-run in isolation. The derivation is a pure
// function of (base, stream, index) and does not depend on std::hash.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t base, std::string_view stream, std::uint64_t index = 0)
{
    return Rng(derive_seed(base, stream, index));
}

// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
cd complex_normal(Rng &rng, double variance = 1.0);

double uniform(Rng &rng, double lo, double hi);

} // namespace uerislink

#endif
