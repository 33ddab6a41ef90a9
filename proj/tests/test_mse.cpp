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

#include "uerislink/transceiver.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace uerislink;
using testsupport::random_matrix;

namespace {

// Hand-built transceiver with all-digital stages: F = F_D, W = W_D^H.
HybridTransceiver plain(const CMat &f, const CMat &w)
{
    return {CMat::Identity(f.rows(), f.rows()), f, CMat::Identity(w.cols(), w.cols()), w};
}

struct Instance
{
    CMat h;
    HybridTransceiver tx;
};

Instance small_instance(std::uint64_t seed)
{
    const auto cfg = testsupport::small_config(4, 4, 2, 1, 2, 3);
    Rng rng(seed);
    const auto ch = testsupport::iid_channels(cfg, rng);
    const auto ris = RisConfiguration::zeros(ch, build_phase_set(3));
    const CMat h = assemble_effective_channel(ch, ris);
    return {h, design_transceiver(svd_decompose(h), cfg)};
}

} // namespace

TEST_SUITE("mse")
{
    TEST_CASE("perfect equalization without noise gives zero")
    {
        const CMat i4 = CMat::Identity(4, 4);
        const auto r = mse_matrix(i4, plain(i4, i4), 1.0, 0.0);
        CHECK(r.delta == 0.0);
        CHECK(r.keff == i4);
    }

    TEST_CASE("zero channel, identity combiner")
    {
        const int n = 4;
        const CMat w = CMat::Identity(n, n);
        const auto r = mse_matrix(CMat::Zero(n, n), plain(w, w), 1.0, 0.5);
        CHECK(r.delta == doctest::Approx(1.5 * n).epsilon(1e-14));
        CHECK(r.keff.norm() == 0.0);
    }

    TEST_CASE("report invariants")
    {
        for (std::uint64_t s = 0; s < 50; ++s)
        {
            const auto inst = small_instance(s);
            const auto r = mse_matrix(inst.h, inst.tx, 1.0, 0.01);
            CHECK((r.mse_matrix - r.mse_matrix.adjoint()).norm() <= 1e-10);
            CHECK(std::abs(r.delta - r.mse_matrix.trace().real()) <= 1e-10);
            CHECK(r.delta >= 0.0);
            Eigen::SelfAdjointEigenSolver<CMat> eig(r.mse_matrix);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
            CHECK((r.keff - r.w_combined * inst.h * inst.tx.precoder()).norm() <= 1e-12);
        }
    }

    TEST_CASE("global phase rotation leaves the MSE unchanged")
    {
        const auto inst = small_instance(7);
        const double base = mse_matrix(inst.h, inst.tx, 1.0, 0.02).delta;
        for (double theta : {0.3, 1.7, -2.9})
        {
            auto tx = inst.tx;
            tx.w_digital_h *= std::polar(1.0, theta);
            const CMat h = inst.h * std::polar(1.0, -theta);
            CHECK(mse_matrix(h, tx, 1.0, 0.02).delta == doctest::Approx(base).epsilon(1e-12));
        }
    }

    TEST_CASE("dimension mismatch is rejected")
    {
        const auto inst = small_instance(8);
        CHECK_THROWS_AS(mse_matrix(CMat::Zero(5, 4), inst.tx, 1.0, 0.1), std::invalid_argument);
    }

    TEST_CASE("noise calibration")
    {
        ScenarioConfig c;
        c.receive_snr_db = 25.0;
        const double expect = 1.0 * 8 * (8.0 / (16.0 * 12.0)) / std::pow(10.0, 2.5);
        CHECK(calibrated_noise_power(c) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(with_calibrated_noise(c).noise_power == doctest::Approx(expect).epsilon(1e-14));
        c.receive_snr_db = std::nullopt;
        c.noise_power = 0.125;
        CHECK(calibrated_noise_power(c) == 0.125);
    }

    TEST_CASE("QAM alphabets")
    {
        for (int order : {4, 16, 64, 256})
        {
            const auto a = qam_constellation(order);
            REQUIRE(a.size() == static_cast<std::size_t>(order));
            double energy = 0.0;
            std::set<std::pair<double, double>> distinct;
            for (auto s : a)
            {
                energy += std::norm(s);
                distinct.insert({s.real(), s.imag()});
            }
            CHECK(energy / order == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(distinct.size() == a.size());
        }
        CHECK_THROWS_AS(qam_constellation(8), std::invalid_argument);
        CHECK_THROWS_AS(qam_constellation(0), std::invalid_argument);
    }

    TEST_CASE("noiseless identity link")
    {
        const CMat i4 = CMat::Identity(4, 4);
        Rng a(1), b(2);
        const auto e = simulate_link(i4, plain(i4, i4), 1.0, 0.0, 1000, 64, a, b);
        CHECK(e.mean <= 1e-12);
    }

    TEST_CASE("pure signal-plus-noise link")
    {
        const int n = 4;
        const CMat w = CMat::Identity(n, n);
        Rng a(3), b(4);
        const auto e = simulate_link(CMat::Zero(n, n), plain(w, w), 1.0, 0.5, 100000, 64, a, b);
        CHECK(std::abs(e.mean - (1.0 * n + 0.5 * n)) <= 3.0 * e.std_error);
    }

    TEST_CASE("empirical MSE agrees with the analytic trace at 1e6 symbols")
    {
        const auto inst = small_instance(9);
        const double sigma2 = 0.05;
        const double delta = mse_matrix(inst.h, inst.tx, 1.0, sigma2).delta;
        Rng a(5), b(6);
        const auto e = simulate_link(inst.h, inst.tx, 1.0, sigma2, 1000000, 64, a, b);
        CHECK(std::abs(e.mean - delta) <= 0.01 * delta);
    }

    TEST_CASE("3-sigma bands shrink with the symbol count")
    {
        const auto inst = small_instance(10);
        const double sigma2 = 0.05;
        const double delta = mse_matrix(inst.h, inst.tx, 1.0, sigma2).delta;
        double prev_se = INFINITY;
        for (int n : {1000, 10000, 100000})
        {
            Rng a(derive_seed(11, "symbols", n)), b(derive_seed(11, "noise", n));
            const auto e = simulate_link(inst.h, inst.tx, 1.0, sigma2, n, 64, a, b);
            CHECK(e.n_symbols == n);
            CHECK(std::abs(e.mean - delta) <= 3.0 * e.std_error);
            CHECK(e.std_error < prev_se);
            prev_se = e.std_error;
        }
    }

    TEST_CASE("simulation is reproducible from its streams")
    {
        const auto inst = small_instance(12);
        Rng a1(1), b1(2), a2(1), b2(2);
        const auto x = simulate_link(inst.h, inst.tx, 1.0, 0.1, 500, 16, a1, b1);
        const auto y = simulate_link(inst.h, inst.tx, 1.0, 0.1, 500, 16, a2, b2);
        CHECK(x.mean == y.mean);
        CHECK(x.std_error == y.std_error);
        Rng a3(1), b3(2);
        CHECK_THROWS_AS(simulate_link(inst.h, inst.tx, 1.0, 0.1, 0, 16, a3, b3), std::invalid_argument);
    }
}
